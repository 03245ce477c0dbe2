#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmf/errors.hpp"

namespace cmf {

using index_t = std::int32_t;

struct Entry {
    index_t row;
    index_t col;
    double value;
};

// One (neighbor index, entry id) pair of an adjacency list.
struct Neighbor {
    index_t other; // column index when iterating a row, row index when iterating a column
    index_t entry; // id into entries()
};

/// Sparse N x M rating matrix with both row- and column-oriented adjacency,
/// so that the neighborhoods ∂μ and ∂i can each be walked in O(degree).
/// Immutable after construction.
class ObservedMatrix {
public:
    ObservedMatrix(index_t n_rows, index_t n_cols, std::vector<Entry> entries)
        : n_rows_(n_rows), n_cols_(n_cols), entries_(std::move(entries)) {
        if (n_rows_ < 0 || n_cols_ < 0)
            throw std::invalid_argument("ObservedMatrix: negative dimension");
        row_offsets_.assign(static_cast<std::size_t>(n_rows_) + 1, 0);
        col_offsets_.assign(static_cast<std::size_t>(n_cols_) + 1, 0);
        for (const Entry& e : entries_) {
            if (e.row < 0 || e.row >= n_rows_ || e.col < 0 || e.col >= n_cols_)
                throw data_error("ObservedMatrix: entry (" + std::to_string(e.row) + "," +
                                 std::to_string(e.col) + ") out of range");
            ++row_offsets_[static_cast<std::size_t>(e.row) + 1];
            ++col_offsets_[static_cast<std::size_t>(e.col) + 1];
        }
        for (index_t r = 0; r < n_rows_; ++r) row_offsets_[r + 1] += row_offsets_[r];
        for (index_t c = 0; c < n_cols_; ++c) col_offsets_[c + 1] += col_offsets_[c];
        row_adj_.resize(entries_.size());
        col_adj_.resize(entries_.size());
        std::vector<index_t> rpos(row_offsets_.begin(), row_offsets_.end() - 1);
        std::vector<index_t> cpos(col_offsets_.begin(), col_offsets_.end() - 1);
        for (index_t id = 0; id < static_cast<index_t>(entries_.size()); ++id) {
            const Entry& e = entries_[id];
            row_adj_[rpos[e.row]++] = Neighbor{e.col, id};
            col_adj_[cpos[e.col]++] = Neighbor{e.row, id};
        }
        check_no_duplicates();
    }

    index_t n_rows() const { return n_rows_; }
    index_t n_cols() const { return n_cols_; }
    index_t nnz() const { return static_cast<index_t>(entries_.size()); }

    const std::vector<Entry>& entries() const { return entries_; }
    const Entry& entry(index_t id) const { return entries_[id]; }

    std::span<const Neighbor> row_neighbors(index_t row) const {
        return {row_adj_.data() + row_offsets_[row],
                static_cast<std::size_t>(row_offsets_[row + 1] - row_offsets_[row])};
    }
    std::span<const Neighbor> col_neighbors(index_t col) const {
        return {col_adj_.data() + col_offsets_[col],
                static_cast<std::size_t>(col_offsets_[col + 1] - col_offsets_[col])};
    }

    index_t row_degree(index_t row) const { return row_offsets_[row + 1] - row_offsets_[row]; }
    index_t col_degree(index_t col) const { return col_offsets_[col + 1] - col_offsets_[col]; }

private:
    void check_no_duplicates() const {
        // Row adjacency is grouped by row; sort a copy of each row's columns.
        std::vector<index_t> cols;
        for (index_t r = 0; r < n_rows_; ++r) {
            auto nb = row_neighbors(r);
            cols.clear();
            for (const Neighbor& n : nb) cols.push_back(n.other);
            std::sort(cols.begin(), cols.end());
            for (std::size_t k = 1; k < cols.size(); ++k)
                if (cols[k] == cols[k - 1])
                    throw data_error("ObservedMatrix: duplicate entry (" + std::to_string(r) +
                                     "," + std::to_string(cols[k]) + ")");
        }
    }

    index_t n_rows_;
    index_t n_cols_;
    std::vector<Entry> entries_;
    std::vector<index_t> row_offsets_, col_offsets_;
    std::vector<Neighbor> row_adj_, col_adj_;
};

/// Builds an ObservedMatrix from (row, col, value) triples, rejecting
/// duplicates and out-of-range indices.
inline ObservedMatrix build_observed(std::vector<Entry> triples, index_t n_rows, index_t n_cols) {
    return ObservedMatrix(n_rows, n_cols, std::move(triples));
}

} // namespace cmf
