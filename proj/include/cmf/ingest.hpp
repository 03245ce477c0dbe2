#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cmf/errors.hpp"
#include "cmf/observed_matrix.hpp"

namespace cmf {

struct RatingRecord {
    std::int64_t user = 0;
    std::int64_t item = 0;
    double rating = 0.0;
    std::int64_t timestamp = 0; // parsed, ignored downstream
};

enum class RatingsFormat { double_colon, comma_header };

enum class RatingScale { integer_1_to_5, half_0p5_to_5 };

inline bool is_valid_rating(RatingScale scale, double r) {
    switch (scale) {
        case RatingScale::integer_1_to_5:
            return r >= 1.0 && r <= 5.0 && r == std::floor(r);
        case RatingScale::half_0p5_to_5: {
            const double doubled = r * 2.0;
            return r >= 0.5 && r <= 5.0 && doubled == std::floor(doubled);
        }
    }
    return false;
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, const std::string& sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + sep.size();
    }
}

inline RatingRecord parse_fields(const std::vector<std::string>& f, const std::string& line,
                                 std::size_t line_no) {
    if (f.size() < 3 || f.size() > 4)
        throw data_error("ratings line " + std::to_string(line_no) + ": expected 3-4 fields, got " +
                         std::to_string(f.size()) + " in '" + line + "'");
    RatingRecord rec;
    try {
        rec.user = std::stoll(f[0]);
        rec.item = std::stoll(f[1]);
        rec.rating = std::stod(f[2]);
        rec.timestamp = f.size() == 4 && !f[3].empty() ? std::stoll(f[3]) : 0;
    } catch (const std::exception&) {
        throw data_error("ratings line " + std::to_string(line_no) + ": malformed '" + line + "'");
    }
    return rec;
}

} // namespace detail

/// Parses a ratings stream. double_colon expects
/// `user::item::rating::timestamp`; comma_header expects a CSV with a header
/// row `userId,movieId,rating,timestamp`. Malformed lines fail fast with the
/// offending line number.
inline std::vector<RatingRecord> parse_ratings(std::istream& in, RatingsFormat format) {
    std::vector<RatingRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (format == RatingsFormat::comma_header && !header_skipped) {
            header_skipped = true;
            continue;
        }
        const auto fields = format == RatingsFormat::double_colon ? detail::split(line, "::")
                                                                  : detail::split(line, ",");
        records.push_back(detail::parse_fields(fields, line, line_no));
    }
    return records;
}

inline std::vector<RatingRecord> parse_ratings(const std::string& path, RatingsFormat format) {
    std::ifstream in(path);
    if (!in) throw io_error("parse_ratings: cannot open " + path);
    return parse_ratings(in, format);
}

/// Picks double_colon when the first line contains "::", comma_header otherwise.
inline RatingsFormat detect_format(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("detect_format: cannot open " + path);
    std::string line;
    std::getline(in, line);
    return line.find("::") != std::string::npos ? RatingsFormat::double_colon
                                                : RatingsFormat::comma_header;
}

/// Bijection between raw MovieLens ids and dense [0, N) x [0, M) indices,
/// in first-appearance order.
struct IndexMap {
    std::unordered_map<std::int64_t, index_t> user_to_row, item_to_col;
    std::vector<std::int64_t> row_to_user, col_to_item;

    index_t map_user(std::int64_t raw) {
        auto [it, inserted] = user_to_row.try_emplace(raw, static_cast<index_t>(row_to_user.size()));
        if (inserted) row_to_user.push_back(raw);
        return it->second;
    }
    index_t map_item(std::int64_t raw) {
        auto [it, inserted] = item_to_col.try_emplace(raw, static_cast<index_t>(col_to_item.size()));
        if (inserted) col_to_item.push_back(raw);
        return it->second;
    }
    index_t n_rows() const { return static_cast<index_t>(row_to_user.size()); }
    index_t n_cols() const { return static_cast<index_t>(col_to_item.size()); }
};

inline IndexMap build_index_map(const std::vector<RatingRecord>& records) {
    IndexMap map;
    for (const RatingRecord& r : records) {
        map.map_user(r.user);
        map.map_item(r.item);
    }
    return map;
}

inline std::vector<Entry> to_entries(const std::vector<RatingRecord>& records, IndexMap& map) {
    std::vector<Entry> entries;
    entries.reserve(records.size());
    for (const RatingRecord& r : records)
        entries.push_back(Entry{map.map_user(r.user), map.map_item(r.item), r.rating});
    return entries;
}

/// Seeded random partition into k folds whose sizes differ by at most one.
/// Returns index lists into `records`.
inline std::vector<std::vector<std::size_t>> kfold_split(std::size_t n_records, int k,
                                                         std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
    if (static_cast<std::size_t>(k) > n_records)
        throw std::invalid_argument("kfold_split: k exceeds record count");
    std::vector<std::size_t> order(n_records);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 gen(seed);
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t pos = 0; pos < n_records; ++pos)
        folds[pos % static_cast<std::size_t>(k)].push_back(order[pos]);
    return folds;
}

} // namespace cmf
