#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cmf/errors.hpp"
#include "cmf/observed_matrix.hpp"

namespace cmf {

/// Dense factor matrices U (N x R) and V (M x R), row-major.
class FactorPair {
public:
    FactorPair(index_t n_rows, index_t n_cols, index_t rank)
        : n_rows_(n_rows), n_cols_(n_cols), rank_(rank),
          u_(static_cast<std::size_t>(n_rows) * rank, 0.0),
          v_(static_cast<std::size_t>(n_cols) * rank, 0.0) {
        if (rank <= 0) throw std::invalid_argument("FactorPair: rank must be positive");
    }

    index_t n_rows() const { return n_rows_; }
    index_t n_cols() const { return n_cols_; }
    index_t rank() const { return rank_; }

    std::span<double> u_row(index_t r) { return {u_.data() + static_cast<std::size_t>(r) * rank_, static_cast<std::size_t>(rank_)}; }
    std::span<const double> u_row(index_t r) const { return {u_.data() + static_cast<std::size_t>(r) * rank_, static_cast<std::size_t>(rank_)}; }
    std::span<double> v_row(index_t c) { return {v_.data() + static_cast<std::size_t>(c) * rank_, static_cast<std::size_t>(rank_)}; }
    std::span<const double> v_row(index_t c) const { return {v_.data() + static_cast<std::size_t>(c) * rank_, static_cast<std::size_t>(rank_)}; }

    std::vector<double>& u_data() { return u_; }
    std::vector<double>& v_data() { return v_; }
    const std::vector<double>& u_data() const { return u_; }
    const std::vector<double>& v_data() const { return v_; }

    bool all_finite() const {
        for (double x : u_) if (!std::isfinite(x)) return false;
        for (double x : v_) if (!std::isfinite(x)) return false;
        return true;
    }

private:
    index_t n_rows_, n_cols_, rank_;
    std::vector<double> u_, v_;
};

/// Predicted entry: u_row . v_col.
inline double predict(const FactorPair& f, index_t row, index_t col) {
    if (row < 0 || row >= f.n_rows() || col < 0 || col >= f.n_cols())
        throw std::invalid_argument("predict: index out of range");
    auto u = f.u_row(row);
    auto v = f.v_row(col);
    double s = 0.0;
    for (index_t r = 0; r < f.rank(); ++r) s += u[r] * v[r];
    return s;
}

/// Regularized squared-loss objective:
/// 1/2 sum_{(mu,i) in Omega} (y - u.v)^2 + lambda/2 (|U|_F^2 + |V|_F^2).
inline double objective(const FactorPair& f, const ObservedMatrix& obs, double lambda) {
    if (f.n_rows() != obs.n_rows() || f.n_cols() != obs.n_cols())
        throw std::invalid_argument("objective: factor/observation dimension mismatch");
    double loss = 0.0;
    for (const Entry& e : obs.entries()) {
        const double d = e.value - predict(f, e.row, e.col);
        loss += d * d;
    }
    double frob = 0.0;
    for (double x : f.u_data()) frob += x * x;
    for (double x : f.v_data()) frob += x * x;
    return 0.5 * loss + 0.5 * lambda * frob;
}

/// Seeded Gaussian initialization; entries ~ N(0, scale^2).
/// Default scale 1/sqrt(R) keeps initial predictions at O(1) variance.
inline FactorPair init_factors(index_t n_rows, index_t n_cols, index_t rank,
                               std::uint64_t seed, double scale) {
    if (rank <= 0) throw std::invalid_argument("init_factors: rank must be positive");
    if (!(scale > 0.0)) throw std::invalid_argument("init_factors: scale must be positive");
    FactorPair f(n_rows, n_cols, rank);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, scale);
    for (double& x : f.u_data()) x = dist(gen);
    for (double& x : f.v_data()) x = dist(gen);
    return f;
}

inline FactorPair init_factors(index_t n_rows, index_t n_cols, index_t rank, std::uint64_t seed) {
    return init_factors(n_rows, n_cols, rank, seed, 1.0 / std::sqrt(static_cast<double>(rank)));
}

/// Text serialization: header line "N M R", then N rows of U and M rows of V,
/// row-major, full double precision.
inline void save_factors(const FactorPair& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("save_factors: cannot open " + path);
    out.precision(17);
    out << f.n_rows() << ' ' << f.n_cols() << ' ' << f.rank() << '\n';
    for (index_t r = 0; r < f.n_rows(); ++r) {
        auto row = f.u_row(r);
        for (index_t k = 0; k < f.rank(); ++k) out << row[k] << (k + 1 == f.rank() ? '\n' : ' ');
    }
    for (index_t c = 0; c < f.n_cols(); ++c) {
        auto row = f.v_row(c);
        for (index_t k = 0; k < f.rank(); ++k) out << row[k] << (k + 1 == f.rank() ? '\n' : ' ');
    }
    if (!out) throw io_error("save_factors: write failed on " + path);
}

inline FactorPair load_factors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("load_factors: cannot open " + path);
    index_t n, m, r;
    if (!(in >> n >> m >> r)) throw data_error("load_factors: bad header in " + path);
    FactorPair f(n, m, r);
    for (double& x : f.u_data())
        if (!(in >> x)) throw data_error("load_factors: truncated U block in " + path);
    for (double& x : f.v_data())
        if (!(in >> x)) throw data_error("load_factors: truncated V block in " + path);
    return f;
}

} // namespace cmf
