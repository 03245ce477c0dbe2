#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "cmf/factors.hpp"
#include "cmf/observed_matrix.hpp"

namespace cmf {

struct SyntheticConfig {
    index_t n_rows = 500;
    index_t n_cols = 1000;
    index_t rank = 10;
    double c = 30.0;        // mean observations per column
    double noise_var = 0.09;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_rows <= 0 || n_cols <= 0 || rank <= 0)
            throw std::invalid_argument("SyntheticConfig: dimensions must be positive");
        if (!(c > 0.0) || c > static_cast<double>(n_rows))
            throw std::invalid_argument("SyntheticConfig: c must be in (0, N]");
        if (noise_var < 0.0)
            throw std::invalid_argument("SyntheticConfig: noise_var must be nonnegative");
    }
};

/// Ground truth kept as its factors plus the noise actually drawn at observed
/// positions, so no dense N x M matrix is materialized. Observed entries
/// equal the corresponding ground-truth entries exactly.
struct SyntheticInstance {
    FactorPair truth;      // U0, V0 with standard-Gaussian entries
    ObservedMatrix observed;
    bool identifiability_warning = false; // E|Omega| < R(N+M)
};

/// Y0 = U0 V0^T + Z with Z ~ N(0, noise_var); each position observed
/// independently with probability c/N. Deterministic per seed.
inline SyntheticInstance generate(const SyntheticConfig& cfg) {
    cfg.validate();
    std::mt19937_64 gen(cfg.seed);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    FactorPair truth(cfg.n_rows, cfg.n_cols, cfg.rank);
    for (double& x : truth.u_data()) x = std_normal(gen);
    for (double& x : truth.v_data()) x = std_normal(gen);

    const double p = cfg.c / static_cast<double>(cfg.n_rows);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, std::sqrt(cfg.noise_var));
    std::vector<Entry> entries;
    for (index_t mu = 0; mu < cfg.n_rows; ++mu) {
        for (index_t i = 0; i < cfg.n_cols; ++i) {
            if (unif(gen) >= p) continue;
            double y = predict(truth, mu, i);
            if (cfg.noise_var > 0.0) y += noise(gen);
            entries.push_back(Entry{mu, i, y});
        }
    }
    const double expected = cfg.c * static_cast<double>(cfg.n_cols);
    const bool warn =
        expected < static_cast<double>(cfg.rank) * static_cast<double>(cfg.n_rows + cfg.n_cols);
    return SyntheticInstance{std::move(truth),
                             ObservedMatrix(cfg.n_rows, cfg.n_cols, std::move(entries)), warn};
}

/// Relative Frobenius error against the full ground-truth matrix, summed over
/// ALL N*M positions. Ground truth at observed positions carries the drawn
/// noise; elsewhere it is the noiseless low-rank value.
inline double rrmse(const FactorPair& f, const SyntheticInstance& inst) {
    const ObservedMatrix& obs = inst.observed;
    const index_t rank = f.rank();
    double num = 0.0, den = 0.0;
    std::unordered_map<index_t, double> observed_in_row;
    for (index_t mu = 0; mu < obs.n_rows(); ++mu) {
        observed_in_row.clear();
        for (const Neighbor& nb : obs.row_neighbors(mu))
            observed_in_row.emplace(nb.other, obs.entry(nb.entry).value);
        auto u0 = inst.truth.u_row(mu);
        auto u = f.u_row(mu);
        for (index_t i = 0; i < obs.n_cols(); ++i) {
            auto v0 = inst.truth.v_row(i);
            double y0 = 0.0;
            if (auto it = observed_in_row.find(i); it != observed_in_row.end()) {
                y0 = it->second;
            } else {
                for (index_t r = 0; r < rank; ++r) y0 += u0[r] * v0[r];
            }
            auto v = f.v_row(i);
            double pred = 0.0;
            for (index_t r = 0; r < rank; ++r) pred += u[r] * v[r];
            const double d = y0 - pred;
            num += d * d;
            den += y0 * y0;
        }
    }
    if (den == 0.0) throw std::invalid_argument("rrmse: zero-norm ground truth");
    return std::sqrt(num) / std::sqrt(den);
}

/// Writes observed triples as "row col value" lines.
inline void save_triples(const ObservedMatrix& obs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("save_triples: cannot open " + path);
    out.precision(17);
    for (const Entry& e : obs.entries()) out << e.row << ' ' << e.col << ' ' << e.value << '\n';
    if (!out) throw io_error("save_triples: write failed on " + path);
}

inline ObservedMatrix load_triples(const std::string& path, index_t n_rows, index_t n_cols) {
    std::ifstream in(path);
    if (!in) throw io_error("load_triples: cannot open " + path);
    std::vector<Entry> entries;
    Entry e;
    while (in >> e.row >> e.col >> e.value) entries.push_back(e);
    return ObservedMatrix(n_rows, n_cols, std::move(entries));
}

} // namespace cmf
