#pragma once

#include <Eigen/Dense>
#include <span>

#include "cmf/solve_loop.hpp"

namespace cmf {

/// Closed-form regularized least-squares solve for one row:
/// u = (sum_i v_i v_i^T + lambda I)^-1 (sum_i y_i v_i),
/// where `neighbors` indexes rows of `fixed` (row-major, `rank` wide).
/// An empty neighbor list with lambda > 0 yields the zero vector.
inline void als_row_update(std::span<double> out, index_t rank,
                           std::span<const Neighbor> neighbors, const std::vector<Entry>& entries,
                           const std::vector<double>& fixed, double lambda) {
    if (neighbors.empty() && lambda > 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    Eigen::MatrixXd gram = lambda * Eigen::MatrixXd::Identity(rank, rank);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rank);
    for (const Neighbor& nb : neighbors) {
        Eigen::Map<const Eigen::VectorXd> w(fixed.data() + static_cast<std::size_t>(nb.other) * rank, rank);
        gram.noalias() += w * w.transpose();
        rhs.noalias() += entries[nb.entry].value * w;
    }
    Eigen::VectorXd sol;
    if (lambda > 0.0) {
        sol = Eigen::LLT<Eigen::MatrixXd>(gram).solve(rhs);
    } else {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        if (!lu.isInvertible())
            throw solver_error("als_row_update: singular Gram matrix with lambda = 0");
        sol = lu.solve(rhs);
    }
    for (index_t k = 0; k < rank; ++k) out[k] = sol[k];
}

/// Updates every row of U from the current V.
inline void als_half_sweep_u(FactorPair& f, const ObservedMatrix& obs, double lambda) {
    const index_t rank = f.rank();
    for (index_t mu = 0; mu < obs.n_rows(); ++mu)
        als_row_update(f.u_row(mu), rank, obs.row_neighbors(mu), obs.entries(), f.v_data(), lambda);
}

/// Updates every row of V from the current U.
inline void als_half_sweep_v(FactorPair& f, const ObservedMatrix& obs, double lambda) {
    const index_t rank = f.rank();
    for (index_t i = 0; i < obs.n_cols(); ++i)
        als_row_update(f.v_row(i), rank, obs.col_neighbors(i), obs.entries(), f.u_data(), lambda);
}

inline void als_sweep(FactorPair& f, const ObservedMatrix& obs, double lambda) {
    als_half_sweep_u(f, obs, lambda);
    als_half_sweep_v(f, obs, lambda);
}

inline SolveResult als_solve(const ObservedMatrix& obs, const SolverConfig& cfg,
                             FactorPair init, const std::vector<Entry>* holdout = nullptr) {
    return run_sweeps("als", obs, cfg, std::move(init), holdout,
                      [&obs, &cfg](FactorPair& f, int) { als_sweep(f, obs, cfg.lambda); });
}

} // namespace cmf
