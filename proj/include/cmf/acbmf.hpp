#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cmf/als.hpp"
#include "cmf/solve_loop.hpp"

namespace cmf {

/// Node-indexed cavity parameters with per-observation residual corrections.
/// Memory: 2(N+M)R node slots plus 4|Omega| observation slots.
struct ApproxCavityState {
    std::vector<double> a, b; // N x R
    std::vector<double> c, d; // M x R
    std::vector<double> chi, phi, eta_obs, psi; // per observation
    FactorPair factors;
    double lambda = 0.0;

    ApproxCavityState(index_t n_rows, index_t n_cols, index_t rank, index_t nnz, double lam)
        : a(static_cast<std::size_t>(n_rows) * rank, 0.0),
          b(static_cast<std::size_t>(n_rows) * rank, 0.0),
          c(static_cast<std::size_t>(n_cols) * rank, 0.0),
          d(static_cast<std::size_t>(n_cols) * rank, 0.0),
          chi(nnz, 0.0), phi(nnz, 0.0), eta_obs(nnz, 0.0), psi(nnz, 0.0),
          factors(n_rows, n_cols, rank), lambda(lam) {}

    std::size_t node_slot_count() const { return a.size() + b.size() + c.size() + d.size(); }
    std::size_t observation_slot_count() const {
        return chi.size() + phi.size() + eta_obs.size() + psi.size();
    }
};

inline ApproxCavityState acbmf_init(const ObservedMatrix& obs, index_t rank, double lambda,
                                    std::uint64_t seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("acbmf_init: lambda must be positive");
    ApproxCavityState st(obs.n_rows(), obs.n_cols(), rank, obs.nnz(), lambda);
    FactorPair v_init = init_factors(obs.n_rows(), obs.n_cols(), rank, seed);
    st.factors.v_data() = v_init.v_data(); // U zero, phi/psi zero
    for (index_t id = 0; id < obs.nnz(); ++id) {
        const Entry& e = obs.entry(id);
        auto v = st.factors.v_row(e.col);
        double chi = 0.0;
        for (index_t r = 0; r < rank; ++r) chi += v[r] * v[r] / lambda;
        st.chi[id] = chi;
    }
    return st;
}

/// U-side block: per-observation chi and phi (previous phi on the right-hand
/// side), then node precisions/means, then U. Repeated inner_iterations times.
inline void acbmf_half_sweep_u(ApproxCavityState& st, const ObservedMatrix& obs,
                               int inner_iterations = 1) {
    const index_t rank = st.factors.rank();
    const double lambda = st.lambda;
    for (int it = 0; it < inner_iterations; ++it) {
        for (index_t id = 0; id < obs.nnz(); ++id) {
            const Entry& e = obs.entry(id);
            auto v = st.factors.v_row(e.col);
            auto u = st.factors.u_row(e.row);
            const double* an = st.a.data() + static_cast<std::size_t>(e.row) * rank;
            double chi = 0.0, dot = 0.0;
            for (index_t r = 0; r < rank; ++r) {
                chi += v[r] * v[r] / (an[r] + lambda);
                dot += u[r] * v[r];
            }
            st.chi[id] = chi;
            st.phi[id] = (e.value - dot + st.phi[id] * chi) / (1.0 + chi);
            if (!std::isfinite(st.phi[id]))
                throw solver_error("acbmf: phi diverged at entry " + std::to_string(id));
        }
        for (index_t mu = 0; mu < obs.n_rows(); ++mu) {
            auto nbs = obs.row_neighbors(mu);
            double* an = st.a.data() + static_cast<std::size_t>(mu) * rank;
            double* bn = st.b.data() + static_cast<std::size_t>(mu) * rank;
            auto u = st.factors.u_row(mu);
            for (index_t r = 0; r < rank; ++r) {
                double sum_v2 = 0.0, sum_phi_v = 0.0;
                for (const Neighbor& nb : nbs) {
                    const double vr = st.factors.v_row(nb.other)[r];
                    sum_v2 += vr * vr / (1.0 + st.chi[nb.entry]);
                    sum_phi_v += st.phi[nb.entry] * vr;
                }
                an[r] = sum_v2;
                bn[r] = sum_phi_v + u[r] * sum_v2;
                u[r] = bn[r] / (an[r] + lambda);
            }
        }
    }
}

/// V-side mirror using the fresh U.
inline void acbmf_half_sweep_v(ApproxCavityState& st, const ObservedMatrix& obs,
                               int inner_iterations = 1) {
    const index_t rank = st.factors.rank();
    const double lambda = st.lambda;
    for (int it = 0; it < inner_iterations; ++it) {
        for (index_t id = 0; id < obs.nnz(); ++id) {
            const Entry& e = obs.entry(id);
            auto v = st.factors.v_row(e.col);
            auto u = st.factors.u_row(e.row);
            const double* cn = st.c.data() + static_cast<std::size_t>(e.col) * rank;
            double eta = 0.0, dot = 0.0;
            for (index_t r = 0; r < rank; ++r) {
                eta += u[r] * u[r] / (cn[r] + lambda);
                dot += u[r] * v[r];
            }
            st.eta_obs[id] = eta;
            st.psi[id] = (e.value - dot + st.psi[id] * eta) / (1.0 + eta);
            if (!std::isfinite(st.psi[id]))
                throw solver_error("acbmf: psi diverged at entry " + std::to_string(id));
        }
        for (index_t i = 0; i < obs.n_cols(); ++i) {
            auto nbs = obs.col_neighbors(i);
            double* cn = st.c.data() + static_cast<std::size_t>(i) * rank;
            double* dn = st.d.data() + static_cast<std::size_t>(i) * rank;
            auto v = st.factors.v_row(i);
            for (index_t r = 0; r < rank; ++r) {
                double sum_u2 = 0.0, sum_psi_u = 0.0;
                for (const Neighbor& nb : nbs) {
                    const double ur = st.factors.u_row(nb.other)[r];
                    sum_u2 += ur * ur / (1.0 + st.eta_obs[nb.entry]);
                    sum_psi_u += st.psi[nb.entry] * ur;
                }
                cn[r] = sum_u2;
                dn[r] = sum_psi_u + v[r] * sum_u2;
                v[r] = dn[r] / (cn[r] + lambda);
            }
        }
    }
}

inline void acbmf_sweep(ApproxCavityState& st, const ObservedMatrix& obs,
                        int inner_iterations = 1) {
    acbmf_half_sweep_u(st, obs, inner_iterations);
    acbmf_half_sweep_v(st, obs, inner_iterations);
}

inline SolveResult acbmf_solve(const ObservedMatrix& obs, index_t rank, const SolverConfig& cfg,
                               const std::vector<Entry>* holdout = nullptr) {
    cfg.validate();
    ApproxCavityState st = acbmf_init(obs, rank, cfg.lambda, cfg.seed);
    auto res = run_sweeps("acbmf", obs, cfg, st.factors, holdout,
                          [&st, &obs, &cfg](FactorPair& f, int) {
                              acbmf_sweep(st, obs, cfg.inner_iterations);
                              f = st.factors;
                          });
    return res;
}

/// Maximum deviation of the given factors from the ALS normal equations:
/// for each row of U the closed-form solve from the current V (and vice
/// versa), reported as the largest infinity-norm difference. A small value
/// certifies an ALS-stationary point.
inline double verify_stationarity(const FactorPair& f, const ObservedMatrix& obs, double lambda) {
    const index_t rank = f.rank();
    std::vector<double> best(rank);
    double worst = 0.0;
    for (index_t mu = 0; mu < obs.n_rows(); ++mu) {
        als_row_update(best, rank, obs.row_neighbors(mu), obs.entries(), f.v_data(), lambda);
        auto u = f.u_row(mu);
        for (index_t r = 0; r < rank; ++r) worst = std::max(worst, std::abs(u[r] - best[r]));
    }
    for (index_t i = 0; i < obs.n_cols(); ++i) {
        als_row_update(best, rank, obs.col_neighbors(i), obs.entries(), f.u_data(), lambda);
        auto v = f.v_row(i);
        for (index_t r = 0; r < rank; ++r) worst = std::max(worst, std::abs(v[r] - best[r]));
    }
    return worst;
}

} // namespace cmf
