#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cmf/solve_loop.hpp"

namespace cmf {

/// Edge-indexed cavity messages: one (precision, linear-term) pair per
/// observed entry and rank component, on both the U and V sides, plus node
/// aggregates and per-observation sums. Edge slot layout is entry_id * R + r.
/// Edge estimates u_{mu r -> (mu i)} = b_edge / (a_edge + lambda) are derived
/// on the fly rather than stored.
struct CavityState {
    // per-edge messages (4 * |Omega| * R slots)
    std::vector<double> a_edge, b_edge, c_edge, d_edge;
    // per-node aggregates
    std::vector<double> a_node, b_node; // N x R
    std::vector<double> c_node, d_node; // M x R
    // per-observation aggregates
    std::vector<double> chi, delta, eta_obs, theta;
    FactorPair factors;
    double lambda = 0.0;

    CavityState(index_t n_rows, index_t n_cols, index_t rank, index_t nnz, double lam)
        : a_edge(static_cast<std::size_t>(nnz) * rank, 0.0),
          b_edge(static_cast<std::size_t>(nnz) * rank, 0.0),
          c_edge(static_cast<std::size_t>(nnz) * rank, 0.0),
          d_edge(static_cast<std::size_t>(nnz) * rank, 0.0),
          a_node(static_cast<std::size_t>(n_rows) * rank, 0.0),
          b_node(static_cast<std::size_t>(n_rows) * rank, 0.0),
          c_node(static_cast<std::size_t>(n_cols) * rank, 0.0),
          d_node(static_cast<std::size_t>(n_cols) * rank, 0.0),
          chi(nnz, 0.0), delta(nnz, 0.0), eta_obs(nnz, 0.0), theta(nnz, 0.0),
          factors(n_rows, n_cols, rank), lambda(lam) {}

    std::size_t message_slot_count() const {
        return a_edge.size() + b_edge.size() + c_edge.size() + d_edge.size();
    }
};

namespace detail {
inline void check_message(double x, const char* name, index_t entry) {
    if (!std::isfinite(x) || std::abs(x) > 1e12)
        throw solver_error(std::string("cbmf: message ") + name + " diverged at entry " +
                           std::to_string(entry));
}
} // namespace detail

/// Zero messages, V drawn from init_factors, observation aggregates filled by
/// one pass over the entries.
inline CavityState cbmf_init(const ObservedMatrix& obs, index_t rank, double lambda,
                             std::uint64_t seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("cbmf_init: lambda must be positive");
    CavityState st(obs.n_rows(), obs.n_cols(), rank, obs.nnz(), lambda);
    FactorPair v_init = init_factors(obs.n_rows(), obs.n_cols(), rank, seed);
    st.factors.v_data() = v_init.v_data(); // U stays zero: b_node = 0
    for (index_t id = 0; id < obs.nnz(); ++id) {
        const Entry& e = obs.entry(id);
        auto v = st.factors.v_row(e.col);
        auto u = st.factors.u_row(e.row);
        double chi = 0.0, delta = 0.0, eta = 0.0, theta = 0.0;
        for (index_t r = 0; r < rank; ++r) {
            chi += v[r] * v[r] / lambda; // a_edge = 0
            eta += u[r] * u[r] / lambda; // c_edge = 0
            // u_edge = v_edge = 0, so delta and theta stay zero
        }
        st.chi[id] = chi;
        st.delta[id] = delta;
        st.eta_obs[id] = eta;
        st.theta[id] = theta;
    }
    return st;
}

/// U-side half sweep (cavity bias/objective updates with V fixed).
/// Stage order per observation: fresh chi/delta, then a_hat/b_hat, then node
/// sums, then edge messages, then the edge and node estimates of U.
inline void cbmf_half_sweep_u(CavityState& st, const ObservedMatrix& obs) {
    const index_t rank = st.factors.rank();
    const double lambda = st.lambda;
    std::vector<double> ahat, bhat; // scratch for one row's edges
    for (index_t mu = 0; mu < obs.n_rows(); ++mu) {
        auto nbs = obs.row_neighbors(mu);
        ahat.assign(nbs.size() * rank, 0.0);
        bhat.assign(nbs.size() * rank, 0.0);
        // cavity bias coefficients per edge
        for (std::size_t k = 0; k < nbs.size(); ++k) {
            const index_t id = nbs[k].entry;
            const Entry& e = obs.entry(id);
            auto v = st.factors.v_row(e.col);
            const double* ae = st.a_edge.data() + static_cast<std::size_t>(id) * rank;
            const double* be = st.b_edge.data() + static_cast<std::size_t>(id) * rank;
            double chi = 0.0, delta = 0.0;
            for (index_t r = 0; r < rank; ++r) {
                const double prec = ae[r] + lambda;
                chi += v[r] * v[r] / prec;
                delta += (be[r] / prec) * v[r];
            }
            st.chi[id] = chi;
            st.delta[id] = delta;
            for (index_t r = 0; r < rank; ++r) {
                const double prec = ae[r] + lambda;
                const double u_edge = be[r] / prec;
                const double denom = 1.0 + chi - v[r] * v[r] / prec; // >= 1
                ahat[k * rank + r] = v[r] * v[r] / denom;
                bhat[k * rank + r] = (e.value - delta + u_edge * v[r]) * v[r] / denom;
                detail::check_message(bhat[k * rank + r], "b_hat", id);
            }
        }
        // node aggregates
        double* an = st.a_node.data() + static_cast<std::size_t>(mu) * rank;
        double* bn = st.b_node.data() + static_cast<std::size_t>(mu) * rank;
        for (index_t r = 0; r < rank; ++r) {
            double sa = 0.0, sb = 0.0;
            for (std::size_t k = 0; k < nbs.size(); ++k) {
                sa += ahat[k * rank + r];
                sb += bhat[k * rank + r];
            }
            an[r] = sa;
            bn[r] = sb;
        }
        // edge messages and estimates
        for (std::size_t k = 0; k < nbs.size(); ++k) {
            const index_t id = nbs[k].entry;
            double* ae = st.a_edge.data() + static_cast<std::size_t>(id) * rank;
            double* be = st.b_edge.data() + static_cast<std::size_t>(id) * rank;
            for (index_t r = 0; r < rank; ++r) {
                ae[r] = an[r] - ahat[k * rank + r];
                be[r] = bn[r] - bhat[k * rank + r];
                detail::check_message(be[r], "b_edge", id);
            }
        }
        auto u = st.factors.u_row(mu);
        for (index_t r = 0; r < rank; ++r) {
            const double prec = an[r] + lambda;
            u[r] = prec > 0.0 ? bn[r] / prec : 0.0;
        }
    }
}

/// V-side half sweep; mirror of the U side using the fresh U estimates.
inline void cbmf_half_sweep_v(CavityState& st, const ObservedMatrix& obs) {
    const index_t rank = st.factors.rank();
    const double lambda = st.lambda;
    std::vector<double> chat, dhat;
    for (index_t i = 0; i < obs.n_cols(); ++i) {
        auto nbs = obs.col_neighbors(i);
        chat.assign(nbs.size() * rank, 0.0);
        dhat.assign(nbs.size() * rank, 0.0);
        for (std::size_t k = 0; k < nbs.size(); ++k) {
            const index_t id = nbs[k].entry;
            const Entry& e = obs.entry(id);
            auto u = st.factors.u_row(e.row);
            const double* ce = st.c_edge.data() + static_cast<std::size_t>(id) * rank;
            const double* de = st.d_edge.data() + static_cast<std::size_t>(id) * rank;
            double eta = 0.0, theta = 0.0;
            for (index_t r = 0; r < rank; ++r) {
                const double prec = ce[r] + lambda;
                eta += u[r] * u[r] / prec;
                theta += (de[r] / prec) * u[r];
            }
            st.eta_obs[id] = eta;
            st.theta[id] = theta;
            for (index_t r = 0; r < rank; ++r) {
                const double prec = ce[r] + lambda;
                const double v_edge = de[r] / prec;
                const double denom = 1.0 + eta - u[r] * u[r] / prec;
                chat[k * rank + r] = u[r] * u[r] / denom;
                dhat[k * rank + r] = (e.value - theta + v_edge * u[r]) * u[r] / denom;
                detail::check_message(dhat[k * rank + r], "d_hat", id);
            }
        }
        double* cn = st.c_node.data() + static_cast<std::size_t>(i) * rank;
        double* dn = st.d_node.data() + static_cast<std::size_t>(i) * rank;
        for (index_t r = 0; r < rank; ++r) {
            double sc = 0.0, sd = 0.0;
            for (std::size_t k = 0; k < nbs.size(); ++k) {
                sc += chat[k * rank + r];
                sd += dhat[k * rank + r];
            }
            cn[r] = sc;
            dn[r] = sd;
        }
        for (std::size_t k = 0; k < nbs.size(); ++k) {
            const index_t id = nbs[k].entry;
            double* ce = st.c_edge.data() + static_cast<std::size_t>(id) * rank;
            double* de = st.d_edge.data() + static_cast<std::size_t>(id) * rank;
            for (index_t r = 0; r < rank; ++r) {
                ce[r] = cn[r] - chat[k * rank + r];
                de[r] = dn[r] - dhat[k * rank + r];
                detail::check_message(de[r], "d_edge", id);
            }
        }
        auto v = st.factors.v_row(i);
        for (index_t r = 0; r < rank; ++r) {
            const double prec = cn[r] + lambda;
            v[r] = prec > 0.0 ? dn[r] / prec : 0.0;
        }
    }
}

inline void cbmf_sweep(CavityState& st, const ObservedMatrix& obs, int inner_iterations = 1) {
    for (int k = 0; k < inner_iterations; ++k) cbmf_half_sweep_u(st, obs);
    for (int k = 0; k < inner_iterations; ++k) cbmf_half_sweep_v(st, obs);
}

inline SolveResult cbmf_solve(const ObservedMatrix& obs, index_t rank, const SolverConfig& cfg,
                              const std::vector<Entry>* holdout = nullptr) {
    cfg.validate();
    CavityState st = cbmf_init(obs, rank, cfg.lambda, cfg.seed);
    auto res = run_sweeps("cbmf", obs, cfg, st.factors, holdout,
                          [&st, &obs, &cfg](FactorPair& f, int) {
                              cbmf_sweep(st, obs, cfg.inner_iterations);
                              f = st.factors;
                          });
    return res;
}

/// (Gamma + v v^T)^-1 for positive diagonal Gamma via the rank-one update
/// formula. Used by the derivation oracle and tests only.
inline Eigen::MatrixXd sherman_morrison_inverse(const Eigen::VectorXd& diag,
                                                const Eigen::VectorXd& rank1) {
    if (diag.size() != rank1.size())
        throw std::invalid_argument("sherman_morrison_inverse: size mismatch");
    if ((diag.array() <= 0.0).any())
        throw std::invalid_argument("sherman_morrison_inverse: diagonal must be positive");
    const Eigen::VectorXd ginv = diag.cwiseInverse();
    const Eigen::VectorXd gv = ginv.cwiseProduct(rank1);
    const double denom = 1.0 + rank1.dot(gv);
    Eigen::MatrixXd inv = ginv.asDiagonal();
    inv.noalias() -= gv * gv.transpose() / denom;
    return inv;
}

} // namespace cmf
