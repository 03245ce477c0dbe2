#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <span>

#include "cmf/solve_loop.hpp"

namespace cmf {

/// One stochastic gradient step on a single observed entry. The residual is
/// computed once from the incoming vectors and both factors are updated
/// simultaneously (gradient of 1/2 e^2 + lambda/2 (|u|^2 + |v|^2)).
inline void sgd_step(std::span<double> u, std::span<double> v, double y, double eta, double lambda) {
    const std::size_t rank = u.size();
    double e = y;
    for (std::size_t r = 0; r < rank; ++r) e -= u[r] * v[r];
    for (std::size_t r = 0; r < rank; ++r) {
        const double du = lambda * u[r] - e * v[r];
        const double dv = lambda * v[r] - e * u[r];
        u[r] -= eta * du;
        v[r] -= eta * dv;
    }
}

struct SgdState {
    FactorPair factors;
    int epoch = 0;
    std::mt19937_64 gen;
};

/// One shuffled pass over all observed entries at a fixed learning rate.
inline void sgd_epoch(SgdState& state, const ObservedMatrix& obs, double eta, double lambda) {
    std::vector<index_t> order(obs.nnz());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), state.gen);
    for (index_t id : order) {
        const Entry& e = obs.entry(id);
        sgd_step(state.factors.u_row(e.row), state.factors.v_row(e.col), e.value, eta, lambda);
    }
    if (!state.factors.all_finite())
        throw solver_error("sgd_epoch: divergence at epoch " + std::to_string(state.epoch));
    ++state.epoch;
}

inline SolveResult sgd_solve(const ObservedMatrix& obs, const SolverConfig& cfg,
                             FactorPair init, const std::vector<Entry>* holdout = nullptr) {
    const SgdSchedule schedule = cfg.sgd.value_or(SgdSchedule{});
    schedule.validate();
    SgdState state{std::move(init), 0, std::mt19937_64(cfg.seed ^ 0x9e3779b97f4a7c15ULL)};
    auto res = run_sweeps("sgd", obs, cfg, state.factors, holdout,
                          [&](FactorPair& f, int epoch) {
                              state.factors = std::move(f);
                              sgd_epoch(state, obs, schedule.rate(epoch), cfg.lambda);
                              f = std::move(state.factors);
                          });
    return res;
}

} // namespace cmf
