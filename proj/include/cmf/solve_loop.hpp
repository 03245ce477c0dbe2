#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "cmf/config.hpp"
#include "cmf/errors.hpp"
#include "cmf/factors.hpp"
#include "cmf/metrics.hpp"
#include "cmf/observed_matrix.hpp"
#include "cmf/trace.hpp"

namespace cmf {

struct SolveResult {
    FactorPair factors;
    std::vector<TraceRecord> trace;
    int sweeps = 0;
    bool converged = false;
};

/// Relative Frobenius change between two factor snapshots.
inline double relative_factor_change(const FactorPair& prev, const FactorPair& cur) {
    double num = 0.0, den = 0.0;
    const auto& pu = prev.u_data();
    const auto& cu = cur.u_data();
    for (std::size_t k = 0; k < pu.size(); ++k) {
        const double d = cu[k] - pu[k];
        num += d * d;
        den += pu[k] * pu[k];
    }
    const auto& pv = prev.v_data();
    const auto& cv = cur.v_data();
    for (std::size_t k = 0; k < pv.size(); ++k) {
        const double d = cv[k] - pv[k];
        num += d * d;
        den += pv[k] * pv[k];
    }
    return std::sqrt(num) / (std::sqrt(den) + 1e-300);
}

/// Shared sweep loop: runs `sweep(factors, t)` until max_sweeps or the
/// relative factor change drops below convergence_tol, recording one
/// TraceRecord per sweep. Non-finite factors abort with solver_error.
template <class Sweep>
SolveResult run_sweeps(const std::string& tag, const ObservedMatrix& obs, const SolverConfig& cfg,
                       FactorPair factors, const std::vector<Entry>* holdout, Sweep&& sweep) {
    cfg.validate();
    SolveResult res{std::move(factors), {}, 0, false};
    const auto t0 = std::chrono::steady_clock::now();
    FactorPair prev = res.factors;
    for (int t = 0; t < cfg.max_sweeps; ++t) {
        sweep(res.factors, t);
        if (!res.factors.all_finite())
            throw solver_error(tag + ": non-finite factors at sweep " + std::to_string(t));
        res.sweeps = t + 1;
        TraceRecord rec;
        rec.algorithm = tag;
        rec.iteration = t + 1;
        rec.objective = objective(res.factors, obs, cfg.lambda);
        rec.train_rmse = obs.nnz() > 0 ? train_rmse(res.factors, obs)
                                       : std::numeric_limits<double>::quiet_NaN();
        if (holdout && !holdout->empty()) rec.test_metric = rmse(res.factors, *holdout);
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.trace.push_back(rec);
        const double change = relative_factor_change(prev, res.factors);
        if (cfg.convergence_tol > 0.0 && change < cfg.convergence_tol) {
            res.converged = true;
            break;
        }
        prev = res.factors;
    }
    return res;
}

} // namespace cmf
