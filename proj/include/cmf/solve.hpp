#pragma once

#include <string>

#include "cmf/acbmf.hpp"
#include "cmf/als.hpp"
#include "cmf/cbmf.hpp"
#include "cmf/sgd.hpp"

namespace cmf {

inline const std::vector<std::string>& solver_tags() {
    static const std::vector<std::string> tags = {"als", "sgd", "cbmf", "acbmf"};
    return tags;
}

/// Runs the solver named by `tag` from a seeded Gaussian initialization.
inline SolveResult solve(const std::string& tag, const ObservedMatrix& obs, index_t rank,
                         const SolverConfig& cfg, const std::vector<Entry>* holdout = nullptr) {
    if (tag == "als")
        return als_solve(obs, cfg, init_factors(obs.n_rows(), obs.n_cols(), rank, cfg.seed),
                         holdout);
    if (tag == "sgd")
        return sgd_solve(obs, cfg, init_factors(obs.n_rows(), obs.n_cols(), rank, cfg.seed),
                         holdout);
    if (tag == "cbmf") return cbmf_solve(obs, rank, cfg, holdout);
    if (tag == "acbmf") return acbmf_solve(obs, rank, cfg, holdout);
    std::string valid;
    for (const auto& t : solver_tags()) valid += (valid.empty() ? "" : ", ") + t;
    throw std::invalid_argument("unknown solver '" + tag + "' (valid: " + valid + ")");
}

} // namespace cmf
