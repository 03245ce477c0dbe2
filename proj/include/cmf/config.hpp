#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace cmf {

enum class SgdRule { constant, inverse_time };

/// Learning-rate schedule for SGD. inverse_time gives
/// eta_t = eta0 / (1 + decay * t) at epoch t.
struct SgdSchedule {
    double eta0 = 0.05;
    double decay = 0.1;
    SgdRule rule = SgdRule::inverse_time;

    double rate(std::int64_t epoch) const {
        switch (rule) {
            case SgdRule::constant: return eta0;
            case SgdRule::inverse_time: return eta0 / (1.0 + decay * static_cast<double>(epoch));
        }
        return eta0;
    }

    void validate() const {
        if (!(eta0 > 0.0)) throw std::invalid_argument("SgdSchedule: eta0 must be positive");
        if (decay < 0.0) throw std::invalid_argument("SgdSchedule: decay must be nonnegative");
    }
};

struct SolverConfig {
    double lambda = 0.01;
    int max_sweeps = 200;
    double convergence_tol = 1e-6; // relative factor change threshold, 0 disables
    std::uint64_t seed = 0;
    int inner_iterations = 1; // (A)CBMF half-sweep repeats
    std::optional<SgdSchedule> sgd;

    void validate() const {
        if (lambda < 0.0) throw std::invalid_argument("SolverConfig: lambda must be nonnegative");
        if (max_sweeps < 1) throw std::invalid_argument("SolverConfig: max_sweeps must be >= 1");
        if (convergence_tol < 0.0) throw std::invalid_argument("SolverConfig: convergence_tol must be nonnegative");
        if (inner_iterations < 1) throw std::invalid_argument("SolverConfig: inner_iterations must be >= 1");
        if (sgd) sgd->validate();
    }
};

} // namespace cmf
