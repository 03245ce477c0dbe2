#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cmf/factors.hpp"
#include "cmf/observed_matrix.hpp"

namespace cmf {

inline double rmse(const FactorPair& f, const std::vector<Entry>& holdout) {
    if (holdout.empty()) throw std::invalid_argument("rmse: empty holdout");
    double s = 0.0;
    for (const Entry& e : holdout) {
        const double d = e.value - predict(f, e.row, e.col);
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(holdout.size()));
}

inline double train_rmse(const FactorPair& f, const ObservedMatrix& obs) {
    if (obs.nnz() == 0) throw std::invalid_argument("train_rmse: no observations");
    double s = 0.0;
    for (const Entry& e : obs.entries()) {
        const double d = e.value - predict(f, e.row, e.col);
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(obs.nnz()));
}

} // namespace cmf
