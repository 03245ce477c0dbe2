#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "cmf/errors.hpp"

namespace cmf {

/// One per-sweep (or per-epoch, for SGD) convergence record.
struct TraceRecord {
    std::string algorithm;
    int iteration = 0;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double train_rmse = std::numeric_limits<double>::quiet_NaN();
    double test_metric = std::numeric_limits<double>::quiet_NaN(); // test RMSE or rRMSE
    double seconds = 0.0;
};

inline void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("write_trace_csv: cannot open " + path);
    out.precision(12);
    out << "algorithm,iteration,objective,train_rmse,test_metric,seconds\n";
    for (const TraceRecord& t : trace) {
        out << t.algorithm << ',' << t.iteration << ',' << t.objective << ','
            << t.train_rmse << ',';
        if (std::isnan(t.test_metric)) out << "";
        else out << t.test_metric;
        out << ',' << t.seconds << '\n';
    }
}

} // namespace cmf
