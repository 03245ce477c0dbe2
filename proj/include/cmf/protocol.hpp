#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "cmf/datagen.hpp"
#include "cmf/ingest.hpp"
#include "cmf/metrics.hpp"
#include "cmf/parallel.hpp"
#include "cmf/solve.hpp"
#include "cmf/trace.hpp"

namespace cmf {

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0,
                              std::uint64_t d = 0) {
    std::uint64_t x = a;
    for (std::uint64_t y : {b, c, d}) {
        x ^= y + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
    }
    return x;
}

/// One aggregate row: per observation density c (synthetic protocol) or per
/// fold (MovieLens protocol).
struct ProtocolRow {
    std::string solver;
    double key = 0.0;          // c value or fold index
    double rate = 0.0;         // reconstruction rate (synthetic only)
    double mean_min_rrmse = std::numeric_limits<double>::quiet_NaN();
    double mean_rmse = std::numeric_limits<double>::quiet_NaN();
    int samples = 0;
};

struct ProtocolResult {
    std::vector<ProtocolRow> rows;
    std::vector<TraceRecord> traces; // concatenated per-run traces
};

inline void write_protocol_csv(const ProtocolResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("write_protocol_csv: cannot open " + path);
    out.precision(12);
    out << "solver,key,rate,mean_min_rrmse,mean_rmse,samples\n";
    for (const ProtocolRow& r : res.rows)
        out << r.solver << ',' << r.key << ',' << r.rate << ',' << r.mean_min_rrmse << ','
            << r.mean_rmse << ',' << r.samples << '\n';
}

struct ReconstructionSetting {
    std::vector<double> c_values;
    int samples = 10;
    int restarts = 5;
    double success_threshold = 0.15;
    index_t n_rows = 500;
    index_t n_cols = 1000;
    index_t rank = 10;
    double noise_var = 0.09;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Synthetic reconstruction-rate protocol: per c generate `samples`
/// instances, per instance run `restarts` seeded initializations of the
/// solver, count a success when the best restart reaches
/// rRMSE <= success_threshold. Solver divergence counts as a failed restart.
inline ProtocolResult reconstruction_protocol(const ReconstructionSetting& set,
                                              const std::string& solver,
                                              const SolverConfig& base_cfg) {
    if (set.samples < 1 || set.restarts < 1)
        throw std::invalid_argument("reconstruction_protocol: counts must be >= 1");
    ProtocolResult result;
    for (std::size_t ci = 0; ci < set.c_values.size(); ++ci) {
        const double c = set.c_values[ci];
        // seed by the value of c, not its position, so results per c do not
        // depend on which other densities are in the sweep
        const std::uint64_t c_bits = std::bit_cast<std::uint64_t>(c);
        std::vector<double> min_rrmse(set.samples,
                                      std::numeric_limits<double>::infinity());
        parallel_for(static_cast<std::size_t>(set.samples), set.threads, [&](std::size_t s) {
            SyntheticConfig gen_cfg;
            gen_cfg.n_rows = set.n_rows;
            gen_cfg.n_cols = set.n_cols;
            gen_cfg.rank = set.rank;
            gen_cfg.c = c;
            gen_cfg.noise_var = set.noise_var;
            gen_cfg.seed = mix_seed(set.seed, c_bits, s, 0xdadULL);
            const SyntheticInstance inst = generate(gen_cfg);
            double best = std::numeric_limits<double>::infinity();
            for (int t = 0; t < set.restarts; ++t) {
                SolverConfig cfg = base_cfg;
                cfg.seed = mix_seed(set.seed, c_bits, s, static_cast<std::uint64_t>(t) + 1);
                try {
                    const SolveResult run = solve(solver, inst.observed, set.rank, cfg);
                    best = std::min(best, rrmse(run.factors, inst));
                } catch (const solver_error&) {
                    // failed restart
                }
            }
            min_rrmse[s] = best;
        });
        ProtocolRow row;
        row.solver = solver;
        row.key = c;
        row.samples = set.samples;
        int successes = 0;
        double sum = 0.0;
        for (double v : min_rrmse) {
            if (v <= set.success_threshold) ++successes;
            sum += v;
        }
        row.rate = static_cast<double>(successes) / static_cast<double>(set.samples);
        row.mean_min_rrmse = sum / static_cast<double>(set.samples);
        result.rows.push_back(row);
    }
    return result;
}

struct MovielensSetting {
    int folds = 10;
    index_t rank = 10;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// 10-group holdout protocol: per fold, train on the other k-1 folds and
/// measure test RMSE on the held-out group. Ratings are centered by the
/// training-fold mean (predictions implicitly add it back, so reported RMSE
/// is against the raw ratings); without centering the cavity solvers diverge
/// on rating-scale data from a cold start. Rows and columns seen only in the
/// test fold keep their default (zero) factors and still count toward RMSE.
inline ProtocolResult movielens_protocol(const std::vector<RatingRecord>& records,
                                         const MovielensSetting& set, const std::string& solver,
                                         const SolverConfig& base_cfg) {
    IndexMap map = build_index_map(records);
    std::vector<Entry> all = to_entries(records, map);
    const index_t n = map.n_rows();
    const index_t m = map.n_cols();
    const auto folds = kfold_split(all.size(), set.folds, set.seed);

    std::vector<ProtocolRow> rows(folds.size());
    std::vector<std::vector<TraceRecord>> traces(folds.size());
    parallel_for(folds.size(), set.threads, [&](std::size_t k) {
        std::vector<char> in_test(all.size(), 0);
        for (std::size_t idx : folds[k]) in_test[idx] = 1;
        std::vector<Entry> train, test;
        for (std::size_t idx = 0; idx < all.size(); ++idx)
            (in_test[idx] ? test : train).push_back(all[idx]);
        double mean = 0.0;
        for (const Entry& e : train) mean += e.value;
        if (!train.empty()) mean /= static_cast<double>(train.size());
        for (Entry& e : train) e.value -= mean;
        for (Entry& e : test) e.value -= mean;
        const ObservedMatrix obs(n, m, std::move(train));
        SolverConfig cfg = base_cfg;
        cfg.seed = mix_seed(set.seed, k, 0x5eedULL);
        const SolveResult run = solve(solver, obs, set.rank, cfg, &test);
        ProtocolRow row;
        row.solver = solver;
        row.key = static_cast<double>(k);
        row.mean_rmse = rmse(run.factors, test);
        row.samples = 1;
        rows[k] = row;
        traces[k] = run.trace;
    });

    ProtocolResult result;
    double sum = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        sum += rows[k].mean_rmse;
        result.rows.push_back(rows[k]);
        result.traces.insert(result.traces.end(), traces[k].begin(), traces[k].end());
    }
    ProtocolRow agg;
    agg.solver = solver;
    agg.key = -1.0; // aggregate row
    agg.mean_rmse = sum / static_cast<double>(rows.size());
    agg.samples = static_cast<int>(rows.size());
    result.rows.push_back(agg);
    return result;
}

} // namespace cmf
