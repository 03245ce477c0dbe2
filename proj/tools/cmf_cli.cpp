// Command-line front end: synthetic instance generation, solver training,
// and the two benchmark protocols. See README for the flag grammar.

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "cmf/datagen.hpp"
#include "cmf/factors.hpp"
#include "cmf/ingest.hpp"
#include "cmf/protocol.hpp"
#include "cmf/solve.hpp"
#include "cmf/trace.hpp"

namespace {

struct TrainFlags {
    std::string solver = "acbmf";
    std::string input;
    std::string format = "auto"; // auto, double_colon, comma_header, triples
    std::string factors_out;
    std::string trace_out;
    cmf::index_t n = 0, m = 0; // 0: infer from data
    cmf::index_t rank = 10;
    cmf::SolverConfig cfg;
    double eta0 = 0.05, decay = 0.1;
    std::string sgd_rule = "inverse_time";
};

cmf::ObservedMatrix load_input(const TrainFlags& f) {
    std::string fmt = f.format;
    if (fmt == "auto") {
        std::ifstream in(f.input);
        if (!in) throw cmf::io_error("cannot open " + f.input);
        std::string line;
        std::getline(in, line);
        if (line.find("::") != std::string::npos) fmt = "double_colon";
        else if (line.find("userId") != std::string::npos) fmt = "comma_header";
        else fmt = "triples";
    }
    if (fmt == "triples") {
        std::ifstream in(f.input);
        if (!in) throw cmf::io_error("cannot open " + f.input);
        std::vector<cmf::Entry> entries;
        cmf::Entry e;
        cmf::index_t max_r = -1, max_c = -1;
        while (in >> e.row >> e.col >> e.value) {
            max_r = std::max(max_r, e.row);
            max_c = std::max(max_c, e.col);
            entries.push_back(e);
        }
        const cmf::index_t n = f.n > 0 ? f.n : max_r + 1;
        const cmf::index_t m = f.m > 0 ? f.m : max_c + 1;
        return cmf::ObservedMatrix(n, m, std::move(entries));
    }
    const auto format = fmt == "double_colon" ? cmf::RatingsFormat::double_colon
                                              : cmf::RatingsFormat::comma_header;
    auto records = cmf::parse_ratings(f.input, format);
    auto map = cmf::build_index_map(records);
    auto entries = cmf::to_entries(records, map);
    return cmf::ObservedMatrix(map.n_rows(), map.n_cols(), std::move(entries));
}

void add_solver_flags(CLI::App* cmd, TrainFlags& f) {
    cmd->add_option("--solver", f.solver, "Solver tag: als, sgd, cbmf, acbmf")
        ->check(CLI::IsMember(cmf::solver_tags()));
    cmd->add_option("--rank", f.rank, "Factorization rank R")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", f.cfg.lambda, "Regularization strength")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-sweeps", f.cfg.max_sweeps, "Sweep/epoch limit")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", f.cfg.convergence_tol,
                    "Relative factor-change stopping threshold (0 disables)");
    cmd->add_option("--seed", f.cfg.seed, "RNG seed");
    cmd->add_option("--inner-iterations", f.cfg.inner_iterations,
                    "(A)CBMF half-sweep repeats per sweep")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--eta0", f.eta0, "SGD initial learning rate");
    cmd->add_option("--decay", f.decay, "SGD inverse-time decay");
    cmd->add_option("--sgd-rule", f.sgd_rule, "SGD schedule: constant or inverse_time")
        ->check(CLI::IsMember({"constant", "inverse_time"}));
}

cmf::SolverConfig finalize_config(const TrainFlags& f) {
    cmf::SolverConfig cfg = f.cfg;
    cmf::SgdSchedule sched;
    sched.eta0 = f.eta0;
    sched.decay = f.decay;
    sched.rule = f.sgd_rule == "constant" ? cmf::SgdRule::constant : cmf::SgdRule::inverse_time;
    cfg.sgd = sched;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse low-rank matrix completion: ALS, SGD, CBMF, ACBMF"};
    app.set_config("--config", "", "Optional key=value file; command-line flags win");
    app.require_subcommand(1);

    // generate
    cmf::SyntheticConfig gen_cfg;
    std::string gen_out = "instance";
    auto* gen = app.add_subcommand("generate", "Write a synthetic low-rank instance");
    gen->add_option("--n", gen_cfg.n_rows, "Rows (users)")->check(CLI::PositiveNumber);
    gen->add_option("--m", gen_cfg.n_cols, "Columns (items)")->check(CLI::PositiveNumber);
    gen->add_option("--rank", gen_cfg.rank, "Ground-truth rank")->check(CLI::PositiveNumber);
    gen->add_option("--c", gen_cfg.c, "Mean observations per column");
    gen->add_option("--noise-var", gen_cfg.noise_var, "Additive noise variance")
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", gen_cfg.seed, "RNG seed");
    gen->add_option("--out", gen_out, "Output prefix (<out>.obs, <out>.truth)");

    // train
    TrainFlags train_flags;
    auto* train = app.add_subcommand("train", "Train one solver on a ratings/triples file");
    train->add_option("--input", train_flags.input, "Input file")->required();
    train->add_option("--format", train_flags.format,
                      "auto, double_colon, comma_header, or triples")
        ->check(CLI::IsMember({"auto", "double_colon", "comma_header", "triples"}));
    train->add_option("--n", train_flags.n, "Row count for triples input (default: inferred)");
    train->add_option("--m", train_flags.m, "Column count for triples input (default: inferred)");
    train->add_option("--factors-out", train_flags.factors_out, "Trained factor file");
    train->add_option("--trace-out", train_flags.trace_out, "Per-sweep trace CSV");
    add_solver_flags(train, train_flags);

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Run an experiment protocol");
    bench->require_subcommand(1);

    TrainFlags syn_flags;
    cmf::ReconstructionSetting recon;
    std::string c_list = "10,20,30,40,60";
    std::string bench_out = "protocol.csv";
    auto* syn = bench->add_subcommand("synthetic", "Reconstruction-rate sweep over c");
    syn->add_option("--c-list", c_list, "Comma-separated c values");
    syn->add_option("--samples", recon.samples, "Instances per c")->check(CLI::PositiveNumber);
    syn->add_option("--restarts", recon.restarts, "Random initializations per instance")
        ->check(CLI::PositiveNumber);
    syn->add_option("--n", recon.n_rows, "Rows")->check(CLI::PositiveNumber);
    syn->add_option("--m", recon.n_cols, "Columns")->check(CLI::PositiveNumber);
    syn->add_option("--noise-var", recon.noise_var, "Noise variance")
        ->check(CLI::NonNegativeNumber);
    syn->add_option("--threads", recon.threads, "Worker threads")->check(CLI::PositiveNumber);
    syn->add_option("--out", bench_out, "Aggregate CSV path");
    add_solver_flags(syn, syn_flags);

    TrainFlags ml_flags;
    cmf::MovielensSetting ml;
    std::string ml_out = "movielens.csv";
    std::string ml_trace_out;
    auto* mlc = bench->add_subcommand("movielens", "K-fold rating-prediction protocol");
    mlc->add_option("--input", ml_flags.input, "Ratings file")->required();
    mlc->add_option("--format", ml_flags.format, "auto, double_colon, or comma_header")
        ->check(CLI::IsMember({"auto", "double_colon", "comma_header"}));
    mlc->add_option("--folds", ml.folds, "Number of folds")->check(CLI::PositiveNumber);
    mlc->add_option("--threads", ml.threads, "Worker threads")->check(CLI::PositiveNumber);
    mlc->add_option("--out", ml_out, "Per-fold CSV path");
    mlc->add_option("--trace-out", ml_trace_out, "Concatenated trace CSV path");
    add_solver_flags(mlc, ml_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const auto inst = cmf::generate(gen_cfg);
            if (inst.identifiability_warning)
                std::cerr << "warning: expected |Omega| below R(N+M); "
                             "instance may be unidentifiable\n";
            cmf::save_triples(inst.observed, gen_out + ".obs");
            cmf::save_factors(inst.truth, gen_out + ".truth");
            std::cout << "wrote " << gen_out << ".obs with |Omega| = " << inst.observed.nnz()
                      << " (" << gen_cfg.n_rows << " x " << gen_cfg.n_cols << ")\n";
        } else if (*train) {
            const auto obs = load_input(train_flags);
            const auto cfg = finalize_config(train_flags);
            const auto res = cmf::solve(train_flags.solver, obs, train_flags.rank, cfg);
            std::cout << train_flags.solver << ": " << res.sweeps << " sweeps, objective "
                      << res.trace.back().objective << ", train RMSE "
                      << res.trace.back().train_rmse
                      << (res.converged ? " (converged)" : " (sweep limit)") << '\n';
            if (!train_flags.factors_out.empty())
                cmf::save_factors(res.factors, train_flags.factors_out);
            if (!train_flags.trace_out.empty()) cmf::write_trace_csv(res.trace, train_flags.trace_out);
        } else if (*syn) {
            recon.rank = syn_flags.rank;
            recon.seed = syn_flags.cfg.seed;
            recon.c_values.clear();
            for (const auto& tok : cmf::detail::split(c_list, ","))
                recon.c_values.push_back(std::stod(tok));
            const auto res =
                cmf::reconstruction_protocol(recon, syn_flags.solver, finalize_config(syn_flags));
            cmf::write_protocol_csv(res, bench_out);
            for (const auto& row : res.rows)
                std::cout << row.solver << " c=" << row.key << " rate=" << row.rate
                          << " mean_min_rrmse=" << row.mean_min_rrmse << '\n';
        } else if (*mlc) {
            cmf::RatingsFormat format;
            if (ml_flags.format == "double_colon") format = cmf::RatingsFormat::double_colon;
            else if (ml_flags.format == "comma_header") format = cmf::RatingsFormat::comma_header;
            else format = cmf::detect_format(ml_flags.input);
            const auto records = cmf::parse_ratings(ml_flags.input, format);
            ml.rank = ml_flags.rank;
            ml.seed = ml_flags.cfg.seed;
            const auto res =
                cmf::movielens_protocol(records, ml, ml_flags.solver, finalize_config(ml_flags));
            cmf::write_protocol_csv(res, ml_out);
            if (!ml_trace_out.empty()) cmf::write_trace_csv(res.traces, ml_trace_out);
            std::cout << ml_flags.solver << " mean test RMSE = " << res.rows.back().mean_rmse
                      << " over " << ml.folds << " folds\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
