// Command-line front end: `bench run`, `bench anova`, `bench tune`.

#include "rcbench/bench.hpp"
#include "rcbench/error.hpp"
#include "rcbench/kernels.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace rcbench;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::argument: return 2;
        case ErrorKind::schema: return 3;
        case ErrorKind::parse: return 4;
        case ErrorKind::label: return 5;
        case ErrorKind::shape: return 6;
        case ErrorKind::io: return 7;
        case ErrorKind::init: return 8;
        case ErrorKind::singular: return 9;
        case ErrorKind::degenerate: return 10;
    }
    return 1;
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_method(item));
    return out;
}

std::string opt(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

struct Options {
    std::string data;
    std::string methods = "esn,rf,knn,svc,xgb,dt";
    std::string method = "esn";
    std::size_t trials = 100;
    double test_fraction = 0.2;
    std::size_t k_features = 4;
    std::string selection = "per-trial";
    std::string tune_mode = "once";
    std::size_t tune_budget = 40;
    std::size_t cv_folds = 5;
    std::uint64_t seed = 42;
    bool stratified = true;
    std::string out = "bench-out";
    std::string reservoir_seed = "per-trial";
    std::size_t threads = 0;
    bool quick = false;
    bool sequence = false;
    std::size_t washout = 10;
    std::size_t encode_steps = 20;
    bool bias = false;
};

BenchConfig to_config(const Options& o, const CLI::App& app) {
    BenchConfig c;
    c.data_path = o.data;
    c.methods = parse_methods(o.methods);
    c.test_fraction = o.test_fraction;
    c.k_features = o.k_features;
    c.selection = parse_selection_mode(o.selection);
    c.cv_folds = o.cv_folds;
    c.base_seed = o.seed;
    c.stratified = o.stratified;
    c.out_dir = o.out;
    c.reservoir_seed = parse_reservoir_seed(o.reservoir_seed);
    c.threads = o.threads;
    c.esn.mode = o.sequence ? esn::EncodeMode::sequence : esn::EncodeMode::per_sample;
    c.esn.washout = o.washout;
    c.esn.encode_steps = o.encode_steps;
    c.esn.include_bias = o.bias;
    c.trials = o.trials;
    c.tune_budget = o.tune_budget;
    c.tune_mode = parse_tune_mode(o.tune_mode);
    if (o.quick) {
        // The preset only fills values the user did not give explicitly.
        BenchConfig q = c;
        q.apply_quick_preset();
        if (app.count("--trials") == 0) c.trials = q.trials;
        if (app.count("--tune-budget") == 0) c.tune_budget = q.tune_budget;
        if (app.count("--tune-mode") == 0) c.tune_mode = q.tune_mode;
    }
    return c;
}

void print_summary(const ReportBundle& bundle) {
    std::printf("%-6s %10s %9s %10s %9s %10s %9s %10s %9s %8s\n", "method", "acc", "acc_sd", "prec", "prec_sd",
                "recall", "rec_sd", "fn_rate", "fn_sd", "f1");
    for (const auto& m : bundle.methods) {
        const auto& s = m.summary;
        std::printf("%-6s %10s %9s %10s %9s %10s %9s %10s %9s %8s\n", to_string(m.method),
                    opt(s[Metric::accuracy].mean).c_str(), opt(s[Metric::accuracy].std).c_str(),
                    opt(s[Metric::precision].mean).c_str(), opt(s[Metric::precision].std).c_str(),
                    opt(s[Metric::recall].mean).c_str(), opt(s[Metric::recall].std).c_str(),
                    opt(s[Metric::fn_rate].mean).c_str(), opt(s[Metric::fn_rate].std).c_str(), opt(m.f1).c_str());
    }
}

int cmd_run(const Options& o, const CLI::App& app) {
    BenchConfig config = to_config(o, app);
    auto start = std::chrono::steady_clock::now();
    ReportBundle bundle = run_benchmark(config);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    print_summary(bundle);
    for (const auto& path : emit_reports(bundle, config.out_dir)) std::printf("wrote %s\n", path.c_str());
    std::printf("%zu trials x %zu methods in %.1f s (kernels: %s)\n", config.trials, config.methods.size(), secs,
                std::string(kernels::to_string(kernels::active_isa())).c_str());
    return 0;
}

int cmd_anova(const Options& o) {
    require(!o.data.empty(), ErrorKind::argument, "--data is required");
    require(o.k_features >= 1, ErrorKind::argument, "k_features must be >= 1");
    FeatureTable table = load_csv(o.data);
    FScoreReport report = anova_f_scores(table);
    IndexList selected = select_top_k(report, o.k_features);
    IndexList order = select_top_k(report, report.f_values.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        std::size_t j = order[r];
        bool chosen = std::find(selected.begin(), selected.end(), j) != selected.end();
        std::printf("%2zu %-18s %14.6f%s\n", r + 1, report.feature_names[j].c_str(), report.f_values[j],
                    chosen ? "  *" : "");
    }
    std::printf("wrote %s\n", emit_anova(report, selected, o.out).c_str());
    return 0;
}

int cmd_tune(const Options& o, const CLI::App& app) {
    BenchConfig config = to_config(o, app);
    Method method = parse_method(o.method);
    config.methods = {method};
    if (config.tune_mode == TuneMode::fixed) config.tune_mode = TuneMode::once;
    require(!config.data_path.empty(), ErrorKind::argument, "--data is required");
    FeatureTable table = load_csv(config.data_path);
    TuneOutcome outcome = resolve_hyperparameters(config, table, method, 0);
    auto space = config.space_for(method);
    for (std::size_t i = 0; i < outcome.history.size(); ++i)
        std::printf("%3zu cv_accuracy %.6f best %.6f\n", i, outcome.history.objectives[i],
                    outcome.history.best_so_far[i]);
    std::printf("best:");
    for (const auto& d : space.dimensions)
        std::printf(" %s=%s", d.name.c_str(), hyperopt::format_value(d, outcome.best.at(d.name)).c_str());
    std::printf("\nwrote %s\n", emit_tuning(method, space, outcome.history, config.out_dir).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Repeated-split benchmark of an echo state network against standard classifiers"};
    app.set_config("--config", "", "Read options from a key=value file; command-line flags take precedence");
    app.require_subcommand(1);
    Options o;

    app.add_option("--data", o.data, "CSV table (UCI parkinsons layout)");
    app.add_option("--methods", o.methods, "Comma-separated methods: esn,rf,knn,svc,xgb,dt")->capture_default_str();
    app.add_option("--method", o.method, "Method for `tune`")->capture_default_str();
    app.add_option("--trials", o.trials, "Number of random splits")->capture_default_str();
    app.add_option("--test-fraction", o.test_fraction, "Held-out fraction per trial")->capture_default_str();
    app.add_option("--k-features", o.k_features, "Features kept by ANOVA")->capture_default_str();
    app.add_option("--selection", o.selection, "per-trial or global")->capture_default_str();
    app.add_option("--tune-mode", o.tune_mode, "per-trial, once or fixed")->capture_default_str();
    app.add_option("--tune-budget", o.tune_budget, "Objective evaluations per tuning run")->capture_default_str();
    app.add_option("--cv-folds", o.cv_folds, "Folds of the tuning objective")->capture_default_str();
    app.add_option("--seed", o.seed, "Base seed; trial i uses seed + i")->capture_default_str();
    app.add_option("--stratified", o.stratified, "Stratified splits (true/false)")->capture_default_str();
    app.add_option("--out", o.out, "Output directory")->capture_default_str();
    app.add_option("--reservoir-seed", o.reservoir_seed, "per-trial or fixed")->capture_default_str();
    app.add_option("--threads", o.threads, "Worker threads, 0 = all cores")->capture_default_str();
    app.add_flag("--quick", o.quick, "Preset: 20 trials, budget 10, tune once");
    app.add_flag("--sequence", o.sequence, "Feed samples to the reservoir as one sequence");
    app.add_option("--washout", o.washout, "Discarded priming steps in sequence mode")->capture_default_str();
    app.add_option("--encode-steps", o.encode_steps, "Steps each sample is held for")->capture_default_str();
    app.add_flag("--bias", o.bias, "Add a constant term to the readout");

    auto* run = app.add_subcommand("run", "Full benchmark with all report files");
    auto* anova = app.add_subcommand("anova", "Feature ranking only (anova_scores.csv)");
    auto* tune = app.add_subcommand("tune", "Tuning curve for one method (tuning_<method>.csv)");
    for (auto* sub : {run, anova, tune}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // Help and version requests exit 0; malformed arguments share the argument-error code.
        return code == 0 ? 0 : exit_code(ErrorKind::argument);
    }

    try {
        if (*run) return cmd_run(o, app);
        if (*anova) return cmd_anova(o);
        if (*tune) return cmd_tune(o, app);
    } catch (const Error& e) {
        std::fprintf(stderr, "bench: %s: %s\n", rcbench::to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bench: error: %s\n", e.what());
        return 1;
    }
    return 0;
}
