#include "rcbench/bench.hpp"

#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace rcbench {

const char* to_string(SelectionMode m) { return m == SelectionMode::global ? "global" : "per-trial"; }

const char* to_string(TuneMode m) {
    switch (m) {
        case TuneMode::per_trial: return "per-trial";
        case TuneMode::once: return "once";
        case TuneMode::fixed: return "fixed";
    }
    return "?";
}

const char* to_string(ReservoirSeed m) { return m == ReservoirSeed::fixed ? "fixed" : "per-trial"; }

SelectionMode parse_selection_mode(const std::string& s) {
    if (s == "per-trial") return SelectionMode::per_trial;
    if (s == "global") return SelectionMode::global;
    fail(ErrorKind::argument, "selection mode must be per-trial or global, got '" + s + "'");
}

TuneMode parse_tune_mode(const std::string& s) {
    if (s == "per-trial") return TuneMode::per_trial;
    if (s == "once") return TuneMode::once;
    if (s == "fixed") return TuneMode::fixed;
    fail(ErrorKind::argument, "tune mode must be per-trial, once or fixed, got '" + s + "'");
}

ReservoirSeed parse_reservoir_seed(const std::string& s) {
    if (s == "per-trial") return ReservoirSeed::per_trial;
    if (s == "fixed") return ReservoirSeed::fixed;
    fail(ErrorKind::argument, "reservoir seed mode must be per-trial or fixed, got '" + s + "'");
}

void BenchConfig::validate() const {
    require(trials >= 1, ErrorKind::argument, "trials must be >= 1");
    require(test_fraction > 0.0 && test_fraction < 1.0, ErrorKind::argument, "test fraction must lie in (0, 1)");
    require(k_features >= 1 && k_features <= 22, ErrorKind::argument, "k_features must lie in [1, 22]");
    require(!methods.empty(), ErrorKind::argument, "no methods selected");
    for (std::size_t i = 0; i < methods.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(methods[i] != methods[j], ErrorKind::argument,
                    std::string("method listed twice: ") + to_string(methods[i]));
    require(tune_mode == TuneMode::fixed || tune_budget >= 1, ErrorKind::argument, "tune budget must be >= 1");
    require(cv_folds >= 2, ErrorKind::argument, "cross-validation needs at least 2 folds");
    esn.validate();
    for (const auto& [m, space] : spaces) space.validate();
}

hyperopt::HyperSpace BenchConfig::space_for(Method method) const {
    auto it = spaces.find(method);
    return it == spaces.end() ? default_space(method) : it->second;
}

void BenchConfig::apply_quick_preset() {
    trials = 20;
    tune_budget = 10;
    tune_mode = TuneMode::once;
}

IndexList global_selection(const FeatureTable& table, std::size_t k) {
    return select_top_k(anova_f_scores(table), k);
}

namespace {

PipelineSpec make_spec(const BenchConfig& config, const FeatureTable& table, Method method) {
    PipelineSpec spec;
    spec.method = method;
    spec.k_features = config.k_features;
    spec.options.esn = config.esn;
    if (config.selection == SelectionMode::global) spec.fixed_selection = global_selection(table, config.k_features);
    return spec;
}

std::uint64_t model_seed(const BenchConfig& config, Method method, std::size_t trial) {
    if (method == Method::esn && config.reservoir_seed == ReservoirSeed::fixed)
        return derive_seed(config.base_seed, "model");
    return derive_seed(config.trial_seed(trial), "model");
}

void check_table(const BenchConfig& config, const FeatureTable& table) {
    config.validate();
    table.validate();
    require(config.k_features <= table.cols(), ErrorKind::argument,
            "k_features exceeds the number of feature columns (" + std::to_string(table.cols()) + ")");
}

TuneOutcome tune_on_trial(const BenchConfig& config, const FeatureTable& table, Method method, std::size_t trial) {
    TrialSplit s = split(table, config.test_fraction, config.trial_seed(trial), config.stratified);
    FeatureTable train = subset_rows(table, s.train_indices);
    TuneSettings settings;
    settings.budget = config.tune_budget;
    settings.folds = config.cv_folds;
    auto result = tune_pipeline(make_spec(config, table, method), config.space_for(method), train, settings,
                                derive_seed(config.trial_seed(trial), "tune"));
    return {std::move(result.best), std::move(result.history)};
}

struct TrialOutput {
    TrialRecord record;
    std::optional<TuneOutcome> tuning;
};

TrialOutput trial_impl(const BenchConfig& config, const FeatureTable& table, Method method, std::size_t trial,
                       const TuneOutcome* shared) {
    auto start = std::chrono::steady_clock::now();
    TrialOutput out;
    TrialRecord& rec = out.record;
    rec.trial = trial;
    rec.seed = config.trial_seed(trial);
    rec.method = method;

    switch (config.tune_mode) {
        case TuneMode::fixed:
            rec.point = default_point(method, ModelOptions{config.esn});
            break;
        case TuneMode::once:
            rec.point = shared ? shared->best : tune_on_trial(config, table, method, 0).best;
            break;
        case TuneMode::per_trial:
            out.tuning = tune_on_trial(config, table, method, trial);
            rec.point = out.tuning->best;
            break;
    }

    TrialSplit s = split(table, config.test_fraction, rec.seed, config.stratified);
    FittedPipeline fitted =
        fit_pipeline(make_spec(config, table, method), rec.point, table, s.train_indices, model_seed(config, method, trial));
    Labels predicted = fitted.predict(table, s.test_indices);
    Labels truth;
    truth.reserve(s.test_indices.size());
    for (std::size_t i : s.test_indices) truth.push_back(table.labels[i]);

    for (std::size_t c : fitted.selected) rec.selected_features.push_back(table.feature_names[c]);
    rec.cm = confusion(predicted, truth);
    rec.metrics = metrics(rec.cm);
    rec.model_fingerprint = fitted.fingerprint();
    rec.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

/// Runs fn(0..n-1) on a small pool. Stops handing out work after the first
/// failure and rethrows the failure with the lowest index.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            if (failed.load()) return;
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::optional<DensityCurve> density_or_empty(const std::vector<double>& percent) {
    if (percent.size() < 2) return std::nullopt;
    try {
        return kde(percent);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::degenerate) return std::nullopt;
        throw;
    }
}

MethodReport assemble(Method method, std::vector<TrialRecord> records, TuneOutcome tuning) {
    MethodReport r;
    r.method = method;
    r.records = std::move(records);
    r.tuning = std::move(tuning);
    std::vector<TrialMetrics> tm;
    std::vector<double> acc, fnr, acc_pct, fnr_pct;
    for (const auto& rec : r.records) {
        tm.push_back(rec.metrics);
        if (rec.metrics.accuracy) {
            acc.push_back(*rec.metrics.accuracy);
            acc_pct.push_back(100.0 * *rec.metrics.accuracy);
        }
        if (rec.metrics.fn_rate) {
            fnr.push_back(*rec.metrics.fn_rate);
            fnr_pct.push_back(100.0 * *rec.metrics.fn_rate);
        }
    }
    r.summary = aggregate(tm);
    r.f1 = r.summary.f1_from_means();
    if (!acc.empty()) r.accuracy_cdf = cdf_bins(acc, 0.02);
    if (!fnr.empty()) r.fn_rate_cdf = cdf_bins(fnr, 0.02);
    r.accuracy_density = density_or_empty(acc_pct);
    r.fn_rate_density = density_or_empty(fnr_pct);
    return r;
}

std::string failure_message(const BenchConfig& config, Method method, std::size_t trial, const std::string& what) {
    return std::string("trial ") + std::to_string(trial) + " (seed " + std::to_string(config.trial_seed(trial)) +
           ", method " + to_string(method) + ") failed: " + what;
}

}  // namespace

TuneOutcome resolve_hyperparameters(const BenchConfig& config, const FeatureTable& table, Method method,
                                    std::size_t trial) {
    check_table(config, table);
    switch (config.tune_mode) {
        case TuneMode::fixed: return {default_point(method, ModelOptions{config.esn}), {}};
        case TuneMode::once: return tune_on_trial(config, table, method, 0);
        case TuneMode::per_trial: return tune_on_trial(config, table, method, trial);
    }
    fail(ErrorKind::argument, "unknown tune mode");
}

TrialRecord run_trial(const BenchConfig& config, const FeatureTable& table, Method method, std::size_t trial,
                      const TuneOutcome* shared) {
    check_table(config, table);
    require(trial < config.trials, ErrorKind::argument, "trial index beyond the configured trial count");
    try {
        return trial_impl(config, table, method, trial, shared).record;
    } catch (const Error& e) {
        throw Error(e.kind(), failure_message(config, method, trial, e.what()));
    }
}

ReportBundle run_benchmark(const BenchConfig& config, const FeatureTable& table) {
    check_table(config, table);
    ReportBundle bundle;
    bundle.config = config;
    bundle.anova = anova_f_scores(table);
    bundle.anova_selected = select_top_k(bundle.anova, config.k_features);

    const std::size_t n_methods = config.methods.size();
    std::vector<TuneOutcome> shared(n_methods);
    if (config.tune_mode == TuneMode::once) {
        parallel_for(n_methods, config.threads, [&](std::size_t m) {
            try {
                shared[m] = tune_on_trial(config, table, config.methods[m], 0);
            } catch (const Error& e) {
                throw Error(e.kind(), failure_message(config, config.methods[m], 0, e.what()));
            }
        });
    } else if (config.tune_mode == TuneMode::fixed) {
        for (std::size_t m = 0; m < n_methods; ++m) shared[m].best = default_point(config.methods[m], ModelOptions{config.esn});
    }

    const std::size_t trials = config.trials;
    std::vector<TrialOutput> outputs(n_methods * trials);
    parallel_for(outputs.size(), config.threads, [&](std::size_t unit) {
        std::size_t m = unit / trials;
        std::size_t t = unit % trials;
        try {
            outputs[unit] = trial_impl(config, table, config.methods[m], t, &shared[m]);
        } catch (const Error& e) {
            throw Error(e.kind(), failure_message(config, config.methods[m], t, e.what()));
        }
    });

    for (std::size_t m = 0; m < n_methods; ++m) {
        std::vector<TrialRecord> records;
        records.reserve(trials);
        for (std::size_t t = 0; t < trials; ++t) records.push_back(std::move(outputs[m * trials + t].record));
        TuneOutcome tuning = shared[m];
        if (config.tune_mode == TuneMode::per_trial) tuning = *outputs[m * trials].tuning;
        bundle.methods.push_back(assemble(config.methods[m], std::move(records), std::move(tuning)));
    }
    return bundle;
}

ReportBundle run_benchmark(const BenchConfig& config) {
    require(!config.data_path.empty(), ErrorKind::argument, "no data path given");
    return run_benchmark(config, load_csv(config.data_path));
}

}  // namespace rcbench
