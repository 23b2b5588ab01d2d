#pragma once

// The repeated-split experiment: per-trial split, scaling, feature selection,
// tuning and evaluation for each method, aggregated into report tables.

#include "rcbench/anova.hpp"
#include "rcbench/data.hpp"
#include "rcbench/hyperopt.hpp"
#include "rcbench/metrics.hpp"
#include "rcbench/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rcbench {

inline constexpr const char* kArtifactVersion = "rcbench 0.1.0";

enum class SelectionMode { per_trial, global };
enum class TuneMode { per_trial, once, fixed };
enum class ReservoirSeed { per_trial, fixed };

const char* to_string(SelectionMode m);
const char* to_string(TuneMode m);
const char* to_string(ReservoirSeed m);
SelectionMode parse_selection_mode(const std::string& s);
TuneMode parse_tune_mode(const std::string& s);
ReservoirSeed parse_reservoir_seed(const std::string& s);

struct BenchConfig {
    std::filesystem::path data_path;
    std::vector<Method> methods = all_methods();
    std::size_t trials = 100;
    double test_fraction = 0.2;
    std::size_t k_features = 4;
    SelectionMode selection = SelectionMode::per_trial;
    TuneMode tune_mode = TuneMode::once;
    std::size_t tune_budget = 40;
    std::size_t cv_folds = 5;
    std::uint64_t base_seed = 42;
    bool stratified = true;
    std::filesystem::path out_dir = "bench-out";
    ReservoirSeed reservoir_seed = ReservoirSeed::per_trial;
    /// Non-tuned ESN settings (encoding mode, steps, washout, bias, ...).
    esn::HyperParams esn;
    /// 0 picks the hardware concurrency. Never affects results.
    std::size_t threads = 0;
    /// Replaces default_space(method) for tuning.
    std::map<Method, hyperopt::HyperSpace> spaces;

    void validate() const;
    hyperopt::HyperSpace space_for(Method method) const;
    std::uint64_t trial_seed(std::size_t trial) const { return base_seed + trial; }
    /// Fast preset: 20 trials, budget 10, tune once.
    void apply_quick_preset();
};

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    Method method = Method::esn;
    hyperopt::HyperPoint point;
    std::vector<std::string> selected_features;
    ConfusionMatrix cm;
    TrialMetrics metrics;
    std::uint64_t model_fingerprint = 0;
    double duration_ms = 0.0;  // wall clock, never written to data files
};

/// Hyperparameters of one method as resolved by the tune mode.
struct TuneOutcome {
    hyperopt::HyperPoint best;
    hyperopt::TuneHistory history;  // empty in fixed mode
};

struct MethodReport {
    Method method = Method::esn;
    std::vector<TrialRecord> records;  // ascending trial index
    Summary summary;
    std::optional<double> f1;  // from mean precision and recall, percent
    CdfTable accuracy_cdf;
    CdfTable fn_rate_cdf;
    std::optional<DensityCurve> accuracy_density;  // percent scale; empty when degenerate
    std::optional<DensityCurve> fn_rate_density;
    /// History shown in tuning_<method>.csv: the shared run (once) or trial 0 (per-trial).
    TuneOutcome tuning;
};

struct ReportBundle {
    BenchConfig config;
    FScoreReport anova;  // whole table, as in the feature-ranking figure
    IndexList anova_selected;
    std::vector<MethodReport> methods;
};

/// Selected columns by ANOVA over every row of the table.
IndexList global_selection(const FeatureTable& table, std::size_t k);

/// Hyperparameters for a method under the configured tune mode; for the
/// per-trial mode this tunes on the given trial's training split.
TuneOutcome resolve_hyperparameters(const BenchConfig& config, const FeatureTable& table, Method method,
                                    std::size_t trial);

/// One (method, trial) unit. `shared` supplies the hyperparameters in once
/// mode; when absent they are recomputed, which gives the same result.
TrialRecord run_trial(const BenchConfig& config, const FeatureTable& table, Method method, std::size_t trial,
                      const TuneOutcome* shared = nullptr);

ReportBundle run_benchmark(const BenchConfig& config, const FeatureTable& table);
ReportBundle run_benchmark(const BenchConfig& config);

/// Writes every report file into dir and returns the paths in write order.
/// Throws an I/O error before writing anything if dir is not writable.
std::vector<std::filesystem::path> emit_reports(const ReportBundle& bundle, const std::filesystem::path& dir);

/// Feature-ranking report only (anova_scores.csv).
std::filesystem::path emit_anova(const FScoreReport& report, const IndexList& selected,
                                 const std::filesystem::path& dir);

/// Tuning curve only (tuning_<method>.csv).
std::filesystem::path emit_tuning(Method method, const hyperopt::HyperSpace& space,
                                  const hyperopt::TuneHistory& history, const std::filesystem::path& dir);

// Renderers, exposed for tests.
std::string render_summary_csv(const ReportBundle& bundle);
std::string render_f1_csv(const ReportBundle& bundle);
std::string render_cdf_csv(const ReportBundle& bundle, Metric metric);
std::string render_per_trial_csv(const ReportBundle& bundle);
std::string render_anova_csv(const FScoreReport& report, const IndexList& selected);
std::string render_config_json(const BenchConfig& config);
std::string render_tuning_csv(const hyperopt::HyperSpace& space, const hyperopt::TuneHistory& history);
std::string render_density_svg(const ReportBundle& bundle, Metric metric);

}  // namespace rcbench
