#pragma once

#include "rcbench/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace rcbench {

/// Class 1 (PD) is the positive class.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(const Labels& predicted, const Labels& truth);

/// Metrics with a zero denominator are left empty (undefined) rather than
/// substituted; aggregation skips them and counts the exclusions.
struct TrialMetrics {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> fn_rate;
    std::optional<double> f1;
};

TrialMetrics metrics(const ConfusionMatrix& cm);

enum class Metric { accuracy, precision, recall, fn_rate, f1 };
inline constexpr std::array<Metric, 5> kAllMetrics{Metric::accuracy, Metric::precision, Metric::recall,
                                                   Metric::fn_rate, Metric::f1};
std::string_view to_string(Metric m);
std::optional<double> get(const TrialMetrics& tm, Metric m);

/// Mean and sample standard deviation (n - 1), in percent.
struct MetricSummary {
    std::optional<double> mean;  // empty when no trial defines the metric
    std::optional<double> std;   // empty when fewer than two defined values
    std::size_t defined = 0;
    std::size_t excluded = 0;
};

struct Summary {
    std::array<MetricSummary, 5> by_metric;
    const MetricSummary& operator[](Metric m) const { return by_metric[static_cast<std::size_t>(m)]; }
    /// Harmonic mean of the mean precision and mean recall, in percent.
    std::optional<double> f1_from_means() const;
};

Summary aggregate(const std::vector<TrialMetrics>& trials);

/// Cumulative fraction of values <= each bin's upper edge; bins of equal
/// width tile [0, 1] and a value on an edge counts into the lower bin.
struct CdfTable {
    std::vector<double> upper_edges;
    std::vector<double> cumulative;
    double bin_width = 0.02;
};

CdfTable cdf_bins(const std::vector<double>& values, double bin_width = 0.02);

struct DensityCurve {
    std::vector<double> x;
    std::vector<double> density;
    double bandwidth = 0.0;
};

/// Silverman's rule: 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
double silverman_bandwidth(const std::vector<double>& values);

/// Gaussian KDE on a 256-point grid over [min - 3h, max + 3h].
DensityCurve kde(const std::vector<double>& values, std::optional<double> bandwidth = std::nullopt);

}  // namespace rcbench
