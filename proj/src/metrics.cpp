#include "rcbench/metrics.hpp"

#include "rcbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rcbench {

ConfusionMatrix confusion(const Labels& predicted, const Labels& truth) {
    require(predicted.size() == truth.size(), ErrorKind::argument, "confusion: length mismatch");
    require(!truth.empty(), ErrorKind::argument, "confusion: no samples");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const Label p = predicted[i], t = truth[i];
        require((p == 0 || p == 1) && (t == 0 || t == 1), ErrorKind::argument,
                "confusion: label outside {0,1} at index " + std::to_string(i));
        if (t == 1) (p == 1 ? cm.tp : cm.fn)++;
        else (p == 1 ? cm.fp : cm.tn)++;
    }
    return cm;
}

TrialMetrics metrics(const ConfusionMatrix& cm) {
    require(cm.total() > 0, ErrorKind::argument, "metrics: empty confusion matrix");
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    TrialMetrics m;
    m.accuracy = ratio(cm.tp + cm.tn, cm.total());
    m.precision = ratio(cm.tp, cm.tp + cm.fp);
    m.recall = ratio(cm.tp, cm.tp + cm.fn);
    m.fn_rate = ratio(cm.fn, cm.tp + cm.fn);
    // F1 = 2PR / (P + R) = 2tp / (2tp + fp + fn); undefined when P or R is.
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0) {
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    } else if (m.precision && m.recall) {
        m.f1 = 0.0;
    }
    return m;
}

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::accuracy: return "accuracy";
        case Metric::precision: return "precision";
        case Metric::recall: return "recall";
        case Metric::fn_rate: return "fn_rate";
        case Metric::f1: return "f1";
    }
    return "?";
}

std::optional<double> get(const TrialMetrics& tm, Metric m) {
    switch (m) {
        case Metric::accuracy: return tm.accuracy;
        case Metric::precision: return tm.precision;
        case Metric::recall: return tm.recall;
        case Metric::fn_rate: return tm.fn_rate;
        case Metric::f1: return tm.f1;
    }
    return std::nullopt;
}

Summary aggregate(const std::vector<TrialMetrics>& trials) {
    Summary s;
    for (auto metric : kAllMetrics) {
        std::vector<double> v;
        std::size_t excluded = 0;
        for (const auto& t : trials) {
            if (auto x = get(t, metric)) v.push_back(100.0 * *x);
            else ++excluded;
        }
        auto& out = s.by_metric[static_cast<std::size_t>(metric)];
        out.defined = v.size();
        out.excluded = excluded;
        if (v.empty()) continue;
        // Sorted summation so the result does not depend on trial order.
        std::sort(v.begin(), v.end());
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        out.mean = mean;
        if (v.size() >= 2) {
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
        }
    }
    return s;
}

std::optional<double> Summary::f1_from_means() const {
    const auto& p = (*this)[Metric::precision].mean;
    const auto& r = (*this)[Metric::recall].mean;
    if (!p || !r || *p + *r <= 0.0) return std::nullopt;
    return 2.0 * *p * *r / (*p + *r);
}

CdfTable cdf_bins(const std::vector<double>& values, double bin_width) {
    require(!values.empty(), ErrorKind::argument, "cdf_bins: empty value list");
    require(bin_width > 0.0 && bin_width <= 1.0, ErrorKind::argument, "cdf_bins: bin width must lie in (0, 1]");
    const double bins_exact = 1.0 / bin_width;
    const auto bins = static_cast<std::size_t>(std::llround(bins_exact));
    require(std::abs(bins_exact - static_cast<double>(bins)) < 1e-9, ErrorKind::argument,
            "cdf_bins: bin width must divide [0, 1]");
    for (double v : values) {
        require(v >= 0.0 && v <= 1.0, ErrorKind::argument, "cdf_bins: value outside [0, 1]");
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    CdfTable t;
    t.bin_width = bin_width;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t b = 1; b <= bins; ++b) {
        // Edges as exact ratios b / bins so that rational metrics on an edge
        // compare equal to it.
        const double edge = static_cast<double>(b) / static_cast<double>(bins);
        const auto count = std::upper_bound(sorted.begin(), sorted.end(), edge) - sorted.begin();
        t.upper_edges.push_back(edge);
        t.cumulative.push_back(b == bins ? 1.0 : static_cast<double>(count) / n);
    }
    return t;
}

double silverman_bandwidth(const std::vector<double>& values) {
    require(values.size() >= 2, ErrorKind::degenerate, "kde: need at least two values for an automatic bandwidth");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        const double pos = q * (n - 1.0);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    require(spread > 0.0, ErrorKind::degenerate,
            "kde: all values are identical; pass an explicit bandwidth");
    return 0.9 * spread * std::pow(n, -0.2);
}

DensityCurve kde(const std::vector<double>& values, std::optional<double> bandwidth) {
    require(!values.empty(), ErrorKind::argument, "kde: empty value list");
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
    require(h > 0.0 && std::isfinite(h), ErrorKind::argument, "kde: bandwidth must be positive");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn - 3.0 * h;
    const double hi = *mx + 3.0 * h;
    constexpr std::size_t points = 256;
    const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));

    DensityCurve curve;
    curve.bandwidth = h;
    curve.x.resize(points);
    curve.density.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        // Symmetric construction about the grid centre.
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        const double x = 0.5 * (lo + hi) + (t - 0.5) * (hi - lo);
        double s = 0.0;
        for (double v : values) {
            const double z = (x - v) / h;
            s += std::exp(-0.5 * z * z);
        }
        curve.x[i] = x;
        curve.density[i] = s * norm;
    }
    return curve;
}

}  // namespace rcbench
