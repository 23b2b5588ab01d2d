#include "rcbench/hyperopt.hpp"

#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace rcbench::hyperopt {

namespace {

constexpr double kLengthScaleGrid[] = {0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.5, 4.0};
constexpr double kInitialLengthScale = 0.35;
constexpr int kGridSweeps = 2;

double clamp_unit(double u) { return std::clamp(u, 0.0, 1.0); }

}  // namespace

Dimension Dimension::real(std::string name, double lo, double hi) {
    return Dimension{std::move(name), Kind::real, lo, hi, {}};
}

Dimension Dimension::log_real(std::string name, double lo, double hi) {
    return Dimension{std::move(name), Kind::log_real, lo, hi, {}};
}

Dimension Dimension::integer(std::string name, double lo, double hi) {
    return Dimension{std::move(name), Kind::integer, lo, hi, {}};
}

Dimension Dimension::categorical(std::string name, std::vector<std::string> categories) {
    double hi = categories.empty() ? 0.0 : static_cast<double>(categories.size() - 1);
    return Dimension{std::move(name), Kind::categorical, 0.0, hi, std::move(categories)};
}

void HyperSpace::validate() const {
    require(!dimensions.empty(), ErrorKind::argument, "hyperparameter space has no dimensions");
    for (std::size_t i = 0; i < dimensions.size(); ++i) {
        const Dimension& d = dimensions[i];
        require(!d.name.empty(), ErrorKind::argument, "hyperparameter dimension without a name");
        for (std::size_t j = 0; j < i; ++j)
            require(dimensions[j].name != d.name, ErrorKind::argument, "duplicate hyperparameter dimension '" + d.name + "'");
        if (d.kind == Kind::categorical) {
            require(!d.categories.empty(), ErrorKind::argument, "categorical dimension '" + d.name + "' has no categories");
            continue;
        }
        require(std::isfinite(d.lower) && std::isfinite(d.upper) && d.lower < d.upper, ErrorKind::argument,
                "dimension '" + d.name + "' needs finite bounds with lower < upper");
        if (d.kind == Kind::log_real)
            require(d.lower > 0.0, ErrorKind::argument, "log-scale dimension '" + d.name + "' needs positive bounds");
        if (d.kind == Kind::integer)
            require(d.lower == std::floor(d.lower) && d.upper == std::floor(d.upper), ErrorKind::argument,
                    "integer dimension '" + d.name + "' needs integral bounds");
    }
}

std::size_t HyperSpace::encoded_size() const {
    std::size_t n = 0;
    for (const auto& d : dimensions) n += d.encoded_width();
    return n;
}

const Dimension* HyperSpace::find(const std::string& name) const {
    for (const auto& d : dimensions)
        if (d.name == name) return &d;
    return nullptr;
}

double HyperPoint::at(const std::string& name) const {
    auto it = values.find(name);
    require(it != values.end(), ErrorKind::argument, "hyperparameter '" + name + "' not set");
    return it->second;
}

double HyperPoint::get(const std::string& name, double fallback) const {
    auto it = values.find(name);
    return it == values.end() ? fallback : it->second;
}

bool contains(const HyperSpace& space, const HyperPoint& point) {
    if (point.values.size() != space.dimensions.size()) return false;
    for (const auto& d : space.dimensions) {
        auto it = point.values.find(d.name);
        if (it == point.values.end()) return false;
        double v = it->second;
        if (!std::isfinite(v) || v < d.lower || v > d.upper) return false;
        if ((d.kind == Kind::integer || d.kind == Kind::categorical) && v != std::floor(v)) return false;
    }
    return true;
}

std::vector<double> encode(const HyperSpace& space, const HyperPoint& point) {
    std::vector<double> out;
    out.reserve(space.encoded_size());
    for (const auto& d : space.dimensions) {
        double v = point.at(d.name);
        switch (d.kind) {
            case Kind::real:
            case Kind::integer:
                out.push_back(clamp_unit((v - d.lower) / (d.upper - d.lower)));
                break;
            case Kind::log_real:
                out.push_back(clamp_unit((std::log(v) - std::log(d.lower)) / (std::log(d.upper) - std::log(d.lower))));
                break;
            case Kind::categorical:
                for (std::size_t c = 0; c < d.categories.size(); ++c)
                    out.push_back(static_cast<std::size_t>(v) == c ? 1.0 : 0.0);
                break;
        }
    }
    return out;
}

HyperPoint from_unit(const HyperSpace& space, const std::vector<double>& unit) {
    require(unit.size() == space.dimensions.size(), ErrorKind::shape, "unit coordinate count does not match the space");
    HyperPoint p;
    for (std::size_t i = 0; i < unit.size(); ++i) {
        const Dimension& d = space.dimensions[i];
        double u = clamp_unit(unit[i]);
        double v = 0.0;
        switch (d.kind) {
            case Kind::real:
                v = std::clamp(d.lower + u * (d.upper - d.lower), d.lower, d.upper);
                break;
            case Kind::log_real:
                v = std::clamp(std::exp(std::log(d.lower) + u * (std::log(d.upper) - std::log(d.lower))), d.lower, d.upper);
                break;
            case Kind::integer:
                // Equal-width cells per integer so each value is equally likely.
                v = std::min(d.upper, std::floor(d.lower + u * (d.upper - d.lower + 1.0)));
                break;
            case Kind::categorical:
                v = std::min(d.upper, std::floor(u * static_cast<double>(d.categories.size())));
                break;
        }
        p.values[d.name] = v;
    }
    return p;
}

std::string format_value(const Dimension& dim, double value) {
    if (dim.kind == Kind::categorical) return dim.categories.at(static_cast<std::size_t>(value));
    char buf[64];
    if (dim.kind == Kind::integer)
        std::snprintf(buf, sizeof buf, "%.0f", value);
    else
        std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void TuneHistory::record(HyperPoint point, double objective) {
    require(std::isfinite(objective), ErrorKind::argument, "objective returned a non-finite value");
    points.push_back(std::move(point));
    objectives.push_back(objective);
    if (objectives.size() == 1 || objective > objectives[best_index]) best_index = objectives.size() - 1;
    best_so_far.push_back(objectives[best_index]);
}

GaussianProcess::GaussianProcess(std::vector<std::vector<double>> inputs, std::vector<double> targets, double noise)
    : inputs_(std::move(inputs)), noise_(noise) {
    require(!inputs_.empty() && inputs_.size() == targets.size(), ErrorKind::shape,
            "GP needs one target per input and at least one input");
    const std::size_t n = targets.size();
    double mean = 0.0;
    for (double y : targets) mean += y;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double y : targets) ss += (y - mean) * (y - mean);
    double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
    require(sd > 1e-12, ErrorKind::degenerate, "GP targets are all equal");
    y_mean_ = mean;
    y_scale_ = sd;
    targets_.resize(n);
    for (std::size_t i = 0; i < n; ++i) targets_[i] = (targets[i] - mean) / sd;

    const std::size_t d = inputs_.front().size();
    std::vector<double> ls(d, kInitialLengthScale);
    double best = fit_with(ls);
    for (int sweep = 0; sweep < kGridSweeps; ++sweep) {
        for (std::size_t k = 0; k < d; ++k) {
            double keep = ls[k];
            for (double candidate : kLengthScaleGrid) {
                if (candidate == keep) continue;
                ls[k] = candidate;
                double lml = fit_with(ls);
                if (lml > best) {
                    best = lml;
                    keep = candidate;
                }
            }
            ls[k] = keep;
        }
    }
    length_scales_ = ls;
    lml_ = fit_with(ls);
    require(std::isfinite(lml_), ErrorKind::singular, "GP covariance is not positive definite");
}

double GaussianProcess::kernel(const std::vector<double>& a, const std::vector<double>& b,
                               const std::vector<double>& ls) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = (a[i] - b[i]) / ls[i];
        s += t * t;
    }
    return std::exp(-0.5 * s);
}

double GaussianProcess::fit_with(const std::vector<double>& ls) {
    const Eigen::Index n = static_cast<Eigen::Index>(inputs_.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0 + noise_;
        for (Eigen::Index j = 0; j < i; ++j) {
            double v = kernel(inputs_[i], inputs_[j], ls);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    llt_.compute(k);
    if (llt_.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets_.data(), n);
    alpha_ = llt_.solve(y);
    double log_det = 0.0;
    const auto& l = llt_.matrixL();
    for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(l(i, i));
    return -0.5 * y.dot(alpha_) - log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

GaussianProcess::Prediction GaussianProcess::predict(const std::vector<double>& x) const {
    const Eigen::Index n = static_cast<Eigen::Index>(inputs_.size());
    Eigen::VectorXd ks(n);
    for (Eigen::Index i = 0; i < n; ++i) ks(i) = kernel(x, inputs_[i], length_scales_);
    double mu = ks.dot(alpha_);
    Eigen::VectorXd v = llt_.matrixL().solve(ks);
    double var = std::max(0.0, 1.0 - v.squaredNorm());
    return {y_mean_ + y_scale_ * mu, y_scale_ * std::sqrt(var)};
}

double expected_improvement(double mean, double stddev, double best) {
    double gap = mean - best;
    if (!(stddev > 1e-12)) return std::max(0.0, gap);
    double z = gap / stddev;
    double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return std::max(0.0, gap * cdf + stddev * pdf);
}

std::vector<HyperPoint> latin_hypercube(const HyperSpace& space, std::size_t n, std::uint64_t seed) {
    space.validate();
    Rng rng(derive_seed(seed, "hyperopt.lhs"));
    const std::size_t d = space.dimensions.size();
    std::vector<std::vector<double>> unit(n, std::vector<double>(d));
    std::vector<std::size_t> strata(n);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < n; ++i) strata[i] = i;
        rng.shuffle(strata);
        for (std::size_t i = 0; i < n; ++i)
            unit[i][k] = (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(n);
    }
    std::vector<HyperPoint> out;
    out.reserve(n);
    for (const auto& u : unit) out.push_back(from_unit(space, u));
    return out;
}

HyperPoint uniform_point(const HyperSpace& space, Rng& rng) {
    std::vector<double> u(space.dimensions.size());
    for (double& v : u) v = rng.uniform();
    return from_unit(space, u);
}

HyperPoint propose(const TuneHistory& history, const HyperSpace& space, Rng& rng, const ProposeOptions& options) {
    space.validate();
    if (options.random_search) return uniform_point(space, rng);
    if (history.size() < options.initial_design)
        return latin_hypercube(space, options.initial_design, history.seed)[history.size()];

    const auto [lo, hi] = std::minmax_element(history.objectives.begin(), history.objectives.end());
    if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) return uniform_point(space, rng);

    std::vector<std::vector<double>> inputs;
    inputs.reserve(history.size());
    for (const auto& p : history.points) inputs.push_back(encode(space, p));
    std::optional<GaussianProcess> fitted;
    try {
        fitted.emplace(std::move(inputs), history.objectives, options.noise);
    } catch (const Error&) {
        return uniform_point(space, rng);
    }
    const GaussianProcess& gp = *fitted;

    const double best = history.best_objective();
    HyperPoint chosen;
    double chosen_ei = -1.0;
    for (std::size_t c = 0; c < std::max<std::size_t>(1, options.candidates); ++c) {
        HyperPoint candidate = uniform_point(space, rng);
        auto pred = gp.predict(encode(space, candidate));
        double ei = expected_improvement(pred.mean, pred.stddev, best);
        if (ei > chosen_ei) {
            chosen_ei = ei;
            chosen = std::move(candidate);
        }
    }
    return chosen;
}

TuneResult tune(const Objective& objective, const HyperSpace& space, std::size_t budget, std::uint64_t seed,
                const std::optional<HyperPoint>& default_point, const ProposeOptions& options) {
    require(budget >= 1, ErrorKind::argument, "tuning budget must be at least 1");
    space.validate();
    TuneResult result;
    result.history.seed = seed;
    Rng rng(derive_seed(seed, "hyperopt.propose"));
    if (default_point) {
        require(contains(space, *default_point), ErrorKind::argument, "default point lies outside the search space");
        result.history.record(*default_point, objective(*default_point));
    }
    while (result.history.size() < budget) {
        HyperPoint p = propose(result.history, space, rng, options);
        double y = objective(p);
        result.history.record(std::move(p), y);
    }
    result.best = result.history.points[result.history.best_index];
    return result;
}

}  // namespace rcbench::hyperopt
