#pragma once

// Bayesian optimisation over a box-constrained hyperparameter space: a
// Latin-hypercube initial design, then a Gaussian-process surrogate with
// expected improvement maximised over a random candidate set.

#include "rcbench/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rcbench {
class Rng;
}

namespace rcbench::hyperopt {

enum class Kind { real, log_real, integer, categorical };

struct Dimension {
    std::string name;
    Kind kind = Kind::real;
    double lower = 0.0;
    double upper = 1.0;
    std::vector<std::string> categories;

    static Dimension real(std::string name, double lo, double hi);
    static Dimension log_real(std::string name, double lo, double hi);
    static Dimension integer(std::string name, double lo, double hi);
    static Dimension categorical(std::string name, std::vector<std::string> categories);

    /// Width of this dimension in the surrogate's coordinates (one-hot for categories).
    std::size_t encoded_width() const { return kind == Kind::categorical ? categories.size() : 1; }
};

struct HyperSpace {
    std::vector<Dimension> dimensions;

    void validate() const;
    std::size_t encoded_size() const;
    const Dimension* find(const std::string& name) const;
};

/// Values keyed by dimension name; categorical values hold the category index.
struct HyperPoint {
    std::map<std::string, double> values;

    double at(const std::string& name) const;
    double get(const std::string& name, double fallback) const;
    bool operator==(const HyperPoint&) const = default;
};

/// True when every value lies in its bounds/set and integers are integral.
bool contains(const HyperSpace& space, const HyperPoint& point);

/// Normalised coordinates in [0,1]^encoded_size.
std::vector<double> encode(const HyperSpace& space, const HyperPoint& point);

/// Map per-dimension unit coordinates (one per dimension, not encoded) to a point.
HyperPoint from_unit(const HyperSpace& space, const std::vector<double>& unit);

/// Human-readable value (category names for categorical dimensions).
std::string format_value(const Dimension& dim, double value);

struct TuneHistory {
    std::vector<HyperPoint> points;
    std::vector<double> objectives;
    std::vector<double> best_so_far;
    std::size_t best_index = 0;
    std::uint64_t seed = 0;

    void record(HyperPoint point, double objective);
    std::size_t size() const { return points.size(); }
    double best_objective() const { return objectives.at(best_index); }
};

/// Squared-exponential GP on normalised inputs with standardised targets.
class GaussianProcess {
public:
    struct Prediction {
        double mean = 0.0;
        double stddev = 0.0;
    };

    /// Length scales are chosen per dimension by coordinate-wise grid search
    /// on the log marginal likelihood.
    GaussianProcess(std::vector<std::vector<double>> inputs, std::vector<double> targets, double noise = 1e-6);

    /// Prediction in the original target units.
    Prediction predict(const std::vector<double>& x) const;
    const std::vector<double>& length_scales() const { return length_scales_; }
    double log_marginal_likelihood() const { return lml_; }

private:
    double kernel(const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<double>& ls) const;
    double fit_with(const std::vector<double>& ls);

    std::vector<std::vector<double>> inputs_;
    std::vector<double> targets_;  // standardised
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    double noise_ = 1e-6;
    std::vector<double> length_scales_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double lml_ = 0.0;
};

/// EI for maximisation; zero when stddev vanishes and mean <= best.
double expected_improvement(double mean, double stddev, double best);

struct ProposeOptions {
    std::size_t initial_design = 10;
    std::size_t candidates = 1024;
    double noise = 1e-6;
    /// Ablation: ignore history and draw uniformly at random.
    bool random_search = false;
};

/// Latin-hypercube design of n points, deterministic in seed.
std::vector<HyperPoint> latin_hypercube(const HyperSpace& space, std::size_t n, std::uint64_t seed);

HyperPoint uniform_point(const HyperSpace& space, Rng& rng);

/// Next point to evaluate: the Latin-hypercube point for this history
/// position while history.size() < initial_design, otherwise the EI maximiser
/// over uniformly sampled candidates. All-equal objectives fall back to a
/// uniform random proposal.
HyperPoint propose(const TuneHistory& history, const HyperSpace& space, Rng& rng,
                   const ProposeOptions& options = {});

struct TuneResult {
    HyperPoint best;
    TuneHistory history;
};

using Objective = std::function<double(const HyperPoint&)>;

/// Runs `budget` evaluations. When given, the default point is evaluated
/// first and takes the first slot of the initial design.
TuneResult tune(const Objective& objective, const HyperSpace& space, std::size_t budget, std::uint64_t seed,
                const std::optional<HyperPoint>& default_point = std::nullopt,
                const ProposeOptions& options = {});

}  // namespace rcbench::hyperopt
