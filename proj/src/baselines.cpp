#include "rcbench/baselines.hpp"

#include "rcbench/error.hpp"
#include "rcbench/kernels.hpp"
#include "rcbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rcbench {
namespace {

std::span<const double> row_of(const Matrix& m, Eigen::Index r) {
    return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

void check_training_set(const Matrix& x, const Labels& y, const char* who) {
    require(static_cast<Eigen::Index>(y.size()) == x.rows() && !y.empty(), ErrorKind::shape,
            std::string(who) + ": label count does not match rows");
    const auto ones = std::count(y.begin(), y.end(), 1);
    require(ones > 0 && ones < static_cast<std::ptrdiff_t>(y.size()), ErrorKind::argument,
            std::string(who) + ": training data must contain both classes");
}

// Equal class counts resolve to the positive (PD) class.
Label majority_label(const Labels& y) {
    const auto ones = std::count(y.begin(), y.end(), 1);
    return 2 * ones >= static_cast<std::ptrdiff_t>(y.size()) ? 1 : 0;
}

IndexList all_rows(const Matrix& x) {
    IndexList rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

}  // namespace

// ---------------------------------------------------------------- knn

namespace knn {

Model fit(const Matrix& x, const Labels& y, std::size_t k) {
    require(k >= 1, ErrorKind::argument, "knn: k must be >= 1");
    require(k <= static_cast<std::size_t>(x.rows()), ErrorKind::argument,
            "knn: k = " + std::to_string(k) + " exceeds training size " + std::to_string(x.rows()));
    require(static_cast<Eigen::Index>(y.size()) == x.rows(), ErrorKind::shape, "knn: label count mismatch");
    return Model{x, y, k};
}

Label predict_one(const Model& model, std::span<const double> query) {
    require(query.size() == static_cast<std::size_t>(model.train.cols()), ErrorKind::shape,
            "knn: query dimension mismatch");
    const auto n = static_cast<std::size_t>(model.train.rows());
    std::vector<std::pair<double, std::size_t>> dist(n);
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = {k.squared_distance(model.train.data() + i * query.size(), query.data(), query.size()), i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k), dist.end());
    std::size_t ones = 0;
    for (std::size_t i = 0; i < model.k; ++i) ones += model.labels[dist[i].second] == 1 ? 1 : 0;
    const std::size_t zeros = model.k - ones;
    if (ones != zeros) return ones > zeros ? 1 : 0;
    return model.labels[dist[0].second];
}

Labels predict(const Model& model, const Matrix& samples) {
    Labels out;
    out.reserve(static_cast<std::size_t>(samples.rows()));
    for (Eigen::Index r = 0; r < samples.rows(); ++r) out.push_back(predict_one(model, row_of(samples, r)));
    return out;
}

}  // namespace knn

// ---------------------------------------------------------------- dtree

namespace dtree {

Model fit(const Matrix& x, const Labels& y, const tree::CartParams& params) {
    check_training_set(x, y, "dtree");
    Model m;
    m.prior_majority = majority_label(y);
    m.tree = tree::fit_cart(x, y, all_rows(x), params, m.prior_majority, nullptr);
    return m;
}

Labels predict(const Model& model, const Matrix& samples) {
    Labels out;
    for (Eigen::Index r = 0; r < samples.rows(); ++r)
        out.push_back(static_cast<Label>(model.tree.evaluate(samples.data() + r * samples.cols())));
    return out;
}

}  // namespace dtree

// ---------------------------------------------------------------- rforest

namespace rforest {

Model fit(const Matrix& x, const Labels& y, const Params& params, std::uint64_t seed) {
    check_training_set(x, y, "rforest");
    require(params.trees >= 1, ErrorKind::argument, "rforest: need at least one tree");
    Model m;
    m.prior_majority = majority_label(y);
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = static_cast<std::size_t>(x.cols());
    tree::CartParams cart;
    cart.max_depth = params.max_depth;
    cart.min_samples_split = params.min_samples_split;
    cart.max_features =
        params.feature_subsampling ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))) : 0;

    m.trees.reserve(params.trees);
    for (std::size_t b = 0; b < params.trees; ++b) {
        Rng rng(derive_seed(seed, "rforest.tree", b));
        IndexList rows;
        if (params.bootstrap) {
            rows.resize(n);
            for (auto& r : rows) r = rng.below(n);
        } else {
            rows = all_rows(x);
        }
        // A bootstrap draw can be single-class; such a tree is a single leaf.
        m.trees.push_back(tree::fit_cart(x, y, rows, cart, m.prior_majority, &rng));
    }
    return m;
}

Labels predict(const Model& model, const Matrix& samples) {
    Labels out;
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        std::size_t ones = 0;
        for (const auto& t : model.trees) ones += t.evaluate(samples.data() + r * samples.cols()) > 0.5 ? 1 : 0;
        const std::size_t zeros = model.trees.size() - ones;
        out.push_back(ones > zeros ? 1 : (zeros > ones ? 0 : model.prior_majority));
    }
    return out;
}

}  // namespace rforest

// ---------------------------------------------------------------- gboost

namespace gboost {
namespace {

double sigmoid(double f) { return f >= 0 ? 1.0 / (1.0 + std::exp(-f)) : std::exp(f) / (1.0 + std::exp(f)); }

// log(1 + e^f) - y f, evaluated without overflow.
double logistic_loss(double f, Label y) {
    const double softplus = f > 0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f));
    return softplus - (y == 1 ? f : 0.0);
}

double mean_loss(const std::vector<double>& f, const Labels& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += logistic_loss(f[i], y[i]);
    return s / static_cast<double>(f.size());
}

}  // namespace

Model fit(const Matrix& x, const Labels& y, const Params& params) {
    require(static_cast<Eigen::Index>(y.size()) == x.rows() && !y.empty(), ErrorKind::shape,
            "gboost: label count does not match rows");
    require(params.learning_rate > 0.0, ErrorKind::argument, "gboost: learning_rate must be > 0");
    const auto n = y.size();
    const double p1 = static_cast<double>(std::count(y.begin(), y.end(), 1)) / static_cast<double>(n);
    require(p1 > 0.0 && p1 < 1.0, ErrorKind::argument, "gboost: training data must contain both classes");

    Model m;
    m.base_score = std::log(p1 / (1.0 - p1));
    m.learning_rate = params.learning_rate;
    std::vector<double> f(n, m.base_score), grad(n), hess(n);
    m.training_loss.push_back(mean_loss(f, y));

    tree::RegressionParams rp{params.max_depth, params.lambda};
    for (std::size_t round = 0; round < params.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(f[i]);
            grad[i] = p - y[i];
            hess[i] = p * (1.0 - p);
        }
        m.trees.push_back(tree::fit_newton_tree(x, grad, hess, rp));
        const auto& t = m.trees.back();
        for (std::size_t i = 0; i < n; ++i)
            f[i] += params.learning_rate * t.evaluate(x.data() + static_cast<Eigen::Index>(i) * x.cols());
        m.training_loss.push_back(mean_loss(f, y));
    }
    return m;
}

Vector decision_values(const Model& model, const Matrix& samples) {
    Vector out(samples.rows());
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        double f = model.base_score;
        for (const auto& t : model.trees) f += model.learning_rate * t.evaluate(samples.data() + r * samples.cols());
        out(r) = f;
    }
    return out;
}

Labels predict(const Model& model, const Matrix& samples) {
    const Vector f = decision_values(model, samples);
    Labels out;
    for (Eigen::Index i = 0; i < f.size(); ++i) out.push_back(sigmoid(f(i)) >= 0.5 ? 1 : 0);
    return out;
}

}  // namespace gboost

// ---------------------------------------------------------------- svc

namespace svc {

double kernel_value(const Params& params, std::span<const double> a, std::span<const double> b) {
    const auto& k = kernels::active();
    if (params.kernel == Kernel::linear) return k.dot(a.data(), b.data(), a.size());
    return std::exp(-params.gamma * k.squared_distance(a.data(), b.data(), a.size()));
}

Model fit(const Matrix& x, const Labels& labels, const Params& params, const DualTrace& trace) {
    check_training_set(x, labels, "svc");
    require(params.c > 0.0, ErrorKind::argument, "svc: C must be > 0");
    require(params.kernel == Kernel::linear || params.gamma > 0.0, ErrorKind::argument, "svc: gamma must be > 0");
    const auto n = static_cast<std::size_t>(x.rows());
    const double c = params.c;

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;

    // Q_ij = y_i y_j K(x_i, x_j)
    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = y[i] * y[j] * kernel_value(params, row_of(x, static_cast<Eigen::Index>(i)),
                                                        row_of(x, static_cast<Eigen::Index>(j)));
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 0.5 a'Qa - e'a
    auto dual_objective = [&] {
        double f = 0.0;
        for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (grad[t] - 1.0);
        return -0.5 * f;
    };
    auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0); };
    auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c); };

    constexpr double tau = 1e-12;
    Model model;
    model.params = params;
    model.converged = false;
    std::size_t iter = 0;
    for (; iter < params.max_iter; ++iter) {
        std::size_t i = n, j = n;
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(t) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i == n || j == n || gmax - gmin <= params.tol) {
            model.converged = true;
            break;
        }

        const double qii = q[i * n + i], qjj = q[j * n + j], qij = q[i * n + j];
        const double old_i = alpha[i], old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0) quad = tau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0) quad = tau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q[t * n + i] * di + q[t * n + j] * dj;
        if (trace) trace(iter, dual_objective());
    }
    model.iterations = iter;

    // Offset: average over free vectors, else midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    model.bias = -rho;

    std::size_t n_sv = 0;
    for (double a : alpha) n_sv += a > 0 ? 1 : 0;
    model.support.resize(static_cast<Eigen::Index>(n_sv), x.cols());
    for (std::size_t t = 0, s = 0; t < n; ++t) {
        if (alpha[t] <= 0) continue;
        model.support.row(static_cast<Eigen::Index>(s++)) = x.row(static_cast<Eigen::Index>(t));
        model.coef.push_back(alpha[t] * y[t]);
    }
    model.alpha = std::move(alpha);
    return model;
}

Vector decision_values(const Model& model, const Matrix& samples) {
    require(model.support.rows() == 0 || samples.cols() == model.support.cols(), ErrorKind::shape,
            "svc: sample dimension mismatch");
    Vector out(samples.rows());
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        double f = model.bias;
        for (Eigen::Index s = 0; s < model.support.rows(); ++s)
            f += model.coef[static_cast<std::size_t>(s)] * kernel_value(model.params, row_of(model.support, s), row_of(samples, r));
        out(r) = f;
    }
    return out;
}

Labels predict(const Model& model, const Matrix& samples) {
    const Vector f = decision_values(model, samples);
    Labels out;
    for (Eigen::Index i = 0; i < f.size(); ++i) out.push_back(f(i) >= 0.0 ? 1 : 0);
    return out;
}

}  // namespace svc
}  // namespace rcbench
