#pragma once

// Comparison classifiers: k-nearest neighbours, CART decision tree, random
// forest, second-order gradient boosting and an SMO-trained SVM. All expect
// standardized inputs and labels in {0, 1}.

#include "rcbench/tree.hpp"
#include "rcbench/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rcbench::knn {

struct Model {
    Matrix train;
    Labels labels;
    std::size_t k = 5;
};

Model fit(const Matrix& x, const Labels& y, std::size_t k);

/// Majority of the k nearest rows (Euclidean). Distance ties go to the lower
/// row index; vote ties go to the label of the single nearest neighbour.
Label predict_one(const Model& model, std::span<const double> query);
Labels predict(const Model& model, const Matrix& samples);

}  // namespace rcbench::knn

namespace rcbench::dtree {

struct Model {
    tree::Tree tree;
    Label prior_majority = 1;
};

Model fit(const Matrix& x, const Labels& y, const tree::CartParams& params);
Labels predict(const Model& model, const Matrix& samples);

}  // namespace rcbench::dtree

namespace rcbench::rforest {

struct Params {
    std::size_t trees = 100;
    std::size_t max_depth = 10;
    std::size_t min_samples_split = 2;
    bool bootstrap = true;
    /// Draw ceil(sqrt(d)) eligible features per split.
    bool feature_subsampling = true;
};

struct Model {
    std::vector<tree::Tree> trees;
    Label prior_majority = 1;
};

/// Tree b uses a seed derived from (seed, b), so the ensemble is deterministic.
Model fit(const Matrix& x, const Labels& y, const Params& params, std::uint64_t seed);
Labels predict(const Model& model, const Matrix& samples);

}  // namespace rcbench::rforest

namespace rcbench::gboost {

struct Params {
    std::size_t rounds = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    double lambda = 1.0;
};

struct Model {
    double base_score = 0.0;  // log-odds of the training prior
    double learning_rate = 0.1;
    std::vector<tree::Tree> trees;
    /// Mean logistic loss on the training rows: entry 0 is the prior-only
    /// model, entry m is after m rounds.
    std::vector<double> training_loss;
};

Model fit(const Matrix& x, const Labels& y, const Params& params);
Vector decision_values(const Model& model, const Matrix& samples);
/// Label 1 iff sigmoid(F(x)) >= 0.5.
Labels predict(const Model& model, const Matrix& samples);

}  // namespace rcbench::gboost

namespace rcbench::svc {

enum class Kernel { rbf, linear };

struct Params {
    double c = 1.0;
    double gamma = 0.1;
    Kernel kernel = Kernel::rbf;
    double tol = 1e-3;
    std::size_t max_iter = 100000;
};

struct Model {
    Matrix support;          // support vectors (rows)
    std::vector<double> coef;  // alpha_i * y_i
    double bias = 0.0;
    Params params;
    bool converged = true;
    std::size_t iterations = 0;
    /// Full dual solution over the training rows, kept for auditing.
    std::vector<double> alpha;
};

double kernel_value(const Params& params, std::span<const double> a, std::span<const double> b);

/// Observer called after every pair update with the current dual objective.
using DualTrace = std::function<void(std::size_t iteration, double dual_objective)>;

/// Soft-margin SVM dual solved by SMO with maximal-violating-pair selection;
/// stops once the KKT gap is <= params.tol or max_iter is hit (converged = false).
Model fit(const Matrix& x, const Labels& y, const Params& params, const DualTrace& trace = {});
Vector decision_values(const Model& model, const Matrix& samples);
/// Label 1 when the decision value is >= 0.
Labels predict(const Model& model, const Matrix& samples);

}  // namespace rcbench::svc
