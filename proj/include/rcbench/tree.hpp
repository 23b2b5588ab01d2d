#pragma once

#include "rcbench/types.hpp"

#include <optional>
#include <vector>

namespace rcbench {
class Rng;
}

namespace rcbench::tree {

/// Gini impurity 1 - p0^2 - p1^2 of a binary label multiset.
double gini_impurity(const Labels& labels);

struct Node {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    double value = 0.0;      // leaf label (classification) or leaf score (regression)
    std::size_t count = 0;
    std::size_t depth = 0;
};

struct Tree {
    std::vector<Node> nodes;

    double evaluate(const double* x) const;
    std::size_t leaf_count() const;
};

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    /// Sum over children of (n0^2 + n1^2) / n; larger means lower weighted Gini.
    double score = 0.0;
};

/// Best axis-aligned Gini split over the candidate features. Thresholds are
/// midpoints of consecutive distinct values. Near-equal scores (relative
/// 1e-12) keep the lower feature index, then the lower threshold.
std::optional<Split> best_gini_split(const Matrix& x, const Labels& y, const IndexList& rows,
                                     const IndexList& features);

struct CartParams {
    std::size_t max_depth = 10;
    std::size_t min_samples_split = 2;
    /// Number of features drawn per split; 0 means all features.
    std::size_t max_features = 0;
};

/// CART classifier over the given (possibly repeated) rows. A leaf predicts
/// its majority label; label ties go to tie_label. rng is only used when
/// params.max_features selects a subset.
Tree fit_cart(const Matrix& x, const Labels& y, const IndexList& rows, const CartParams& params,
              Label tie_label, Rng* rng);

struct RegressionParams {
    std::size_t max_depth = 3;
    double lambda = 1.0;  // L2 term in the Newton leaf value
};

/// Second-order regression tree: split gain G_L^2/(H_L+l) + G_R^2/(H_R+l),
/// leaf value -G/(H+l), one Newton step on the summed loss.
Tree fit_newton_tree(const Matrix& x, const std::vector<double>& grad, const std::vector<double>& hess,
                     const RegressionParams& params);

}  // namespace rcbench::tree
