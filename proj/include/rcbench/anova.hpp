#pragma once

#include "rcbench/data.hpp"

#include <string>
#include <vector>

namespace rcbench {

struct GroupStats {
    std::vector<std::size_t> counts;       // n_i per class
    std::vector<double> group_means;       // per-class mean
    double overall_mean = 0.0;
    std::size_t groups = 0;                // K
    std::size_t total = 0;                 // N
};

/// One-way ANOVA F-values per feature, grouped by class label.
struct FScoreReport {
    std::vector<std::string> feature_names;
    std::vector<double> f_values;          // >= 0, may be +inf
    std::vector<bool> degenerate;          // 0/0 case, reported as F = 0
    std::vector<GroupStats> group_stats;
};

FScoreReport anova_f_scores(const FeatureTable& table);

/// Indices of the k largest F-values, F-descending, ties by ascending column.
IndexList select_top_k(const FScoreReport& report, std::size_t k);

/// Keep only the named columns in the given order.
FeatureTable project(const FeatureTable& table, const IndexList& indices);
Matrix project(const Matrix& values, const IndexList& indices);

}  // namespace rcbench
