#include "rcbench/anova.hpp"

#include "rcbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace rcbench {

FScoreReport anova_f_scores(const FeatureTable& table) {
    const std::size_t n = table.rows();
    std::vector<Label> classes(table.labels.begin(), table.labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const std::size_t k = classes.size();
    require(k >= 2, ErrorKind::argument, "anova: need at least two classes");
    require(n > k, ErrorKind::argument, "anova: need more rows than classes (N > K)");

    std::vector<std::size_t> group(n);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t r = 0; r < n; ++r) {
        group[r] = static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), table.labels[r]) - classes.begin());
        ++counts[group[r]];
    }

    FScoreReport report;
    report.feature_names = table.feature_names;
    for (std::size_t c = 0; c < table.cols(); ++c) {
        GroupStats gs;
        gs.counts = counts;
        gs.groups = k;
        gs.total = n;
        // Sums run over sorted values so the result does not depend on row order.
        std::vector<std::vector<double>> members(k);
        for (std::size_t r = 0; r < n; ++r) members[group[r]].push_back(table.values(r, c));
        std::vector<double> all;
        all.reserve(n);
        gs.group_means.assign(k, 0.0);
        for (std::size_t g = 0; g < k; ++g) {
            std::sort(members[g].begin(), members[g].end());
            double sum = 0.0;
            for (double v : members[g]) sum += v;
            // A constant group keeps its value exactly, so its within-group spread is exactly zero.
            gs.group_means[g] =
                members[g].front() == members[g].back() ? members[g].front() : sum / static_cast<double>(counts[g]);
            all.insert(all.end(), members[g].begin(), members[g].end());
        }
        std::sort(all.begin(), all.end());
        double total_sum = 0.0;
        for (double v : all) total_sum += v;
        gs.overall_mean = all.front() == all.back() ? all.front() : total_sum / static_cast<double>(n);

        double between = 0.0;
        for (std::size_t g = 0; g < k; ++g) {
            const double d = gs.group_means[g] - gs.overall_mean;
            between += static_cast<double>(counts[g]) * d * d;
        }
        between /= static_cast<double>(k - 1);

        double within = 0.0;
        for (std::size_t g = 0; g < k; ++g) {
            for (double v : members[g]) {
                const double d = v - gs.group_means[g];
                within += d * d;
            }
        }
        within /= static_cast<double>(n - k);

        double f = 0.0;
        bool degenerate = false;
        if (within > 0.0) {
            f = between / within;
        } else if (between > 0.0) {
            f = std::numeric_limits<double>::infinity();
        } else {
            degenerate = true;
        }
        report.f_values.push_back(f);
        report.degenerate.push_back(degenerate);
        report.group_stats.push_back(std::move(gs));
    }
    return report;
}

IndexList select_top_k(const FScoreReport& report, std::size_t k) {
    const std::size_t d = report.f_values.size();
    require(k >= 1 && k <= d, ErrorKind::argument,
            "select_top_k: k = " + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
    IndexList order(d);
    std::iota(order.begin(), order.end(), 0);
    // +inf compares greater than every finite value, so it ranks first.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.f_values[a] > report.f_values[b];
    });
    order.resize(k);
    return order;
}

Matrix project(const Matrix& values, const IndexList& indices) {
    std::set<std::size_t> seen;
    for (auto i : indices) {
        require(i < static_cast<std::size_t>(values.cols()), ErrorKind::argument,
                "project: column index " + std::to_string(i) + " out of range");
        require(seen.insert(i).second, ErrorKind::argument,
                "project: duplicate column index " + std::to_string(i));
    }
    Matrix out(values.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = values.col(static_cast<Eigen::Index>(indices[j]));
    }
    return out;
}

FeatureTable project(const FeatureTable& table, const IndexList& indices) {
    FeatureTable out;
    out.values = project(table.values, indices);
    for (auto i : indices) out.feature_names.push_back(table.feature_names[i]);
    out.labels = table.labels;
    out.row_ids = table.row_ids;
    return out;
}

}  // namespace rcbench
