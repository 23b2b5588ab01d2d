#include <doctest.h>

#include "oracles.hpp"
#include "rcbench/anova.hpp"
#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"
#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace rcbench;

namespace {

FeatureTable two_groups(std::vector<double> g0, std::vector<double> g1) {
    FeatureTable t;
    std::size_t n = g0.size() + g1.size();
    t.values = Matrix(static_cast<Eigen::Index>(n), 1);
    std::size_t r = 0;
    for (double v : g0) {
        t.values(static_cast<Eigen::Index>(r++), 0) = v;
        t.labels.push_back(0);
    }
    for (double v : g1) {
        t.values(static_cast<Eigen::Index>(r++), 0) = v;
        t.labels.push_back(1);
    }
    for (std::size_t i = 0; i < n; ++i) t.row_ids.push_back(std::to_string(i));
    t.feature_names = {"x"};
    return t;
}

FScoreReport scores(std::vector<double> f) {
    FScoreReport r;
    for (std::size_t i = 0; i < f.size(); ++i) r.feature_names.push_back("f" + std::to_string(i));
    r.f_values = std::move(f);
    r.degenerate.assign(r.f_values.size(), false);
    return r;
}

}  // namespace

TEST_CASE("F-value examples") {
    auto r = anova_f_scores(two_groups({0, 1}, {2, 3}));
    CHECK(r.f_values[0] == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(r.group_stats[0].counts == std::vector<std::size_t>{2, 2});
    CHECK(r.group_stats[0].overall_mean == 1.5);

    auto zero = anova_f_scores(two_groups({0, 2}, {-1, 3}));
    CHECK(zero.f_values[0] == 0.0);
    CHECK_FALSE(zero.degenerate[0]);

    auto inf = anova_f_scores(two_groups({0, 0}, {1, 1}));
    CHECK(std::isinf(inf.f_values[0]));

    auto flat = anova_f_scores(two_groups({4, 4}, {4, 4, 4}));
    CHECK(flat.f_values[0] == 0.0);
    CHECK(flat.degenerate[0]);
}

TEST_CASE("anova rejects single-class and N <= K tables") {
    CHECK_THROWS_AS(anova_f_scores(two_groups({1, 2, 3}, {})), Error);
    CHECK_THROWS_AS(anova_f_scores(two_groups({1}, {2})), Error);
}

TEST_CASE("F-values match the literal formulas on 1,000 random tables") {
    Rng rng(2024);
    std::size_t infinities = 0, zeros = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::size_t n0 = 1 + rng.below(6), n1 = 1 + rng.below(6);
        if (n0 + n1 < 3) n1 = 2;
        std::size_t d = 1 + rng.below(5);
        FeatureTable t;
        t.values = Matrix(static_cast<Eigen::Index>(n0 + n1), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < n0 + n1; ++i) {
            t.labels.push_back(i < n0 ? 0 : 1);
            t.row_ids.push_back(std::to_string(i));
        }
        for (std::size_t c = 0; c < d; ++c) {
            t.feature_names.push_back("c" + std::to_string(c));
            int style = static_cast<int>(rng.below(4));
            double a = rng.uniform(-5, 5), b = rng.uniform(-5, 5);
            for (std::size_t i = 0; i < n0 + n1; ++i) {
                double v = 0;
                switch (style) {
                    case 0: v = rng.uniform(-10, 10); break;                 // generic
                    case 1: v = static_cast<double>(rng.below(3)); break;     // heavy ties
                    case 2: v = t.labels[i] == 0 ? a : b; break;             // constant per class
                    case 3: v = 7.0; break;                                  // constant column
                }
                t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
            }
        }
        auto got = anova_f_scores(t).f_values;
        auto want = oracle::anova_literal(t);
        for (std::size_t c = 0; c < d; ++c) {
            if (std::isinf(want[c])) {
                ++infinities;
                REQUIRE(std::isinf(got[c]));
            } else {
                if (want[c] == 0) ++zeros;
                REQUIRE(std::abs(got[c] - want[c]) <= 1e-9 * std::max(1.0, std::abs(want[c])));
            }
        }
    }
    CHECK(infinities > 50);
    CHECK(zeros > 50);
}

TEST_CASE("F is invariant to affine maps of a column") {
    FeatureTable t = testing::synthetic_table();
    auto base = anova_f_scores(t);
    FeatureTable u = t;
    Rng rng(4);
    for (Eigen::Index c = 0; c < u.values.cols(); ++c) {
        double a = rng.uniform(0.1, 10.0) * (rng.bernoulli(0.5) ? 1 : -1);
        double b = rng.uniform(-100, 100);
        u.values.col(c) = (a * t.values.col(c).array() + b).matrix();
    }
    auto moved = anova_f_scores(u);
    for (std::size_t c = 0; c < base.f_values.size(); ++c)
        CHECK(std::abs(moved.f_values[c] - base.f_values[c]) <= 1e-9 * base.f_values[c]);
    CHECK(select_top_k(moved, 4) == select_top_k(base, 4));
}

TEST_CASE("row order never changes F-values") {
    FeatureTable t = testing::synthetic_table();
    auto base = anova_f_scores(t);
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        IndexList perm(t.rows());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        rng.shuffle(perm);
        auto shuffled = anova_f_scores(subset_rows(t, perm));
        CHECK(shuffled.f_values == base.f_values);
    }
}

TEST_CASE("select_top_k ordering and ties") {
    CHECK(select_top_k(scores({3, 3, 1}), 1) == IndexList{0});
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(select_top_k(scores({1, inf, 5, inf, 0}), 5) == IndexList{1, 3, 2, 0, 4});
    CHECK_THROWS_AS(select_top_k(scores({1, 2}), 0), Error);
    CHECK_THROWS_AS(select_top_k(scores({1, 2}), 3), Error);

    Rng rng(6);
    for (int rep = 0; rep < 200; ++rep) {
        std::size_t d = 1 + rng.below(22);
        std::vector<double> f(d);
        for (double& v : f) v = static_cast<double>(rng.below(5));
        std::size_t k = 1 + rng.below(d);
        auto idx = select_top_k(scores(f), k);
        REQUIRE(idx.size() == k);
        REQUIRE(std::set<std::size_t>(idx.begin(), idx.end()).size() == k);
        for (std::size_t i = 0; i + 1 < k; ++i) {
            REQUIRE(f[idx[i]] >= f[idx[i + 1]]);
            if (f[idx[i]] == f[idx[i + 1]]) REQUIRE(idx[i] < idx[i + 1]);
        }
    }
}

TEST_CASE("synthetic table ranks its four strongest columns first") {
    FeatureTable t = testing::synthetic_table();
    auto top = select_top_k(anova_f_scores(t), 4);
    std::set<std::string> names;
    for (auto i : top) names.insert(t.feature_names[i]);
    CHECK(names == std::set<std::string>{"MDVP:Fo(Hz)", "spread1", "spread2", "PPE"});
}

TEST_CASE("project keeps rows and reorders columns") {
    FeatureTable t = testing::synthetic_table();
    IndexList all(t.cols());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    CHECK(project(t, all) == t);
    FeatureTable p = project(t, {21, 0, 18, 19});
    CHECK(p.rows() == 195);
    CHECK(p.cols() == 4);
    CHECK(p.labels == t.labels);
    CHECK(p.feature_names[0] == "PPE");
    CHECK(p.values.col(1) == t.values.col(0));
    CHECK_THROWS_AS(project(t, {1, 1}), Error);
    CHECK_THROWS_AS(project(t, {22}), Error);
}
