#include <doctest.h>

#include "oracles.hpp"
#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"
#include "rcbench/tree.hpp"

#include <cmath>
#include <numeric>

using namespace rcbench;
using namespace rcbench::tree;

namespace {

struct Sample {
    Matrix x;
    Labels y;
};

// Coarse grid values so that duplicate feature values and score ties occur.
Sample random_sample(Rng& rng, std::size_t n, std::size_t d) {
    Sample s{Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)), Labels(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double lean = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            s.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::round(rng.uniform(-5, 5) * 2) / 2;
            lean += s.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        s.y[i] = rng.bernoulli(lean > 0 ? 0.75 : 0.3) ? 1 : 0;
    }
    return s;
}

IndexList iota_list(std::size_t n) {
    IndexList v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

void check_against_oracle(const Matrix& x, const Labels& y, const IndexList& rows, const IndexList& features) {
    const auto got = best_gini_split(x, y, rows, features);
    const auto want = oracle::best_split_scan(x, y, rows, features);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) return;
    CHECK(got->feature == want->feature);
    CHECK(got->threshold == want->threshold);
    // score = n * (1 - weighted gini)
    const double n = static_cast<double>(rows.size());
    CHECK(got->score == doctest::Approx(n * (1.0 - want->weighted_gini)).epsilon(1e-12));
}

// Rows reaching each node, by replaying the training rows through the tree.
std::vector<IndexList> node_rows(const Tree& t, const Matrix& x, const IndexList& rows) {
    std::vector<IndexList> out(t.nodes.size());
    for (auto r : rows) {
        int i = 0;
        while (true) {
            out[static_cast<std::size_t>(i)].push_back(r);
            const Node& nd = t.nodes[static_cast<std::size_t>(i)];
            if (nd.feature < 0) break;
            i = x(static_cast<Eigen::Index>(r), nd.feature) <= nd.threshold ? nd.left : nd.right;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("gini impurity examples") {
    CHECK(gini_impurity({1, 1, 0, 0}) == doctest::Approx(0.5));
    CHECK(gini_impurity({1, 1, 1, 1}) == 0.0);
    CHECK(gini_impurity({1, 1, 1, 0}) == doctest::Approx(0.375));
    CHECK_THROWS_AS(gini_impurity({}), Error);
}

TEST_CASE("best split matches an exhaustive scan on random samples") {
    Rng rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t d = 1 + rng.below(4);
        Sample s = random_sample(rng, 50, d);
        check_against_oracle(s.x, s.y, iota_list(50), iota_list(d));
    }
}

TEST_CASE("best split is empty when no feature varies") {
    Matrix x = Matrix::Ones(6, 2);
    Labels y{0, 1, 0, 1, 0, 1};
    CHECK_FALSE(best_gini_split(x, y, iota_list(6), {0, 1}).has_value());
}

TEST_CASE("every internal node of a fitted tree takes the oracle split") {
    Rng rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        Sample s = random_sample(rng, 50, 3);
        const IndexList rows = iota_list(50);
        Tree t = fit_cart(s.x, s.y, rows, CartParams{6, 2, 0}, 1, nullptr);
        const auto reach = node_rows(t, s.x, rows);
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            const Node& nd = t.nodes[i];
            CHECK(nd.count == reach[i].size());
            if (nd.feature < 0) continue;
            const auto want = oracle::best_split_scan(s.x, s.y, reach[i], iota_list(3));
            REQUIRE(want.has_value());
            CHECK(static_cast<std::size_t>(nd.feature) == want->feature);
            CHECK(nd.threshold == want->threshold);
        }
    }
}

TEST_CASE("cart stopping rules") {
    Rng rng(5);
    Sample s = random_sample(rng, 40, 2);
    const IndexList rows = iota_list(40);
    const std::size_t ones = static_cast<std::size_t>(std::count(s.y.begin(), s.y.end(), 1));

    SUBCASE("depth 0 is the majority leaf") {
        Tree t = fit_cart(s.x, s.y, rows, CartParams{0, 2, 0}, 1, nullptr);
        REQUIRE(t.nodes.size() == 1);
        CHECK(t.nodes[0].value == (ones * 2 >= 40 ? 1.0 : 0.0));
    }
    SUBCASE("depth bound holds") {
        for (std::size_t depth : {1u, 2u, 3u}) {
            Tree t = fit_cart(s.x, s.y, rows, CartParams{depth, 2, 0}, 1, nullptr);
            for (const auto& nd : t.nodes) CHECK(nd.depth <= depth);
        }
    }
    SUBCASE("min_samples_split bound holds") {
        Tree t = fit_cart(s.x, s.y, rows, CartParams{20, 15, 0}, 1, nullptr);
        for (const auto& nd : t.nodes)
            if (nd.feature >= 0) CHECK(nd.count >= 15);
    }
    SUBCASE("label tie goes to tie_label") {
        Matrix x(2, 1);
        x << 0, 0;
        Labels y{0, 1};
        CHECK(fit_cart(x, y, {0, 1}, {}, 1, nullptr).nodes[0].value == 1.0);
        CHECK(fit_cart(x, y, {0, 1}, {}, 0, nullptr).nodes[0].value == 0.0);
    }
    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(fit_cart(s.x, s.y, {}, {}, 1, nullptr), Error);
        CHECK_THROWS_AS(fit_cart(s.x, s.y, rows, CartParams{3, 1, 0}, 1, nullptr), Error);
    }
}

TEST_CASE("separable one-dimensional data is fit exactly") {
    Matrix x(10, 1);
    Labels y(10);
    for (int i = 0; i < 10; ++i) {
        x(i, 0) = i;
        y[static_cast<std::size_t>(i)] = i >= 6 ? 1 : 0;
    }
    Tree t = fit_cart(x, y, iota_list(10), {}, 1, nullptr);
    CHECK(t.leaf_count() == 2);
    CHECK(t.nodes[0].threshold == 5.5);
    for (int i = 0; i < 10; ++i) CHECK(t.evaluate(&x(i, 0)) == y[static_cast<std::size_t>(i)]);
}

TEST_CASE("repeated rows count with multiplicity") {
    Matrix x(3, 1);
    x << 0, 1, 2;
    Labels y{0, 1, 1};
    // Row 0 drawn three times outweighs rows 1 and 2 at depth 0.
    Tree t = fit_cart(x, y, {0, 0, 0, 1, 2}, CartParams{0, 2, 0}, 1, nullptr);
    CHECK(t.nodes[0].value == 0.0);
    CHECK(t.nodes[0].count == 5);
}

TEST_CASE("feature subsampling is deterministic for a fixed rng seed") {
    Rng data_rng(11);
    Sample s = random_sample(data_rng, 60, 5);
    Rng a(3), b(3);
    Tree ta = fit_cart(s.x, s.y, iota_list(60), CartParams{4, 2, 2}, 1, &a);
    Tree tb = fit_cart(s.x, s.y, iota_list(60), CartParams{4, 2, 2}, 1, &b);
    REQUIRE(ta.nodes.size() == tb.nodes.size());
    for (std::size_t i = 0; i < ta.nodes.size(); ++i) {
        CHECK(ta.nodes[i].feature == tb.nodes[i].feature);
        CHECK(ta.nodes[i].threshold == tb.nodes[i].threshold);
    }
}

TEST_CASE("newton tree leaf values and split") {
    Matrix x(4, 1);
    x << 0, 1, 2, 3;
    std::vector<double> g{-1, -1, 1, 1};
    std::vector<double> h{1, 1, 1, 1};

    SUBCASE("depth 0 gives -G/(H+lambda)") {
        std::vector<double> g2{-1, -1, -1, 1};
        Tree t = fit_newton_tree(x, g2, h, RegressionParams{0, 1.0});
        REQUIRE(t.nodes.size() == 1);
        CHECK(t.nodes[0].value == doctest::Approx(2.0 / 5.0));
    }
    SUBCASE("depth 1 splits at the gradient sign change") {
        Tree t = fit_newton_tree(x, g, h, RegressionParams{1, 1.0});
        REQUIRE(t.nodes.size() == 3);
        CHECK(t.nodes[0].threshold == 1.5);
        CHECK(t.evaluate(&x(0, 0)) == doctest::Approx(2.0 / 3.0));
        CHECK(t.evaluate(&x(3, 0)) == doctest::Approx(-2.0 / 3.0));
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(fit_newton_tree(x, {1, 2}, {1, 2}, {}), Error);
    }
}
