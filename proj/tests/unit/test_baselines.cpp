#include <doctest.h>

#include "oracles.hpp"
#include "rcbench/baselines.hpp"
#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"
#include "synthetic.hpp"

#include <cmath>
#include <numeric>

using namespace rcbench;

namespace {

double accuracy(const Labels& got, const Labels& want) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < got.size(); ++i) hit += got[i] == want[i] ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(got.size());
}

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

Labels random_labels(Rng& rng, std::size_t n) {
    Labels y(n);
    for (auto& v : y) v = rng.bernoulli(0.6) ? 1 : 0;
    y[0] = 0;
    y[1] = 1;
    return y;
}

struct Xor {
    Matrix x;
    Labels y;
};

Xor xor_grid() {
    Xor d{Matrix(40, 2), Labels(40)};
    Rng rng(1);
    for (Eigen::Index i = 0; i < 40; ++i) {
        const double a = (i % 2 == 0) ? -1.0 : 1.0;
        const double b = ((i / 2) % 2 == 0) ? -1.0 : 1.0;
        d.x(i, 0) = a + 0.1 * rng.uniform(-1, 1);
        d.x(i, 1) = b + 0.1 * rng.uniform(-1, 1);
        d.y[static_cast<std::size_t>(i)] = (a > 0) != (b > 0) ? 1 : 0;
    }
    return d;
}

}  // namespace

TEST_CASE("knn examples") {
    Matrix x(4, 2);
    x << 0, 0, 1, 0, 0, 1, 1, 1;
    Labels y{0, 1, 1, 0};
    const double q1[] = {0.1, 0.0};
    CHECK(knn::predict_one(knn::fit(x, y, 1), q1) == 0);
    // Four-way distance tie: rows 0 and 1 are taken, votes tie, nearest (row 0) decides.
    const double q2[] = {0.5, 0.5};
    CHECK(knn::predict_one(knn::fit(x, y, 2), q2) == 0);
    CHECK_THROWS_AS(knn::fit(x, y, 5), Error);
    CHECK_THROWS_AS(knn::fit(x, y, 0), Error);
    const double bad[] = {0.0};
    CHECK_THROWS_AS(knn::predict_one(knn::fit(x, y, 1), bad), Error);
}

TEST_CASE("knn agrees with an exhaustive scan") {
    Rng rng(31);
    for (int rep = 0; rep < 200; ++rep) {
        const auto n = static_cast<Eigen::Index>(5 + rng.below(40));
        const auto d = static_cast<Eigen::Index>(1 + rng.below(6));
        Matrix x = random_matrix(rng, n, d);
        // Snap to a grid so that distance ties are common.
        x = x.unaryExpr([](double v) { return std::round(v * 2) / 2; });
        Labels y = random_labels(rng, static_cast<std::size_t>(n));
        const std::size_t k = 1 + rng.below(static_cast<std::uint64_t>(n));
        Matrix q = random_matrix(rng, 1, d).unaryExpr([](double v) { return std::round(v * 2) / 2; });
        const auto model = knn::fit(x, y, k);
        CHECK(knn::predict(model, q)[0] == oracle::knn_scan(x, y, q.data(), k));
    }
}

TEST_CASE("decision tree fits separable blobs") {
    auto t = testing::blobs(30, 3, 6.0, 4);
    auto m = dtree::fit(t.values, t.labels, {});
    CHECK(accuracy(dtree::predict(m, t.values), t.labels) == 1.0);
    Labels one_class(t.rows(), 1);
    CHECK_THROWS_AS(dtree::fit(t.values, one_class, {}), Error);
}

TEST_CASE("random forest with one full tree equals the decision tree") {
    auto t = testing::synthetic_table();
    rforest::Params p;
    p.trees = 1;
    p.bootstrap = false;
    p.feature_subsampling = false;
    auto rf = rforest::fit(t.values, t.labels, p, 5);
    auto dt = dtree::fit(t.values, t.labels, tree::CartParams{p.max_depth, p.min_samples_split, 0});
    Rng rng(8);
    Matrix probe = random_matrix(rng, 100, static_cast<Eigen::Index>(t.cols()));
    CHECK(rforest::predict(rf, probe) == dtree::predict(dt, probe));
    CHECK(rforest::predict(rf, t.values) == dtree::predict(dt, t.values));
}

TEST_CASE("random forest is deterministic per seed") {
    auto t = testing::synthetic_table();
    rforest::Params p;
    p.trees = 25;
    auto a = rforest::fit(t.values, t.labels, p, 77);
    auto b = rforest::fit(t.values, t.labels, p, 77);
    auto c = rforest::fit(t.values, t.labels, p, 78);
    Rng rng(9);
    Matrix probe = random_matrix(rng, 200, static_cast<Eigen::Index>(t.cols()));
    CHECK(rforest::predict(a, probe) == rforest::predict(b, probe));
    bool trees_differ = false;
    for (std::size_t i = 0; i < a.trees.size(); ++i)
        trees_differ |= a.trees[i].nodes.size() != c.trees[i].nodes.size() ||
                        a.trees[i].nodes[0].threshold != c.trees[i].nodes[0].threshold;
    CHECK(trees_differ);
    CHECK(accuracy(rforest::predict(a, t.values), t.labels) > 0.9);
}

TEST_CASE("gradient boosting") {
    SUBCASE("zero rounds predicts the majority class") {
        auto t = testing::synthetic_table();
        gboost::Params p;
        p.rounds = 0;
        auto m = gboost::fit(t.values, t.labels, p);
        CHECK(m.base_score == doctest::Approx(std::log(147.0 / 48.0)));
        for (auto v : gboost::predict(m, t.values)) CHECK(v == 1);
        REQUIRE(m.training_loss.size() == 1);
    }
    SUBCASE("training loss does not increase") {
        auto t = testing::synthetic_table();
        gboost::Params p;
        p.rounds = 60;
        p.learning_rate = 0.1;
        auto m = gboost::fit(t.values, t.labels, p);
        REQUIRE(m.training_loss.size() == 61);
        for (std::size_t i = 1; i < m.training_loss.size(); ++i)
            CHECK(m.training_loss[i] <= m.training_loss[i - 1] + 1e-10);
    }
    SUBCASE("depth-2 trees learn XOR") {
        auto d = xor_grid();
        gboost::Params p;
        p.rounds = 50;
        p.max_depth = 2;
        p.learning_rate = 0.3;
        auto m = gboost::fit(d.x, d.y, p);
        CHECK(accuracy(gboost::predict(m, d.x), d.y) == 1.0);
    }
    SUBCASE("bad learning rate") {
        auto d = xor_grid();
        gboost::Params p;
        p.learning_rate = 0.0;
        CHECK_THROWS_AS(gboost::fit(d.x, d.y, p), Error);
    }
}

TEST_CASE("svc separates linear blobs") {
    auto t = testing::blobs(40, 2, 5.0, 12);
    svc::Params p;
    p.kernel = svc::Kernel::linear;
    auto m = svc::fit(t.values, t.labels, p);
    CHECK(m.converged);
    CHECK(accuracy(svc::predict(m, t.values), t.labels) == 1.0);
    CHECK(m.support.rows() == static_cast<Eigen::Index>(m.coef.size()));
    CHECK(m.support.rows() >= 2);
}

TEST_CASE("svc dual objective never decreases") {
    auto t = testing::synthetic_table();
    svc::Params p;
    p.c = 10.0;
    p.gamma = 0.05;
    std::vector<double> trace;
    auto m = svc::fit(t.values, t.labels, p, [&](std::size_t, double obj) { trace.push_back(obj); });
    REQUIRE(trace.size() == m.iterations);
    REQUIRE(!trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-8);
}

TEST_CASE("svc solution satisfies the KKT conditions") {
    for (auto kernel : {svc::Kernel::rbf, svc::Kernel::linear}) {
        for (double c : {0.1, 1.0, 10.0}) {
            auto t = testing::synthetic_table({100, 40, static_cast<std::uint64_t>(c * 10), 0.6});
            IndexList all(t.labels.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            t = apply_scaler(fit_scaler(t, all), t);
            svc::Params p;
            p.kernel = kernel;
            p.c = c;
            p.gamma = 0.05;
            p.tol = 1e-5;
            auto m = svc::fit(t.values, t.labels, p);
            CHECK(m.converged);
            auto rep = oracle::kkt_audit(m, t.values, t.labels, 1e-3);
            INFO(rep.detail);
            CHECK(rep.ok);
        }
    }
}

TEST_CASE("svc kernel values") {
    const double a[] = {1.0, 2.0};
    const double b[] = {0.0, 4.0};
    svc::Params p;
    p.gamma = 0.5;
    CHECK(svc::kernel_value(p, a, b) == doctest::Approx(std::exp(-2.5)));
    p.kernel = svc::Kernel::linear;
    CHECK(svc::kernel_value(p, a, b) == 8.0);
}
