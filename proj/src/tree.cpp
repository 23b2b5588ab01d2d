#include "rcbench/tree.hpp"

#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rcbench::tree {

double gini_impurity(const Labels& labels) {
    require(!labels.empty(), ErrorKind::argument, "gini_impurity: empty label set");
    const double n = static_cast<double>(labels.size());
    const double p1 = static_cast<double>(std::count(labels.begin(), labels.end(), 1)) / n;
    const double p0 = 1.0 - p1;
    return 1.0 - p0 * p0 - p1 * p1;
}

double Tree::evaluate(const double* x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const Node& nd = nodes[static_cast<std::size_t>(i)];
        i = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

std::size_t Tree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.feature < 0; }));
}

namespace {

bool clearly_better(double candidate, double incumbent) {
    return candidate > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent));
}

double midpoint(double lo, double hi) {
    const double mid = lo + 0.5 * (hi - lo);
    // Adjacent doubles: the midpoint may round up to hi; keep hi on the right.
    return mid < hi ? mid : lo;
}

// Rows of `rows` sorted by the value of one feature (stable on input order).
IndexList sorted_by(const Matrix& x, const IndexList& rows, std::size_t feature) {
    IndexList order = rows;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x(a, feature) < x(b, feature);
    });
    return order;
}

}  // namespace

std::optional<Split> best_gini_split(const Matrix& x, const Labels& y, const IndexList& rows,
                                     const IndexList& features) {
    std::optional<Split> best;
    const double n = static_cast<double>(rows.size());
    double total1 = 0.0;
    for (auto r : rows) total1 += y[r];
    const double total0 = n - total1;

    for (auto f : features) {
        const IndexList order = sorted_by(x, rows, f);
        double left0 = 0.0, left1 = 0.0;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            if (y[order[i]] == 1) left1 += 1.0; else left0 += 1.0;
            const double v = x(order[i], f);
            const double next = x(order[i + 1], f);
            if (!(next > v)) continue;
            const double nl = left0 + left1;
            const double nr = n - nl;
            const double right0 = total0 - left0;
            const double right1 = total1 - left1;
            const double score = (left0 * left0 + left1 * left1) / nl + (right0 * right0 + right1 * right1) / nr;
            if (!best || clearly_better(score, best->score)) {
                best = Split{f, midpoint(v, next), score};
            }
        }
    }
    return best;
}

namespace {

struct CartBuilder {
    const Matrix& x;
    const Labels& y;
    const CartParams& params;
    Label tie_label;
    Rng* rng;
    Tree tree;

    IndexList candidate_features() {
        const auto d = static_cast<std::size_t>(x.cols());
        IndexList all(d);
        std::iota(all.begin(), all.end(), 0);
        if (params.max_features == 0 || params.max_features >= d || rng == nullptr) return all;
        // Partial Fisher-Yates draw, then ascending order for stable tie-breaks.
        for (std::size_t i = 0; i < params.max_features; ++i) {
            const std::size_t j = i + rng->below(d - i);
            std::swap(all[i], all[j]);
        }
        all.resize(params.max_features);
        std::sort(all.begin(), all.end());
        return all;
    }

    int build(const IndexList& rows, std::size_t depth) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        std::size_t ones = 0;
        for (auto r : rows) ones += y[r] == 1 ? 1 : 0;
        const std::size_t zeros = rows.size() - ones;
        {
            Node& nd = tree.nodes.back();
            nd.count = rows.size();
            nd.depth = depth;
            nd.value = ones > zeros ? 1.0 : (zeros > ones ? 0.0 : static_cast<double>(tie_label));
        }
        const bool pure = ones == 0 || zeros == 0;
        if (pure || depth >= params.max_depth || rows.size() < params.min_samples_split) return id;

        const auto split = best_gini_split(x, y, rows, candidate_features());
        if (!split) return id;

        IndexList left, right;
        for (auto r : rows) (x(r, split->feature) <= split->threshold ? left : right).push_back(r);
        const int l = build(left, depth + 1);
        const int rr = build(right, depth + 1);
        Node& nd = tree.nodes[static_cast<std::size_t>(id)];
        nd.feature = static_cast<int>(split->feature);
        nd.threshold = split->threshold;
        nd.left = l;
        nd.right = rr;
        return id;
    }
};

struct NewtonBuilder {
    const Matrix& x;
    const std::vector<double>& g;
    const std::vector<double>& h;
    const RegressionParams& params;
    Tree tree;

    double score(double gs, double hs) const { return gs * gs / (hs + params.lambda); }

    int build(const IndexList& rows, std::size_t depth) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        double gsum = 0.0, hsum = 0.0;
        for (auto r : rows) {
            gsum += g[r];
            hsum += h[r];
        }
        tree.nodes.back().count = rows.size();
        tree.nodes.back().depth = depth;
        tree.nodes.back().value = -gsum / (hsum + params.lambda);
        if (depth >= params.max_depth || rows.size() < 2) return id;

        const double parent = score(gsum, hsum);
        bool found = false;
        std::size_t best_f = 0;
        double best_t = 0.0;
        double best_s = 0.0;
        for (std::size_t f = 0; f < static_cast<std::size_t>(x.cols()); ++f) {
            const IndexList order = sorted_by(x, rows, f);
            double gl = 0.0, hl = 0.0;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                gl += g[order[i]];
                hl += h[order[i]];
                const double v = x(order[i], f);
                const double next = x(order[i + 1], f);
                if (!(next > v)) continue;
                const double s = score(gl, hl) + score(gsum - gl, hsum - hl);
                if (!found || clearly_better(s, best_s)) {
                    found = true;
                    best_f = f;
                    best_t = midpoint(v, next);
                    best_s = s;
                }
            }
        }
        // Zero-gain splits are accepted: XOR-like targets need them at the root.
        if (!found || best_s < parent - 1e-12 * std::max(1.0, parent)) return id;

        IndexList left, right;
        for (auto r : rows) (x(r, best_f) <= best_t ? left : right).push_back(r);
        const int l = build(left, depth + 1);
        const int rr = build(right, depth + 1);
        Node& nd = tree.nodes[static_cast<std::size_t>(id)];
        nd.feature = static_cast<int>(best_f);
        nd.threshold = best_t;
        nd.left = l;
        nd.right = rr;
        return id;
    }
};

}  // namespace

Tree fit_cart(const Matrix& x, const Labels& y, const IndexList& rows, const CartParams& params,
              Label tie_label, Rng* rng) {
    require(!rows.empty(), ErrorKind::argument, "cart: no training rows");
    require(params.min_samples_split >= 2, ErrorKind::argument, "cart: min_samples_split must be >= 2");
    CartBuilder b{x, y, params, tie_label, rng, {}};
    b.build(rows, 0);
    return std::move(b.tree);
}

Tree fit_newton_tree(const Matrix& x, const std::vector<double>& grad, const std::vector<double>& hess,
                     const RegressionParams& params) {
    require(!grad.empty() && grad.size() == hess.size() && grad.size() == static_cast<std::size_t>(x.rows()),
            ErrorKind::shape, "newton tree: gradient/hessian length mismatch");
    IndexList rows(grad.size());
    std::iota(rows.begin(), rows.end(), 0);
    NewtonBuilder b{x, grad, hess, params, {}};
    b.build(rows, 0);
    return std::move(b.tree);
}

}  // namespace rcbench::tree
