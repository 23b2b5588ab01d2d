#include "rcbench/pipeline.hpp"

#include "rcbench/baselines.hpp"
#include "rcbench/error.hpp"
#include "rcbench/hash.hpp"
#include "rcbench/rng.hpp"

#include <algorithm>
#include <cmath>

namespace rcbench {

using hyperopt::Dimension;
using hyperopt::HyperPoint;
using hyperopt::HyperSpace;

const char* to_string(Method method) {
    switch (method) {
        case Method::esn: return "esn";
        case Method::rf: return "rf";
        case Method::knn: return "knn";
        case Method::svc: return "svc";
        case Method::xgb: return "xgb";
        case Method::dt: return "dt";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    for (Method m : all_methods())
        if (name == to_string(m)) return m;
    fail(ErrorKind::argument, "unknown method '" + name + "' (expected esn, rf, knn, svc, xgb or dt)");
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {Method::esn, Method::rf, Method::knn,
                                                Method::svc, Method::xgb, Method::dt};
    return methods;
}

HyperSpace default_space(Method method) {
    HyperSpace s;
    switch (method) {
        case Method::esn:
            s.dimensions = {Dimension::integer("reservoir_size", 50, 300),
                            Dimension::real("spectral_radius", 0.1, 1.5),
                            Dimension::real("leaking_rate", 0.05, 1.0),
                            Dimension::log_real("ridge", 1e-8, 1e1),
                            Dimension::categorical("bias", {"off", "on"})};
            break;
        case Method::knn:
            s.dimensions = {Dimension::integer("k", 1, 25)};
            break;
        case Method::dt:
            s.dimensions = {Dimension::integer("max_depth", 1, 12), Dimension::integer("min_samples_split", 2, 20)};
            break;
        case Method::rf:
            s.dimensions = {Dimension::integer("trees", 50, 400), Dimension::integer("max_depth", 2, 12)};
            break;
        case Method::xgb:
            s.dimensions = {Dimension::integer("rounds", 20, 300), Dimension::integer("max_depth", 1, 4),
                            Dimension::log_real("learning_rate", 0.01, 0.5)};
            break;
        case Method::svc:
            s.dimensions = {Dimension::log_real("c", 1e-2, 1e3), Dimension::log_real("gamma", 1e-3, 1e1),
                            Dimension::categorical("kernel", {"rbf", "linear"})};
            break;
    }
    return s;
}

HyperPoint default_point(Method method, const ModelOptions& options) {
    HyperPoint p;
    switch (method) {
        case Method::esn: {
            esn::HyperParams h;
            p.values = {{"reservoir_size", static_cast<double>(h.reservoir_size)},
                        {"spectral_radius", h.spectral_radius},
                        {"leaking_rate", h.leaking_rate},
                        {"ridge", h.ridge},
                        {"bias", options.esn.include_bias ? 1.0 : 0.0}};
            break;
        }
        case Method::knn:
            p.values = {{"k", 5}};
            break;
        case Method::dt:
            p.values = {{"max_depth", 10}, {"min_samples_split", 2}};
            break;
        case Method::rf:
            p.values = {{"trees", 100}, {"max_depth", 10}};
            break;
        case Method::xgb:
            p.values = {{"rounds", 100}, {"max_depth", 3}, {"learning_rate", 0.1}};
            break;
        case Method::svc:
            p.values = {{"c", 1.0}, {"gamma", 0.1}, {"kernel", 0}};
            break;
    }
    return p;
}

namespace {

std::size_t as_count(double v) { return static_cast<std::size_t>(std::llround(v)); }

void add_tree(Fingerprint& fp, const tree::Tree& t) {
    fp.add(static_cast<std::uint64_t>(t.nodes.size()));
    for (const auto& n : t.nodes) {
        fp.add(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.feature)));
        fp.add(n.threshold);
        fp.add(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.left)));
        fp.add(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.right)));
        fp.add(n.value);
    }
}

void add_matrix(Fingerprint& fp, const Matrix& m) {
    fp.add(static_cast<std::uint64_t>(m.rows()));
    fp.add(static_cast<std::uint64_t>(m.cols()));
    fp.add(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

void add_labels(Fingerprint& fp, const Labels& y) {
    for (Label l : y) fp.add(static_cast<std::uint64_t>(l));
}

class EsnClassifier final : public Classifier {
public:
    explicit EsnClassifier(esn::Model m) : model_(std::move(m)) {}
    Labels predict(const Matrix& samples) const override { return esn::predict(model_, samples); }
    std::uint64_t fingerprint() const override { return model_.fingerprint(); }

private:
    esn::Model model_;
};

class KnnClassifier final : public Classifier {
public:
    explicit KnnClassifier(knn::Model m) : model_(std::move(m)) {}
    Labels predict(const Matrix& samples) const override { return knn::predict(model_, samples); }
    std::uint64_t fingerprint() const override {
        Fingerprint fp;
        fp.add(std::string_view("knn"));
        fp.add(static_cast<std::uint64_t>(model_.k));
        add_matrix(fp, model_.train);
        add_labels(fp, model_.labels);
        return fp.value();
    }

private:
    knn::Model model_;
};

class TreeClassifier final : public Classifier {
public:
    explicit TreeClassifier(dtree::Model m) : model_(std::move(m)) {}
    Labels predict(const Matrix& samples) const override { return dtree::predict(model_, samples); }
    std::uint64_t fingerprint() const override {
        Fingerprint fp;
        fp.add(std::string_view("dt"));
        add_tree(fp, model_.tree);
        return fp.value();
    }

private:
    dtree::Model model_;
};

class ForestClassifier final : public Classifier {
public:
    explicit ForestClassifier(rforest::Model m) : model_(std::move(m)) {}
    Labels predict(const Matrix& samples) const override { return rforest::predict(model_, samples); }
    std::uint64_t fingerprint() const override {
        Fingerprint fp;
        fp.add(std::string_view("rf"));
        for (const auto& t : model_.trees) add_tree(fp, t);
        return fp.value();
    }

private:
    rforest::Model model_;
};

class BoostClassifier final : public Classifier {
public:
    explicit BoostClassifier(gboost::Model m) : model_(std::move(m)) {}
    Labels predict(const Matrix& samples) const override { return gboost::predict(model_, samples); }
    std::uint64_t fingerprint() const override {
        Fingerprint fp;
        fp.add(std::string_view("xgb"));
        fp.add(model_.base_score);
        fp.add(model_.learning_rate);
        for (const auto& t : model_.trees) add_tree(fp, t);
        return fp.value();
    }

private:
    gboost::Model model_;
};

class SvcClassifier final : public Classifier {
public:
    explicit SvcClassifier(svc::Model m) : model_(std::move(m)) {}
    Labels predict(const Matrix& samples) const override { return svc::predict(model_, samples); }
    std::uint64_t fingerprint() const override {
        Fingerprint fp;
        fp.add(std::string_view("svc"));
        add_matrix(fp, model_.support);
        fp.add(std::span<const double>(model_.coef));
        fp.add(model_.bias);
        return fp.value();
    }

private:
    svc::Model model_;
};

}  // namespace

std::unique_ptr<Classifier> fit_classifier(Method method, const HyperPoint& point, const Matrix& x, const Labels& y,
                                           std::uint64_t seed, const ModelOptions& options) {
    switch (method) {
        case Method::esn: {
            esn::HyperParams h = options.esn;
            h.reservoir_size = as_count(point.at("reservoir_size"));
            h.spectral_radius = point.at("spectral_radius");
            h.leaking_rate = point.at("leaking_rate");
            h.ridge = point.at("ridge");
            // Spaces without a bias dimension keep the configured flag.
            h.include_bias = point.get("bias", h.include_bias ? 1.0 : 0.0) != 0.0;
            return std::make_unique<EsnClassifier>(esn::fit(x, y, h, seed));
        }
        case Method::knn: {
            // k larger than the training set degrades to a full-set vote.
            std::size_t k = std::min(as_count(point.at("k")), static_cast<std::size_t>(x.rows()));
            return std::make_unique<KnnClassifier>(knn::fit(x, y, k));
        }
        case Method::dt: {
            tree::CartParams p;
            p.max_depth = as_count(point.at("max_depth"));
            p.min_samples_split = as_count(point.at("min_samples_split"));
            return std::make_unique<TreeClassifier>(dtree::fit(x, y, p));
        }
        case Method::rf: {
            rforest::Params p;
            p.trees = as_count(point.at("trees"));
            p.max_depth = as_count(point.at("max_depth"));
            return std::make_unique<ForestClassifier>(rforest::fit(x, y, p, seed));
        }
        case Method::xgb: {
            gboost::Params p;
            p.rounds = as_count(point.at("rounds"));
            p.max_depth = as_count(point.at("max_depth"));
            p.learning_rate = point.at("learning_rate");
            return std::make_unique<BoostClassifier>(gboost::fit(x, y, p));
        }
        case Method::svc: {
            svc::Params p;
            p.c = point.at("c");
            p.gamma = point.at("gamma");
            p.kernel = as_count(point.at("kernel")) == 0 ? svc::Kernel::rbf : svc::Kernel::linear;
            return std::make_unique<SvcClassifier>(svc::fit(x, y, p));
        }
    }
    fail(ErrorKind::argument, "unknown method");
}

Labels FittedPipeline::predict(const FeatureTable& table, const IndexList& rows) const {
    Matrix raw = subset_rows(table, rows).values;
    return model->predict(project(apply_scaler(scaler, raw), selected));
}

std::uint64_t FittedPipeline::fingerprint() const {
    Fingerprint fp;
    fp.add(std::span<const double>(scaler.means));
    fp.add(std::span<const double>(scaler.stds));
    for (std::size_t i : selected) fp.add(static_cast<std::uint64_t>(i));
    fp.add(model ? model->fingerprint() : 0);
    return fp.value();
}

FittedPipeline fit_pipeline(const PipelineSpec& spec, const HyperPoint& point, const FeatureTable& table,
                            const IndexList& train_rows, std::uint64_t seed) {
    FeatureTable train = subset_rows(table, train_rows);
    FittedPipeline out;
    IndexList all(train.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    out.scaler = fit_scaler(train, all);
    if (spec.fixed_selection) {
        out.selected = *spec.fixed_selection;
    } else {
        out.selected = select_top_k(anova_f_scores(train), spec.k_features);
    }
    Matrix x = project(apply_scaler(out.scaler, train.values), out.selected);
    out.model = fit_classifier(spec.method, point, x, train.labels, seed, spec.options);
    return out;
}

std::vector<IndexList> stratified_folds(const Labels& labels, std::size_t k, std::uint64_t seed) {
    require(k >= 2, ErrorKind::argument, "cross-validation needs at least 2 folds");
    require(labels.size() >= k, ErrorKind::argument, "fewer rows than cross-validation folds");
    Rng rng(derive_seed(seed, "cv.folds"));
    std::vector<IndexList> folds(k);
    std::size_t next = 0;
    for (Label c : {0, 1}) {
        IndexList members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) members.push_back(i);
        rng.shuffle(members);
        // Deal round-robin, continuing across classes so fold sizes differ by at most one.
        for (std::size_t i : members) folds[next++ % k].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

double cross_validate(const FeatureTable& table, std::size_t folds, std::uint64_t seed,
                      const FoldFitPredict& fit_predict) {
    auto parts = stratified_folds(table.labels, folds, seed);
    double total = 0.0;
    for (std::size_t f = 0; f < parts.size(); ++f) {
        const IndexList& test = parts[f];
        require(!test.empty(), ErrorKind::argument, "cross-validation fold is empty");
        IndexList train;
        std::size_t ones = 0;
        for (std::size_t g = 0; g < parts.size(); ++g) {
            if (g == f) continue;
            for (std::size_t i : parts[g]) {
                train.push_back(i);
                ones += table.labels[i] == 1;
            }
        }
        std::sort(train.begin(), train.end());
        require(ones > 0 && ones < train.size(), ErrorKind::argument,
                "cross-validation fold " + std::to_string(f) + " trains on a single class; too few rows for " +
                    std::to_string(folds) + " folds");
        Labels predicted = fit_predict(table, train, test, derive_seed(seed, "cv.model", f));
        require(predicted.size() == test.size(), ErrorKind::shape, "fold prediction count mismatch");
        std::size_t correct = 0;
        for (std::size_t i = 0; i < test.size(); ++i) correct += predicted[i] == table.labels[test[i]];
        total += static_cast<double>(correct) / static_cast<double>(test.size());
    }
    return total / static_cast<double>(parts.size());
}

double cv_objective(const PipelineSpec& spec, const HyperPoint& point, const FeatureTable& train, std::size_t folds,
                    std::uint64_t seed) {
    return cross_validate(train, folds, seed,
                          [&](const FeatureTable& t, const IndexList& tr, const IndexList& te, std::uint64_t s) {
                              return fit_pipeline(spec, point, t, tr, s).predict(t, te);
                          });
}

hyperopt::TuneResult tune_pipeline(const PipelineSpec& spec, const HyperSpace& space, const FeatureTable& train,
                                   const TuneSettings& settings, std::uint64_t seed) {
    const std::uint64_t cv_seed = derive_seed(seed, "tune.cv");
    auto objective = [&](const HyperPoint& p) { return cv_objective(spec, p, train, settings.folds, cv_seed); };
    std::optional<HyperPoint> start;
    HyperPoint def = default_point(spec.method, spec.options);
    if (hyperopt::contains(space, def)) start = def;
    return hyperopt::tune(objective, space, settings.budget, seed, start, settings.propose);
}

}  // namespace rcbench
