#pragma once

// Glue between the classifiers and the experiment: a uniform fit/predict
// interface per method, the scale -> select -> fit pipeline, and stratified
// cross-validation used as the tuning objective.

#include "rcbench/anova.hpp"
#include "rcbench/data.hpp"
#include "rcbench/esn.hpp"
#include "rcbench/hyperopt.hpp"
#include "rcbench/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rcbench {

enum class Method { esn, rf, knn, svc, xgb, dt };

const char* to_string(Method method);
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

/// Search space over the tunable keys of each method.
hyperopt::HyperSpace default_space(Method method);
struct ModelOptions {
    /// Non-tuned ESN settings; the tuned keys are overwritten from the point.
    esn::HyperParams esn;
};

/// Untuned settings; always a member of default_space(method). The ESN bias
/// entry follows options.esn.include_bias.
hyperopt::HyperPoint default_point(Method method, const ModelOptions& options = {});

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual Labels predict(const Matrix& samples) const = 0;
    /// Hash of every fitted parameter.
    virtual std::uint64_t fingerprint() const = 0;
};

std::unique_ptr<Classifier> fit_classifier(Method method, const hyperopt::HyperPoint& point, const Matrix& x,
                                           const Labels& y, std::uint64_t seed, const ModelOptions& options = {});

struct PipelineSpec {
    Method method = Method::esn;
    std::size_t k_features = 4;
    /// Columns chosen outside the pipeline (global selection); otherwise
    /// ANOVA runs on the training rows.
    std::optional<IndexList> fixed_selection;
    ModelOptions options;
};

struct FittedPipeline {
    Scaler scaler;
    IndexList selected;
    std::unique_ptr<Classifier> model;

    Labels predict(const FeatureTable& table, const IndexList& rows) const;
    std::uint64_t fingerprint() const;
};

/// Fits scaler, feature selection and classifier on train_rows only.
FittedPipeline fit_pipeline(const PipelineSpec& spec, const hyperopt::HyperPoint& point, const FeatureTable& table,
                            const IndexList& train_rows, std::uint64_t seed);

/// Row positions of each of k stratified folds (sorted), deterministic in seed.
std::vector<IndexList> stratified_folds(const Labels& labels, std::size_t k, std::uint64_t seed);

using FoldFitPredict = std::function<Labels(const FeatureTable& table, const IndexList& train_rows,
                                            const IndexList& test_rows, std::uint64_t seed)>;

/// Mean held-out accuracy over stratified folds. Throws an argument error if
/// some fold's training part lacks a class.
double cross_validate(const FeatureTable& table, std::size_t folds, std::uint64_t seed, const FoldFitPredict& fit_predict);

/// Cross-validated accuracy of the full pipeline at one hyperparameter point.
double cv_objective(const PipelineSpec& spec, const hyperopt::HyperPoint& point, const FeatureTable& train,
                    std::size_t folds, std::uint64_t seed);

struct TuneSettings {
    std::size_t budget = 40;
    std::size_t folds = 5;
    hyperopt::ProposeOptions propose;
};

/// Bayesian optimisation of cv_objective, default point evaluated first.
hyperopt::TuneResult tune_pipeline(const PipelineSpec& spec, const hyperopt::HyperSpace& space,
                                   const FeatureTable& train, const TuneSettings& settings, std::uint64_t seed);

}  // namespace rcbench
