#pragma once

#include "rcbench/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcbench {

/// Dense samples x features table with binary labels (0 = healthy, 1 = PD).
struct FeatureTable {
    Matrix values;
    std::vector<std::string> feature_names;
    Labels labels;
    std::vector<std::string> row_ids;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

    /// Throws on any broken invariant (shape, finiteness, label range).
    void validate() const;

    std::size_t count_label(Label label) const;

    bool operator==(const FeatureTable& other) const;
};

/// The 22 voice measures of the UCI parkinsons table, in file order.
const std::vector<std::string>& uci_feature_names();

struct CsvSchema {
    std::string id_column = "name";
    std::string label_column = "status";
    /// Required feature columns; empty means every other column is a feature.
    std::vector<std::string> features = uci_feature_names();
    /// Reject columns that are neither id, label nor a required feature.
    bool reject_extra = true;
};

FeatureTable load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
FeatureTable parse_csv(std::istream& in, const CsvSchema& schema = {}, const std::string& source = "<stream>");

/// Canonical form: id column, features in table order, label column; %.17g numbers.
void write_csv(const FeatureTable& table, std::ostream& out, const CsvSchema& schema = {});
void write_csv(const FeatureTable& table, const std::filesystem::path& path, const CsvSchema& schema = {});

FeatureTable subset_rows(const FeatureTable& table, const IndexList& rows);

struct Scaler {
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<bool> constant;

    std::size_t size() const { return means.size(); }
    bool operator==(const Scaler&) const = default;
};

/// Population statistics (divisor N) over the given rows only.
Scaler fit_scaler(const FeatureTable& table, const IndexList& rows);
FeatureTable apply_scaler(const Scaler& scaler, const FeatureTable& table);
Matrix apply_scaler(const Scaler& scaler, const Matrix& values);

struct TrialSplit {
    IndexList train_indices;
    IndexList test_indices;
    std::uint64_t seed = 0;

    bool operator==(const TrialSplit&) const = default;
};

/// Test side holds round(test_fraction * N) rows. Stratified mode allocates
/// the test rows per class by largest remainder and keeps at least one row
/// of each class on each side.
TrialSplit split(const FeatureTable& table, double test_fraction, std::uint64_t seed, bool stratified = true);

}  // namespace rcbench
