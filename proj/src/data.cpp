#include "rcbench/data.hpp"

#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace rcbench {

const std::vector<std::string>& uci_feature_names() {
    static const std::vector<std::string> names{
        "MDVP:Fo(Hz)",    "MDVP:Fhi(Hz)",     "MDVP:Flo(Hz)", "MDVP:Jitter(%)", "MDVP:Jitter(Abs)",
        "MDVP:RAP",       "MDVP:PPQ",         "Jitter:DDP",   "MDVP:Shimmer",   "MDVP:Shimmer(dB)",
        "Shimmer:APQ3",   "Shimmer:APQ5",     "MDVP:APQ",     "Shimmer:DDA",    "NHR",
        "HNR",            "RPDE",             "DFA",          "spread1",        "spread2",
        "D2",             "PPE"};
    return names;
}

void FeatureTable::validate() const {
    require(labels.size() == rows() && row_ids.size() == rows(), ErrorKind::shape,
            "feature table: row count mismatch between values, labels and ids");
    require(feature_names.size() == cols(), ErrorKind::shape,
            "feature table: column count does not match feature names");
    require(values.allFinite(), ErrorKind::parse, "feature table: non-finite value");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] == 0 || labels[i] == 1, ErrorKind::label,
                "feature table: label at row " + std::to_string(i) + " is not 0 or 1");
    }
}

bool FeatureTable::operator==(const FeatureTable& other) const {
    return values.rows() == other.values.rows() && values.cols() == other.values.cols() &&
           values == other.values && feature_names == other.feature_names && labels == other.labels &&
           row_ids == other.row_ids;
}

std::size_t FeatureTable::count_label(Label label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

FeatureTable parse_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::schema, source + ": missing header row");
    const auto header = split_fields(line);

    std::map<std::string, std::size_t> position;
    for (std::size_t c = 0; c < header.size(); ++c) {
        require(position.emplace(header[c], c).second, ErrorKind::schema,
                source + ": duplicate column '" + header[c] + "'");
    }
    auto column = [&](const std::string& name) {
        auto it = position.find(name);
        require(it != position.end(), ErrorKind::schema, source + ": missing column '" + name + "'");
        return it->second;
    };
    const std::size_t id_col = column(schema.id_column);
    const std::size_t label_col = column(schema.label_column);

    // Features keep the order in which they appear in the header.
    std::vector<std::size_t> feature_cols;
    if (schema.features.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c != id_col && c != label_col) feature_cols.push_back(c);
        }
    } else {
        for (const auto& f : schema.features) column(f);
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == id_col || c == label_col) continue;
            const bool known = std::find(schema.features.begin(), schema.features.end(), header[c]) !=
                               schema.features.end();
            if (known) {
                feature_cols.push_back(c);
            } else {
                require(!schema.reject_extra, ErrorKind::schema,
                        source + ": unexpected column '" + header[c] + "'");
            }
        }
    }

    FeatureTable table;
    for (auto c : feature_cols) table.feature_names.push_back(header[c]);

    std::vector<double> cells;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        require(fields.size() == header.size(), ErrorKind::parse,
                source + ": row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                    " fields, expected " + std::to_string(header.size()));
        double status = 0.0;
        require(parse_double(fields[label_col], status), ErrorKind::label,
                source + ": row " + std::to_string(line_no) + ": non-numeric label '" + fields[label_col] + "'");
        require(status == 0.0 || status == 1.0, ErrorKind::label,
                source + ": row " + std::to_string(line_no) + ": label '" + fields[label_col] +
                    "' is not 0 or 1");
        for (auto c : feature_cols) {
            double v = 0.0;
            require(parse_double(fields[c], v) && std::isfinite(v), ErrorKind::parse,
                    source + ": row " + std::to_string(line_no) + ", column '" + header[c] +
                        "': invalid number '" + fields[c] + "'");
            cells.push_back(v);
        }
        table.labels.push_back(static_cast<Label>(status));
        table.row_ids.push_back(fields[id_col]);
    }

    const auto n_rows = static_cast<Eigen::Index>(table.labels.size());
    const auto n_cols = static_cast<Eigen::Index>(feature_cols.size());
    table.values = Eigen::Map<const Matrix>(cells.data(), n_rows, n_cols);
    return table;
}

FeatureTable load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io, "cannot open '" + path.string() + "'");
    return parse_csv(in, schema, path.string());
}

void write_csv(const FeatureTable& table, std::ostream& out, const CsvSchema& schema) {
    out << schema.id_column;
    for (const auto& f : table.feature_names) out << ',' << f;
    out << ',' << schema.label_column << '\n';
    char buf[64];
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out << table.row_ids[r];
        for (std::size_t c = 0; c < table.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", table.values(r, c));
            out << ',' << buf;
        }
        out << ',' << table.labels[r] << '\n';
    }
}

void write_csv(const FeatureTable& table, const std::filesystem::path& path, const CsvSchema& schema) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::io, "cannot write '" + path.string() + "'");
    write_csv(table, out, schema);
}

FeatureTable subset_rows(const FeatureTable& table, const IndexList& rows) {
    FeatureTable out;
    out.feature_names = table.feature_names;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), table.values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        require(rows[i] < table.rows(), ErrorKind::argument, "row index out of range");
        out.values.row(static_cast<Eigen::Index>(i)) = table.values.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(table.labels[rows[i]]);
        out.row_ids.push_back(table.row_ids[rows[i]]);
    }
    return out;
}

Scaler fit_scaler(const FeatureTable& table, const IndexList& rows) {
    require(!rows.empty(), ErrorKind::argument, "fit_scaler: empty row list");
    const std::size_t d = table.cols();
    Scaler s;
    s.means.assign(d, 0.0);
    s.stds.assign(d, 1.0);
    s.constant.assign(d, false);
    const double n = static_cast<double>(rows.size());
    for (std::size_t c = 0; c < d; ++c) {
        double sum = 0.0;
        for (auto r : rows) {
            require(r < table.rows(), ErrorKind::argument, "fit_scaler: row index out of range");
            sum += table.values(r, c);
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (auto r : rows) {
            const double dv = table.values(r, c) - mean;
            ss += dv * dv;
        }
        const double sd = std::sqrt(ss / n);
        s.means[c] = mean;
        // Relative test so that large-magnitude constant columns are caught too.
        if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
            s.constant[c] = true;
            s.stds[c] = 1.0;
        } else {
            s.stds[c] = sd;
        }
    }
    return s;
}

Matrix apply_scaler(const Scaler& scaler, const Matrix& values) {
    require(static_cast<std::size_t>(values.cols()) == scaler.size(), ErrorKind::shape,
            "apply_scaler: table has " + std::to_string(values.cols()) + " columns, scaler expects " +
                std::to_string(scaler.size()));
    Matrix out(values.rows(), values.cols());
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            out(r, c) = (values(r, c) - scaler.means[c]) / scaler.stds[c];
        }
    }
    return out;
}

FeatureTable apply_scaler(const Scaler& scaler, const FeatureTable& table) {
    FeatureTable out = table;
    out.values = apply_scaler(scaler, table.values);
    return out;
}

TrialSplit split(const FeatureTable& table, double test_fraction, std::uint64_t seed, bool stratified) {
    require(test_fraction > 0.0 && test_fraction < 1.0, ErrorKind::argument,
            "split: test_fraction must lie in (0, 1)");
    const std::size_t n = table.rows();
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    require(n_test >= 1 && n_test < n, ErrorKind::argument,
            "split: test_fraction " + std::to_string(test_fraction) + " leaves an empty side for " +
                std::to_string(n) + " rows");

    std::array<IndexList, 2> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[table.labels[i] == 1 ? 1 : 0].push_back(i);
    require(by_class[0].size() >= 2 && by_class[1].size() >= 2, ErrorKind::argument,
            "split: each class needs at least two rows");

    Rng rng(derive_seed(seed, "split"));
    TrialSplit out;
    out.seed = seed;

    if (stratified) {
        std::array<std::size_t, 2> quota{};
        std::array<double, 2> remainder{};
        std::size_t assigned = 0;
        for (int c = 0; c < 2; ++c) {
            const double exact = static_cast<double>(n_test) * static_cast<double>(by_class[c].size()) /
                                 static_cast<double>(n);
            quota[c] = static_cast<std::size_t>(std::floor(exact));
            remainder[c] = exact - std::floor(exact);
            assigned += quota[c];
        }
        // Largest remainder; ties go to class 0.
        while (assigned < n_test) {
            const int c = remainder[1] > remainder[0] ? 1 : 0;
            ++quota[c];
            remainder[c] = -1.0;
            ++assigned;
        }
        for (int c = 0; c < 2; ++c) {
            quota[c] = std::clamp<std::size_t>(quota[c], 1, by_class[c].size() - 1);
        }
        for (int c = 0; c < 2; ++c) {
            IndexList idx = by_class[c];
            rng.shuffle(idx);
            out.test_indices.insert(out.test_indices.end(), idx.begin(), idx.begin() + quota[c]);
            out.train_indices.insert(out.train_indices.end(), idx.begin() + quota[c], idx.end());
        }
    } else {
        IndexList idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        rng.shuffle(idx);
        out.test_indices.assign(idx.begin(), idx.begin() + n_test);
        out.train_indices.assign(idx.begin() + n_test, idx.end());
    }
    std::sort(out.train_indices.begin(), out.train_indices.end());
    std::sort(out.test_indices.begin(), out.test_indices.end());
    return out;
}

}  // namespace rcbench
