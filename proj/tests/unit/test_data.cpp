#include <doctest.h>

#include "rcbench/data.hpp"
#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"
#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

using namespace rcbench;

namespace {

std::string header_line(const std::vector<std::string>& cols) {
    std::string out;
    for (const auto& c : cols) out += (out.empty() ? "" : ",") + c;
    return out + "\n";
}

std::string tiny_csv(const std::string& status_row2 = "0") {
    std::vector<std::string> cols{"name"};
    for (const auto& f : uci_feature_names()) cols.push_back(f);
    cols.push_back("status");
    std::string out = header_line(cols);
    for (int r = 0; r < 3; ++r) {
        out += "rec" + std::to_string(r);
        for (int c = 0; c < 22; ++c) out += "," + std::to_string(r * 100 + c) + ".5";
        out += "," + (r == 2 ? status_row2 : std::to_string(r % 2)) + "\n";
    }
    return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::argument;
}

FeatureTable column_table(std::vector<double> col, Labels labels) {
    FeatureTable t;
    t.values = Matrix(static_cast<Eigen::Index>(col.size()), 1);
    for (std::size_t i = 0; i < col.size(); ++i) {
        t.values(static_cast<Eigen::Index>(i), 0) = col[i];
        t.row_ids.push_back("r" + std::to_string(i));
    }
    t.feature_names = {"x"};
    t.labels = std::move(labels);
    return t;
}

}  // namespace

TEST_CASE("parse_csv reads the UCI layout") {
    std::istringstream in(tiny_csv());
    FeatureTable t = parse_csv(in);
    CHECK(t.rows() == 3);
    CHECK(t.cols() == 22);
    CHECK(t.feature_names == uci_feature_names());
    CHECK(t.labels == Labels{0, 1, 0});
    CHECK(t.row_ids[1] == "rec1");
    CHECK(t.values(2, 3) == 203.5);
    t.validate();
}

TEST_CASE("column order is free and features keep header order") {
    std::vector<std::string> cols{"status"};
    auto names = uci_feature_names();
    std::reverse(names.begin(), names.end());
    for (const auto& f : names) cols.push_back(f);
    cols.push_back("name");
    std::string text = header_line(cols);
    text += "1";
    for (int c = 0; c < 22; ++c) text += "," + std::to_string(c);
    text += ",a\n";
    std::istringstream in(text);
    FeatureTable t = parse_csv(in);
    CHECK(t.feature_names == names);
    CHECK(t.values(0, 0) == 0.0);
    CHECK(t.labels == Labels{1});
}

TEST_CASE("schema, parse and label errors name the culprit") {
    SUBCASE("status 2") {
        std::istringstream in(tiny_csv("2"));
        try {
            parse_csv(in);
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::label);
            CHECK(std::string(e.what()).find("row 4") != std::string::npos);
        }
    }
    SUBCASE("missing column") {
        std::string text = tiny_csv();
        auto pos = text.find("PPE");
        text.replace(pos, 3, "XYZ");
        std::istringstream in(text);
        try {
            parse_csv(in);
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::schema);
            CHECK(std::string(e.what()).find("PPE") != std::string::npos);
        }
    }
    SUBCASE("extra column") {
        std::string text = tiny_csv();
        text.insert(text.find('\n'), ",extra");
        std::istringstream in(text);
        CHECK(kind_of([&] { parse_csv(in); }) == ErrorKind::schema);
    }
    SUBCASE("non-numeric cell") {
        std::string text = tiny_csv();
        auto pos = text.find("100.5");
        text.replace(pos, 5, "abc");
        std::istringstream in(text);
        try {
            parse_csv(in);
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::parse);
            CHECK(std::string(e.what()).find("MDVP:Fo(Hz)") != std::string::npos);
        }
    }
    SUBCASE("non-finite cell") {
        std::string text = tiny_csv();
        text.replace(text.find("100.5"), 5, "inf");
        std::istringstream in(text);
        CHECK(kind_of([&] { parse_csv(in); }) == ErrorKind::parse);
    }
    SUBCASE("missing file") {
        CHECK(kind_of([] { load_csv("/nonexistent/parkinsons.data"); }) == ErrorKind::io);
    }
}

TEST_CASE("canonical CSV round-trips bit for bit") {
    FeatureTable t = testing::synthetic_table();
    auto path = std::filesystem::temp_directory_path() / "rcbench_roundtrip.csv";
    write_csv(t, path);
    FeatureTable back = load_csv(path);
    std::filesystem::remove(path);
    CHECK(back == t);
}

TEST_CASE("fit_scaler examples") {
    FeatureTable t = column_table({1, 2, 3}, {0, 1, 1});
    Scaler s = fit_scaler(t, {0, 1, 2});
    CHECK(s.means[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.stds[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    CHECK_FALSE(s.constant[0]);

    FeatureTable c = column_table({5, 5, 5}, {0, 1, 1});
    Scaler sc = fit_scaler(c, {0, 1, 2});
    CHECK(sc.means[0] == 5.0);
    CHECK(sc.stds[0] == 1.0);
    CHECK(sc.constant[0]);
    FeatureTable shifted = apply_scaler(sc, column_table({7, 5, 4}, {0, 1, 1}));
    CHECK(shifted.values(0, 0) == 2.0);
    CHECK(shifted.values(2, 0) == -1.0);

    CHECK(kind_of([&] { fit_scaler(t, {}); }) == ErrorKind::argument);

    Scaler unit{{2.0}, {1.0}, {false}};
    CHECK(apply_scaler(unit, column_table({2}, {1})).values(0, 0) == 0.0);
    FeatureTable wide = testing::synthetic_table();
    CHECK(kind_of([&] { apply_scaler(unit, wide); }) == ErrorKind::shape);
}

TEST_CASE("scaling the fit rows standardises every column") {
    FeatureTable t = testing::synthetic_table();
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        IndexList rows;
        for (std::size_t i = 0; i < t.rows(); ++i)
            if (rng.bernoulli(0.7)) rows.push_back(i);
        Scaler s = fit_scaler(t, rows);
        Matrix z = apply_scaler(s, subset_rows(t, rows).values);
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            double mean = z.col(c).mean();
            double var = (z.col(c).array() - mean).square().mean();
            CHECK(std::abs(mean) < 1e-9);
            CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("standardisation is affine-consistent") {
    FeatureTable t = testing::synthetic_table();
    FeatureTable u = t;
    const double a = 3.7, b = -125.0;
    u.values = (a * t.values.array() + b).matrix();
    IndexList all(t.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Matrix zt = apply_scaler(fit_scaler(t, all), t.values);
    Matrix zu = apply_scaler(fit_scaler(u, all), u.values);
    CHECK((zt - zu).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("split sizes and stratification on a 147/48 table") {
    FeatureTable t = testing::synthetic_table();
    REQUIRE(t.rows() == 195);
    TrialSplit s = split(t, 0.2, 42, true);
    CHECK(s.test_indices.size() == 39);
    CHECK(s.train_indices.size() == 156);
    std::size_t ones = 0;
    for (std::size_t i : s.test_indices) ones += t.labels[i];
    CHECK((ones == 29 || ones == 30));
    CHECK((s.test_indices.size() - ones == 9 || s.test_indices.size() - ones == 10));
    CHECK(split(t, 0.2, 42, true) == s);
    CHECK(split(t, 0.2, 43, true) != s);
}

TEST_CASE("split partitions the rows for 10,000 seeds") {
    FeatureTable t = testing::synthetic_table({60, 25, 1});
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        bool strat = seed % 2 == 0;
        TrialSplit s = split(t, 0.2, seed, strat);
        REQUIRE(s.test_indices.size() == 17);
        std::vector<int> seen(t.rows(), 0);
        for (std::size_t i : s.train_indices) ++seen[i];
        for (std::size_t i : s.test_indices) ++seen[i];
        REQUIRE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
        if (strat) {
            std::size_t ones = 0;
            for (std::size_t i : s.test_indices) ones += t.labels[i];
            REQUIRE(ones >= 1);
            REQUIRE(ones < s.test_indices.size());
        }
    }
}

TEST_CASE("split rejects fractions that empty a side") {
    FeatureTable t = testing::synthetic_table({3, 3, 1});
    CHECK(kind_of([&] { split(t, 0.01, 1); }) == ErrorKind::argument);
    CHECK(kind_of([&] { split(t, 0.99, 1); }) == ErrorKind::argument);
    CHECK(kind_of([&] { split(t, 1.0, 1); }) == ErrorKind::argument);
}
