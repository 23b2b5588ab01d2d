#include "rcbench/bench.hpp"

#include "rcbench/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rcbench {

namespace {

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string pct(const std::optional<double>& v) { return v ? fmt("%.3f", *v) : std::string(); }

std::string pct_fraction(const std::optional<double>& v) { return v ? fmt("%.3f", 100.0 * *v) : std::string(); }

std::string exact(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt("%.17g", v);
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string point_text(Method method, const BenchConfig& config, const hyperopt::HyperPoint& p) {
    auto space = config.space_for(method);
    std::string out;
    for (const auto& [name, value] : p.values) {
        if (!out.empty()) out += ';';
        const hyperopt::Dimension* d = space.find(name);
        out += name + '=' + (d ? hyperopt::format_value(*d, value) : exact(value));
    }
    return out;
}

std::string bin_label(double upper, double width) {
    long hi = std::lround(upper * 100.0);
    long lo = std::lround((upper - width) * 100.0);
    return std::to_string(lo) + "%-" + std::to_string(hi) + "%";
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << contents;
    out.close();
    require(!out.fail(), ErrorKind::io, "failed writing " + path.string());
}

void ensure_writable(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec && std::filesystem::is_directory(dir), ErrorKind::io,
            "output directory " + dir.string() + " cannot be created" + (ec ? ": " + ec.message() : std::string()));
    auto probe = dir / ".rcbench-write-probe";
    {
        std::ofstream out(probe, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorKind::io, "output directory " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

const char* kPalette[] = {"#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93", "#00798c"};

}  // namespace

std::string render_summary_csv(const ReportBundle& bundle) {
    std::ostringstream out;
    out << "method,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,recall_std,"
           "fn_rate_mean,fn_rate_std,trials,undefined_values\n";
    for (const auto& m : bundle.methods) {
        out << to_string(m.method);
        std::size_t undefined = 0;
        for (Metric metric : {Metric::accuracy, Metric::precision, Metric::recall, Metric::fn_rate}) {
            const auto& s = m.summary[metric];
            out << ',' << pct(s.mean) << ',' << pct(s.std);
            undefined += s.excluded;
        }
        out << ',' << m.records.size() << ',' << undefined << '\n';
    }
    return out.str();
}

std::string render_f1_csv(const ReportBundle& bundle) {
    std::ostringstream out;
    out << "method,precision_mean,recall_mean,f1\n";
    for (const auto& m : bundle.methods)
        out << to_string(m.method) << ',' << pct(m.summary[Metric::precision].mean) << ','
            << pct(m.summary[Metric::recall].mean) << ',' << pct(m.f1) << '\n';
    return out.str();
}

std::string render_cdf_csv(const ReportBundle& bundle, Metric metric) {
    require(metric == Metric::accuracy || metric == Metric::fn_rate, ErrorKind::argument,
            "CDF tables exist for accuracy and fn_rate only");
    std::ostringstream out;
    const CdfTable* header = nullptr;
    for (const auto& m : bundle.methods) {
        const CdfTable& t = metric == Metric::accuracy ? m.accuracy_cdf : m.fn_rate_cdf;
        if (!t.upper_edges.empty()) {
            header = &t;
            break;
        }
    }
    out << "method";
    if (header)
        for (double e : header->upper_edges) out << ',' << bin_label(e, header->bin_width);
    out << '\n';
    for (const auto& m : bundle.methods) {
        const CdfTable& t = metric == Metric::accuracy ? m.accuracy_cdf : m.fn_rate_cdf;
        out << to_string(m.method);
        for (double c : t.cumulative) out << ',' << fmt("%.4f", c);
        out << '\n';
    }
    return out.str();
}

std::string render_per_trial_csv(const ReportBundle& bundle) {
    std::ostringstream out;
    out << "method,trial,seed,accuracy,precision,recall,fn_rate,f1,tp,tn,fp,fn,selected_features,"
           "hyperparameters,model_fingerprint\n";
    for (const auto& m : bundle.methods) {
        for (const auto& r : m.records) {
            std::string features;
            for (const auto& f : r.selected_features) features += (features.empty() ? "" : ";") + f;
            out << to_string(r.method) << ',' << r.trial << ',' << r.seed << ',' << pct_fraction(r.metrics.accuracy)
                << ',' << pct_fraction(r.metrics.precision) << ',' << pct_fraction(r.metrics.recall) << ','
                << pct_fraction(r.metrics.fn_rate) << ',' << pct_fraction(r.metrics.f1) << ',' << r.cm.tp << ','
                << r.cm.tn << ',' << r.cm.fp << ',' << r.cm.fn << ",\"" << features << "\",\""
                << point_text(r.method, bundle.config, r.point) << "\"," << hex64(r.model_fingerprint) << '\n';
        }
    }
    return out.str();
}

std::string render_anova_csv(const FScoreReport& report, const IndexList& selected) {
    const std::size_t d = report.f_values.size();
    IndexList order = select_top_k(report, d);
    std::vector<std::size_t> rank(d);
    for (std::size_t r = 0; r < d; ++r) rank[order[r]] = r + 1;
    std::ostringstream out;
    out << "feature,f_value,rank,selected\n";
    for (std::size_t j = 0; j < d; ++j) {
        bool chosen = std::find(selected.begin(), selected.end(), j) != selected.end();
        out << report.feature_names[j] << ',' << exact(report.f_values[j]) << ',' << rank[j] << ','
            << (chosen ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string render_config_json(const BenchConfig& config) {
    nlohmann::ordered_json j;
    j["version"] = kArtifactVersion;
    j["data"] = config.data_path.generic_string();
    std::vector<std::string> methods;
    for (Method m : config.methods) methods.emplace_back(to_string(m));
    j["methods"] = methods;
    j["trials"] = config.trials;
    j["test_fraction"] = config.test_fraction;
    j["k_features"] = config.k_features;
    j["selection"] = to_string(config.selection);
    j["tune_mode"] = to_string(config.tune_mode);
    j["tune_budget"] = config.tune_budget;
    j["cv_folds"] = config.cv_folds;
    j["seed"] = config.base_seed;
    j["stratified"] = config.stratified;
    j["reservoir_seed"] = to_string(config.reservoir_seed);
    j["esn"] = {
        {"mode", config.esn.mode == esn::EncodeMode::sequence ? "sequence" : "per-sample"},
        {"encode_steps", config.esn.encode_steps},
        {"washout", config.esn.washout},
        {"include_bias", config.esn.include_bias},
        {"input_scaling", config.esn.input_scaling},
        {"sparsity", config.esn.sparsity},
    };
    nlohmann::ordered_json spaces = nlohmann::ordered_json::object();
    for (Method m : config.methods) {
        nlohmann::ordered_json dims = nlohmann::ordered_json::array();
        for (const auto& d : config.space_for(m).dimensions) {
            nlohmann::ordered_json e;
            e["name"] = d.name;
            switch (d.kind) {
                case hyperopt::Kind::real: e["kind"] = "real"; break;
                case hyperopt::Kind::log_real: e["kind"] = "log-real"; break;
                case hyperopt::Kind::integer: e["kind"] = "integer"; break;
                case hyperopt::Kind::categorical: e["kind"] = "categorical"; break;
            }
            if (d.kind == hyperopt::Kind::categorical) {
                e["categories"] = d.categories;
            } else {
                e["lower"] = d.lower;
                e["upper"] = d.upper;
            }
            dims.push_back(e);
        }
        spaces[to_string(m)] = dims;
    }
    j["spaces"] = spaces;
    return j.dump(2) + "\n";
}

std::string render_tuning_csv(const hyperopt::HyperSpace& space, const hyperopt::TuneHistory& history) {
    std::ostringstream out;
    out << "eval_index";
    for (const auto& d : space.dimensions) out << ',' << d.name;
    out << ",cv_accuracy,best_so_far\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        out << i;
        for (const auto& d : space.dimensions) out << ',' << hyperopt::format_value(d, history.points[i].at(d.name));
        out << ',' << exact(history.objectives[i]) << ',' << exact(history.best_so_far[i]) << '\n';
    }
    return out.str();
}

std::string render_density_svg(const ReportBundle& bundle, Metric metric) {
    require(metric == Metric::accuracy || metric == Metric::fn_rate, ErrorKind::argument,
            "density plots exist for accuracy and fn_rate only");
    const double width = 720, height = 420, left = 60, right = 160, top = 30, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    const double bin = 2.0;  // percent

    // Axis range: the occupied part of [0, 100] padded to whole bins.
    double lo = 100.0, hi = 0.0;
    std::vector<std::vector<double>> values;
    for (const auto& m : bundle.methods) {
        std::vector<double> v;
        for (const auto& r : m.records) {
            auto x = get(r.metrics, metric);
            if (x) v.push_back(100.0 * *x);
        }
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        values.push_back(std::move(v));
    }
    if (lo > hi) {
        lo = 0.0;
        hi = 100.0;
    }
    lo = std::max(0.0, std::floor(lo / bin) * bin - bin);
    hi = std::min(100.0, std::ceil(hi / bin) * bin + bin);
    if (hi <= lo) hi = lo + bin;

    // Histogram densities per method (fraction per percent), shared y scale with the KDE.
    std::size_t nbins = static_cast<std::size_t>(std::lround((hi - lo) / bin));
    std::vector<std::vector<double>> hist(values.size(), std::vector<double>(nbins, 0.0));
    double ymax = 0.0;
    for (std::size_t m = 0; m < values.size(); ++m) {
        for (double x : values[m]) {
            auto b = static_cast<std::size_t>(std::clamp(std::ceil((x - lo) / bin) - 1.0, 0.0, double(nbins - 1)));
            hist[m][b] += 1.0;
        }
        for (double& h : hist[m]) {
            h /= std::max<std::size_t>(1, values[m].size()) * bin;
            ymax = std::max(ymax, h);
        }
        const auto& curve = metric == Metric::accuracy ? bundle.methods[m].accuracy_density
                                                       : bundle.methods[m].fn_rate_density;
        if (curve)
            for (double d : curve->density) ymax = std::max(ymax, d);
    }
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.05;

    auto sx = [&](double x) { return left + (x - lo) / (hi - lo) * pw; };
    auto sy = [&](double y) { return top + ph - y / ymax * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const char* title = metric == Metric::accuracy ? "Accuracy (%)" : "False negative rate (%)";
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">" << title
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << top + ph / 2 << ")\">Density</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    double tick = (hi - lo) > 40 ? 10.0 : 4.0;
    for (double t = std::ceil(lo / tick) * tick; t <= hi + 1e-9; t += tick) {
        out << "<line x1=\"" << fmt("%.2f", sx(t)) << "\" y1=\"" << top + ph << "\" x2=\"" << fmt("%.2f", sx(t))
            << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt("%.2f", sx(t)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
            << fmt("%.0f", t) << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        double y = ymax * k / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << fmt("%.2f", sy(y) + 4) << "\" text-anchor=\"end\">"
            << fmt("%.3f", y) << "</text>\n";
    }

    for (std::size_t m = 0; m < values.size(); ++m) {
        const char* color = kPalette[m % std::size(kPalette)];
        const auto& method = bundle.methods[m];
        out << "<g fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"" << color << "\" stroke-opacity=\"0.5\">\n";
        for (std::size_t b = 0; b < nbins; ++b) {
            if (hist[m][b] <= 0.0) continue;
            double x0 = lo + b * bin;
            out << "<rect x=\"" << fmt("%.2f", sx(x0)) << "\" y=\"" << fmt("%.2f", sy(hist[m][b])) << "\" width=\""
                << fmt("%.2f", sx(x0 + bin) - sx(x0)) << "\" height=\"" << fmt("%.2f", sy(0) - sy(hist[m][b]))
                << "\"/>\n";
        }
        out << "</g>\n";
        const auto& curve = metric == Metric::accuracy ? method.accuracy_density : method.fn_rate_density;
        if (curve) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
            for (std::size_t i = 0; i < curve->x.size(); ++i) {
                double x = std::clamp(curve->x[i], lo, hi);
                out << (i ? " " : "") << fmt("%.2f", sx(x)) << ',' << fmt("%.2f", sy(curve->density[i]));
            }
            out << "\"/>\n";
        }
        double ly = top + 14 + 18.0 * m;
        out << "<rect x=\"" << left + pw + 16 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"12\" fill=\""
            << color << "\"/>\n";
        out << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly + 1 << "\">" << to_string(method.method)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::vector<std::filesystem::path> emit_reports(const ReportBundle& bundle, const std::filesystem::path& dir) {
    ensure_writable(dir);
    // Render everything first so a rendering failure leaves no partial output.
    std::vector<std::pair<std::string, std::string>> files = {
        {"summary.csv", render_summary_csv(bundle)},
        {"f1.csv", render_f1_csv(bundle)},
        {"acc_cdf.csv", render_cdf_csv(bundle, Metric::accuracy)},
        {"fn_cdf.csv", render_cdf_csv(bundle, Metric::fn_rate)},
        {"per_trial.csv", render_per_trial_csv(bundle)},
        {"anova_scores.csv", render_anova_csv(bundle.anova, bundle.anova_selected)},
        {"config.json", render_config_json(bundle.config)},
    };
    for (const auto& m : bundle.methods)
        files.emplace_back(std::string("tuning_") + to_string(m.method) + ".csv",
                           render_tuning_csv(bundle.config.space_for(m.method), m.tuning.history));
    files.emplace_back("density_accuracy.svg", render_density_svg(bundle, Metric::accuracy));
    files.emplace_back("density_fn_rate.svg", render_density_svg(bundle, Metric::fn_rate));

    std::vector<std::filesystem::path> manifest;
    for (const auto& [name, contents] : files) {
        write_file(dir / name, contents);
        manifest.push_back(dir / name);
    }
    return manifest;
}

std::filesystem::path emit_anova(const FScoreReport& report, const IndexList& selected,
                                 const std::filesystem::path& dir) {
    ensure_writable(dir);
    auto path = dir / "anova_scores.csv";
    write_file(path, render_anova_csv(report, selected));
    return path;
}

std::filesystem::path emit_tuning(Method method, const hyperopt::HyperSpace& space,
                                  const hyperopt::TuneHistory& history, const std::filesystem::path& dir) {
    ensure_writable(dir);
    auto path = dir / (std::string("tuning_") + to_string(method) + ".csv");
    write_file(path, render_tuning_csv(space, history));
    return path;
}

}  // namespace rcbench
