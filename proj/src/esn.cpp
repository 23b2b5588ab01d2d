#include "rcbench/esn.hpp"

#include "rcbench/error.hpp"
#include "rcbench/hash.hpp"
#include "rcbench/kernels.hpp"
#include "rcbench/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace rcbench::esn {

void HyperParams::validate() const {
    require(reservoir_size >= 1, ErrorKind::argument, "esn: reservoir_size must be >= 1");
    require(spectral_radius > 0.0, ErrorKind::argument, "esn: spectral_radius must be > 0");
    require(leaking_rate > 0.0 && leaking_rate <= 1.0, ErrorKind::argument,
            "esn: leaking_rate must lie in (0, 1]");
    require(ridge >= 0.0, ErrorKind::argument, "esn: ridge must be >= 0");
    require(input_scaling > 0.0, ErrorKind::argument, "esn: input_scaling must be > 0");
    require(sparsity > 0.0 && sparsity <= 1.0, ErrorKind::argument, "esn: sparsity must lie in (0, 1]");
    require(encode_steps >= 1, ErrorKind::argument, "esn: encode_steps must be >= 1");
}

PowerIteration power_iteration(const Matrix& m, double tol, std::size_t max_iter) {
    require(m.rows() == m.cols(), ErrorKind::shape, "spectral_radius: matrix is not square");
    const auto n = static_cast<std::size_t>(m.rows());
    PowerIteration out;
    if (n == 0) {
        out.converged = true;
        return out;
    }
    const auto& k = kernels::active();
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> w(n);
    double prev = -1.0;
    int stable = 0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        k.gemv(m.data(), n, n, n, v.data(), w.data());
        const double norm = std::sqrt(k.dot(w.data(), w.data(), n));
        out.iterations = it;
        if (norm == 0.0) {
            // The iterate hit the null space; this proves nothing about the
            // other eigenvalues, so leave it unconverged.
            out.radius = 0.0;
            return out;
        }
        // Relative eigen-residual |M v - lambda v| / |lambda| of the previous
        // iterate, with lambda = +-norm; a stable norm alone can hide a
        // direction that is still rotating (complex or near-tied pairs).
        const double sign = k.dot(v.data(), w.data(), n) < 0.0 ? -1.0 : 1.0;
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = w[i] / norm;
            residual += (next - sign * v[i]) * (next - sign * v[i]);
            v[i] = next;
        }
        residual = std::sqrt(residual);
        out.radius = norm;
        if (std::abs(norm - prev) <= tol * norm && residual <= 1e-8) {
            if (++stable >= 2) {
                out.converged = true;
                return out;
            }
        } else {
            stable = 0;
        }
        prev = norm;
    }
    return out;
}

double spectral_radius(const Matrix& m) {
    require(m.rows() == m.cols(), ErrorKind::shape, "spectral_radius: matrix is not square");
    require(m.allFinite(), ErrorKind::argument, "spectral_radius: non-finite entry");
    if (m.rows() == 0) return 0.0;
    // Real dominant eigenvalues converge quickly; anything slower than this
    // is treated as a stall.
    const auto pi = power_iteration(m, 1e-10, 2000);
    if (pi.converged) return pi.radius;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(m), false);
    require(solver.info() == Eigen::Success, ErrorKind::init, "spectral_radius: eigensolver failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Reservoir init_reservoir(const HyperParams& hyper, std::size_t n_inputs, std::uint64_t seed) {
    hyper.validate();
    require(n_inputs >= 1, ErrorKind::argument, "esn: n_inputs must be >= 1");
    const auto nx = static_cast<Eigen::Index>(hyper.reservoir_size);
    const auto nu = static_cast<Eigen::Index>(n_inputs);

    Rng rng(derive_seed(seed, "reservoir"));
    Reservoir res;
    res.hyper = hyper;
    res.seed = seed;
    res.w_in.resize(nx, nu);
    for (Eigen::Index r = 0; r < nx; ++r)
        for (Eigen::Index c = 0; c < nu; ++c) res.w_in(r, c) = rng.uniform(-hyper.input_scaling, hyper.input_scaling);

    res.w.resize(nx, nx);
    for (Eigen::Index r = 0; r < nx; ++r) {
        for (Eigen::Index c = 0; c < nx; ++c) {
            // Always draw both numbers so the stream layout does not depend on sparsity.
            const bool keep = rng.bernoulli(hyper.sparsity);
            const double value = rng.uniform(-1.0, 1.0);
            res.w(r, c) = keep ? value : 0.0;
        }
    }
    const double radius = spectral_radius(res.w);
    require(radius >= 1e-12, ErrorKind::init,
            "esn: recurrent matrix has spectral radius " + std::to_string(radius) +
                " (nilpotent or empty); try another seed or a higher sparsity");
    res.w *= hyper.spectral_radius / radius;
    return res;
}

namespace {

constexpr double kStateBound = 0x1.fffffffffffffp-1;  // largest double below 1

// One leaky-integrator step: x <- (1-a) x + a tanh(drive + W x).
void step(const Reservoir& res, const std::vector<double>& drive, std::vector<double>& x,
          std::vector<double>& scratch) {
    const auto& k = kernels::active();
    const std::size_t n = res.units();
    k.gemv(res.w.data(), n, n, n, x.data(), scratch.data());
    for (std::size_t i = 0; i < n; ++i) {
        // tanh rounds to exactly +-1 for large arguments; keep states inside the open interval.
        scratch[i] = std::clamp(std::tanh(drive[i] + scratch[i]), -kStateBound, kStateBound);
    }
    k.leaky_blend(x.data(), scratch.data(), res.hyper.leaking_rate, n);
}

std::vector<double> input_drive(const Reservoir& res, std::span<const double> u) {
    require(u.size() == res.inputs(), ErrorKind::shape,
            "esn: input has " + std::to_string(u.size()) + " features, reservoir expects " +
                std::to_string(res.inputs()));
    std::vector<double> drive(res.units());
    kernels::active().gemv(res.w_in.data(), res.units(), res.inputs(), res.inputs(), u.data(), drive.data());
    return drive;
}

void write_row(Matrix& x, Eigen::Index row, bool bias, std::span<const double> u, const std::vector<double>& state) {
    Eigen::Index c = 0;
    if (bias) x(row, c++) = 1.0;
    for (double v : u) x(row, c++) = v;
    for (double v : state) x(row, c++) = v;
}

std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
    return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

Vector encode_sample(const Reservoir& res, std::span<const double> u, const Vector& x0, std::size_t steps) {
    require(static_cast<std::size_t>(x0.size()) == res.units(), ErrorKind::shape, "esn: initial state size mismatch");
    const auto drive = input_drive(res, u);
    std::vector<double> x(x0.data(), x0.data() + x0.size());
    std::vector<double> scratch(res.units());
    for (std::size_t t = 0; t < steps; ++t) step(res, drive, x, scratch);
    return Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

Vector encode_sample(const Reservoir& res, std::span<const double> u) {
    return encode_sample(res, u, Vector::Zero(static_cast<Eigen::Index>(res.units())), res.hyper.encode_steps);
}

StateMatrix build_state_matrix(const Reservoir& res, const Matrix& samples) {
    require(static_cast<std::size_t>(samples.cols()) == res.inputs(), ErrorKind::shape,
            "esn: samples have " + std::to_string(samples.cols()) + " columns, reservoir expects " +
                std::to_string(res.inputs()));
    require(samples.allFinite(), ErrorKind::argument, "esn: non-finite sample value");
    const bool bias = res.hyper.include_bias;
    StateMatrix out;
    out.bias = bias;
    out.x.resize(samples.rows(), (bias ? 1 : 0) + samples.cols() + static_cast<Eigen::Index>(res.units()));
    std::vector<double> x(res.units());
    std::vector<double> scratch(res.units());
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        const auto u = row_span(samples, r);
        const auto drive = input_drive(res, u);
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t t = 0; t < res.hyper.encode_steps; ++t) step(res, drive, x, scratch);
        write_row(out.x, r, bias, u, x);
    }
    return out;
}

StateMatrix build_state_matrix_sequence(const Reservoir& res, const Matrix& samples, const Vector& start,
                                        std::size_t washout) {
    require(static_cast<std::size_t>(samples.cols()) == res.inputs(), ErrorKind::shape,
            "esn: sample column count does not match reservoir inputs");
    require(static_cast<std::size_t>(start.size()) == res.units(), ErrorKind::shape, "esn: start state size mismatch");
    const bool bias = res.hyper.include_bias;
    StateMatrix out;
    out.bias = bias;
    out.x.resize(samples.rows(), (bias ? 1 : 0) + samples.cols() + static_cast<Eigen::Index>(res.units()));
    std::vector<double> x(start.data(), start.data() + start.size());
    std::vector<double> scratch(res.units());
    // Prime with the leading samples, cycling if there are fewer than washout.
    for (std::size_t t = 0; t < washout && samples.rows() > 0; ++t) {
        const auto r = static_cast<Eigen::Index>(t % static_cast<std::size_t>(samples.rows()));
        step(res, input_drive(res, row_span(samples, r)), x, scratch);
    }
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        const auto u = row_span(samples, r);
        step(res, input_drive(res, u), x, scratch);
        write_row(out.x, r, bias, u, x);
    }
    out.final_state = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
    return out;
}

Vector solve_spd(Matrix a, Vector b) {
    const Eigen::Index n = a.rows();
    require(a.cols() == n && b.size() == n, ErrorKind::shape, "solve_spd: dimension mismatch");
    const double scale = n > 0 ? a.diagonal().cwiseAbs().maxCoeff() : 0.0;
    const double floor = 1e-13 * std::max(scale, std::numeric_limits<double>::min());
    // Lower-triangular factor overwrites the lower half of a.
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > floor)) {
            fail(ErrorKind::singular, "ridge system is singular or indefinite (pivot " + std::to_string(d) +
                                          " at column " + std::to_string(j) + "); use a ridge coefficient > 0");
        }
        const double l = std::sqrt(d);
        a(j, j) = l;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / l;
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = b(i);
        for (Eigen::Index k = 0; k < i; ++k) s -= a(i, k) * b(k);
        b(i) = s / a(i, i);
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = b(i);
        for (Eigen::Index k = i + 1; k < n; ++k) s -= a(k, i) * b(k);
        b(i) = s / a(i, i);
    }
    return b;
}

Vector train_readout(const Matrix& x, const Vector& y_target, double beta) {
    require(x.rows() >= 1, ErrorKind::argument, "train_readout: empty state matrix");
    require(y_target.size() == x.rows(), ErrorKind::shape, "train_readout: target length does not match rows");
    require(beta >= 0.0, ErrorKind::argument, "train_readout: beta must be >= 0");
    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += beta;
    Vector rhs = x.transpose() * y_target;
    return solve_spd(std::move(gram), std::move(rhs));
}

Model fit(const Matrix& samples, const Labels& labels, const HyperParams& hyper, std::uint64_t seed) {
    require(static_cast<Eigen::Index>(labels.size()) == samples.rows(), ErrorKind::shape,
            "esn fit: label count does not match sample rows");
    const auto ones = std::count(labels.begin(), labels.end(), 1);
    require(ones > 0 && ones < static_cast<std::ptrdiff_t>(labels.size()), ErrorKind::argument,
            "esn fit: training data must contain both classes");

    Model model;
    model.reservoir = init_reservoir(hyper, static_cast<std::size_t>(samples.cols()), seed);
    StateMatrix states;
    if (hyper.mode == EncodeMode::sequence) {
        states = build_state_matrix_sequence(model.reservoir, samples,
                                             Vector::Zero(static_cast<Eigen::Index>(hyper.reservoir_size)),
                                             hyper.washout);
        model.final_state = states.final_state;
    } else {
        states = build_state_matrix(model.reservoir, samples);
    }
    const auto d = static_cast<std::size_t>(states.x.rows());
    const auto p = static_cast<std::size_t>(states.x.cols());
    if (d < p) {
        model.warnings.push_back("esn: " + std::to_string(d) + " training rows for " + std::to_string(p) +
                                 " readout weights; the readout is underdetermined without ridge");
    }
    Vector y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = labels[i];
    model.w_out = train_readout(states.x, y, hyper.ridge);
    return model;
}

Vector decision_values(const Model& model, const Matrix& samples) {
    StateMatrix states = model.reservoir.hyper.mode == EncodeMode::sequence
                             ? build_state_matrix_sequence(model.reservoir, samples, model.final_state, 0)
                             : build_state_matrix(model.reservoir, samples);
    require(states.x.cols() == model.w_out.size(), ErrorKind::shape, "esn predict: readout size mismatch");
    Vector out(states.x.rows());
    for (Eigen::Index r = 0; r < states.x.rows(); ++r) {
        out(r) = kernels::active().dot(states.x.data() + r * states.x.cols(), model.w_out.data(),
                                       static_cast<std::size_t>(states.x.cols()));
    }
    return out;
}

Labels predict(const Model& model, const Matrix& samples) {
    const Vector raw = decision_values(model, samples);
    Labels out(static_cast<std::size_t>(raw.size()));
    for (Eigen::Index i = 0; i < raw.size(); ++i) out[static_cast<std::size_t>(i)] = raw(i) >= model.threshold ? 1 : 0;
    return out;
}

std::uint64_t Model::fingerprint() const {
    Fingerprint fp;
    fp.add(std::span<const double>(reservoir.w_in.data(), static_cast<std::size_t>(reservoir.w_in.size())));
    fp.add(std::span<const double>(reservoir.w.data(), static_cast<std::size_t>(reservoir.w.size())));
    fp.add(std::span<const double>(w_out.data(), static_cast<std::size_t>(w_out.size())));
    fp.add(threshold);
    return fp.value();
}

void export_model(const Model& model, std::ostream& out) {
    const auto& h = model.reservoir.hyper;
    out.precision(17);
    out << "# echo state network dump\n";
    out << "reservoir_size " << h.reservoir_size << '\n'
        << "spectral_radius " << h.spectral_radius << '\n'
        << "leaking_rate " << h.leaking_rate << '\n'
        << "ridge " << h.ridge << '\n'
        << "input_scaling " << h.input_scaling << '\n'
        << "sparsity " << h.sparsity << '\n'
        << "encode_steps " << h.encode_steps << '\n'
        << "include_bias " << (h.include_bias ? 1 : 0) << '\n'
        << "mode " << (h.mode == EncodeMode::sequence ? "sequence" : "per_sample") << '\n'
        << "seed " << model.reservoir.seed << '\n'
        << "threshold " << model.threshold << '\n';
    auto dump = [&](const char* name, const Matrix& m) {
        out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
            out << '\n';
        }
    };
    dump("w_in", model.reservoir.w_in);
    dump("w", model.reservoir.w);
    out << "w_out 1 " << model.w_out.size() << '\n';
    for (Eigen::Index i = 0; i < model.w_out.size(); ++i) out << (i ? " " : "") << model.w_out(i);
    out << '\n';
}

}  // namespace rcbench::esn
