#pragma once

// Echo state network classifier: a fixed random sparse reservoir driven by
// each (static) feature vector, followed by a ridge-regression readout.

#include "rcbench/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rcbench::esn {

enum class EncodeMode {
    /// Reset the state to zero for every sample and hold the input for T steps.
    per_sample,
    /// Feed samples one step each as a single sequence (state carried over).
    sequence,
};

struct HyperParams {
    std::size_t reservoir_size = 100;
    double spectral_radius = 0.9;
    double leaking_rate = 0.5;
    double ridge = 1e-4;
    double input_scaling = 1.0;
    /// Fraction of nonzero recurrent weights.
    double sparsity = 0.1;
    std::size_t encode_steps = 20;
    bool include_bias = false;
    EncodeMode mode = EncodeMode::per_sample;
    /// Discarded priming steps, sequence mode only.
    std::size_t washout = 10;

    void validate() const;
};

struct Reservoir {
    Matrix w_in;  // reservoir_size x n_inputs
    Matrix w;     // reservoir_size x reservoir_size
    HyperParams hyper;
    std::uint64_t seed = 0;

    std::size_t inputs() const { return static_cast<std::size_t>(w_in.cols()); }
    std::size_t units() const { return static_cast<std::size_t>(w.rows()); }
};

struct PowerIteration {
    double radius = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Plain power iteration from the normalized all-ones vector.
PowerIteration power_iteration(const Matrix& m, double tol = 1e-10, std::size_t max_iter = 10000);

/// Largest eigenvalue magnitude. Uses power iteration and falls back to a
/// dense eigensolve when it stalls (complex dominant pairs, near ties).
double spectral_radius(const Matrix& m);

Reservoir init_reservoir(const HyperParams& hyper, std::size_t n_inputs, std::uint64_t seed);

/// Final state x(T) after holding u for hyper.encode_steps steps from x(0) = 0.
Vector encode_sample(const Reservoir& res, std::span<const double> u);
/// Same recursion from an arbitrary initial state and step count.
Vector encode_sample(const Reservoir& res, std::span<const double> u, const Vector& x0, std::size_t steps);

/// One row per sample: [1]? [u ; x(T)].
struct StateMatrix {
    Matrix x;
    bool bias = false;
    /// Reservoir state after the last sample (sequence mode).
    Vector final_state;
};

StateMatrix build_state_matrix(const Reservoir& res, const Matrix& samples);
/// Sequence mode; start is the state before the first sample.
StateMatrix build_state_matrix_sequence(const Reservoir& res, const Matrix& samples, const Vector& start,
                                        std::size_t washout);

/// Solves (X^T X + beta I) w = X^T y by Cholesky. Returns w (the readout row).
Vector train_readout(const Matrix& x, const Vector& y_target, double beta);

/// In-place Cholesky solve of a symmetric positive-definite system.
/// Throws a singularity error when a pivot collapses.
Vector solve_spd(Matrix a, Vector b);

struct Model {
    Reservoir reservoir;
    Vector w_out;
    double threshold = 0.5;
    Vector final_state;
    std::vector<std::string> warnings;

    std::uint64_t fingerprint() const;
};

Model fit(const Matrix& samples, const Labels& labels, const HyperParams& hyper, std::uint64_t seed);

/// Raw readout values X w_out.
Vector decision_values(const Model& model, const Matrix& samples);

/// Label 1 when the raw output is >= threshold.
Labels predict(const Model& model, const Matrix& samples);

/// Flat text dump of hyperparameters and weights, for auditing.
void export_model(const Model& model, std::ostream& out);

}  // namespace rcbench::esn
