#pragma once

// Data-parallel inner loops shared by the reservoir update, the distance
// based classifiers and the kernel machines. Each kernel has a scalar
// reference version and optional SIMD variants; the variant is picked once
// at startup from the CPU features (override with RCBENCH_SIMD=scalar|avx2|neon).

#include <cstddef>
#include <span>
#include <string_view>

namespace rcbench::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    /// y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// y = M x, M row-major rows x cols with the given row stride.
    void (*gemv)(const double* m, std::size_t rows, std::size_t cols, std::size_t stride,
                 const double* x, double* y);
    /// x[i] = (1 - alpha) x[i] + alpha * act[i]
    void (*leaky_blend)(double* x, const double* act, double alpha, std::size_t n);
};

const KernelTable& scalar_table();
/// Returns nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();
const KernelTable* neon_table();

Isa detected_isa();
Isa active_isa();
/// Force a variant (tests and benchmarks). Throws if unavailable.
void set_active_isa(Isa isa);
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void leaky_blend(std::span<double> x, std::span<const double> act, double alpha) {
    active().leaky_blend(x.data(), act.data(), alpha, x.size());
}

}  // namespace rcbench::kernels
