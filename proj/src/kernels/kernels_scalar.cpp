#include "rcbench/kernels.hpp"

namespace rcbench::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* m, std::size_t rows, std::size_t cols, std::size_t stride,
                 const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(m + r * stride, x, cols);
}

void leaky_blend_scalar(double* x, const double* act, double alpha, std::size_t n) {
    const double keep = 1.0 - alpha;
    for (std::size_t i = 0; i < n; ++i) x[i] = keep * x[i] + alpha * act[i];
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{dot_scalar, squared_distance_scalar, axpy_scalar,
                                   gemv_scalar, leaky_blend_scalar};
    return table;
}

}  // namespace rcbench::kernels
