#include "rcbench/kernels.hpp"

#include <arm_neon.h>

namespace rcbench::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc0 = vfmaq_f64(acc0, d0, d0);
        acc1 = vfmaq_f64(acc1, d1, d1);
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_neon(const double* m, std::size_t rows, std::size_t cols, std::size_t stride,
               const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_neon(m + r * stride, x, cols);
}

void leaky_blend_neon(double* x, const double* act, double alpha, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    const float64x2_t vk = vdupq_n_f64(1.0 - alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t keep = vmulq_f64(vk, vld1q_f64(x + i));
        vst1q_f64(x + i, vfmaq_f64(keep, va, vld1q_f64(act + i)));
    }
    const double keep = 1.0 - alpha;
    for (; i < n; ++i) x[i] = keep * x[i] + alpha * act[i];
}

}  // namespace

const KernelTable* neon_table() {
    static const KernelTable table{dot_neon, squared_distance_neon, axpy_neon, gemv_neon,
                                   leaky_blend_neon};
    return &table;
}

}  // namespace rcbench::kernels
