#include "walrex/kernels.hpp"

namespace walrex::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double min_value_scalar(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] < m) m = x[i];
    return m;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        if (d < 0.0) d = -d;
        if (d > m) m = d;
    }
    return m;
}

void floor_scalar(double* x, double lo, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] < lo) x[i] = lo;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops = {dot_scalar,          sum_scalar,  axpy_scalar, scale_scalar,
                            min_value_scalar,    max_abs_diff_scalar, floor_scalar};
    return ops;
}

std::size_t min_index(const double* x, std::size_t n) {
    const double m = ops().min_value(x, n);
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] == m) return i;
    return 0;  // unreachable for finite inputs
}

}  // namespace walrex::kernels
