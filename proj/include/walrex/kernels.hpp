#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace walrex::kernels {

// Vector kernels behind the numeric core. The scalar implementations define
// the reference semantics; the AVX2 implementations must match them exactly
// for elementwise maps and within reassociation error for reductions (the
// equivalence tests pin both down). The active set is chosen once per process
// from CPUID and can be overridden with WALREX_SIMD=auto|scalar|avx2.
struct Ops {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    void (*axpy)(double a, const double* x, double* y, std::size_t n);  // y += a*x
    void (*scale)(double* x, double a, std::size_t n);
    double (*min_value)(const double* x, std::size_t n);
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
    void (*floor_inplace)(double* x, double lo, std::size_t n);  // x = max(x, lo)
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // null when the binary was built without AVX2 support
const Ops& ops();       // active implementation
bool avx2_active();
std::string active_name();

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return ops().dot(a.data(), b.data(), a.size());
}
inline double sum(const std::vector<double>& x) { return ops().sum(x.data(), x.size()); }
inline void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    ops().axpy(a, x.data(), y.data(), x.size());
}
inline void scale(std::vector<double>& x, double a) { ops().scale(x.data(), a, x.size()); }
inline double min_value(const std::vector<double>& x) {
    return ops().min_value(x.data(), x.size());
}
inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    return ops().max_abs_diff(a.data(), b.data(), a.size());
}
inline void floor_inplace(std::vector<double>& x, double lo) {
    ops().floor_inplace(x.data(), lo, x.size());
}

// Index of the smallest element, smallest index on ties. Uses the active
// min_value kernel, then scans for its first occurrence; both paths give the
// same index because the scan compares the exact double returned.
std::size_t min_index(const double* x, std::size_t n);
inline std::size_t min_index(const std::vector<double>& x) {
    return min_index(x.data(), x.size());
}

}  // namespace walrex::kernels
