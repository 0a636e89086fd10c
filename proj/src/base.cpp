#include "walrex/base.hpp"

#include "walrex/kernels.hpp"

namespace walrex {

Vec matvec(const Matrix& A, const Vec& y) {
    Vec out(A.rows, 0.0);
    for (std::size_t i = 0; i < A.rows; ++i)
        out[i] = kernels::ops().dot(A.data.data() + i * A.cols, y.data(), A.cols);
    return out;
}

Vec matvec_t(const Matrix& A, const Vec& p) {
    Vec out(A.cols, 0.0);
    for (std::size_t i = 0; i < A.rows; ++i)
        kernels::ops().axpy(p[i], A.data.data() + i * A.cols, out.data(), A.cols);
    return out;
}

}  // namespace walrex
