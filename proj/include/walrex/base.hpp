#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace walrex {

using Vec = std::vector<double>;

// Dense row-major matrix. All activity matrices (goods x activities) and LP
// constraint blocks in this project are small, so no sparse storage.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

Vec matvec(const Matrix& A, const Vec& y);    // A y
Vec matvec_t(const Matrix& A, const Vec& p);  // A^T p

// Thrown when wealth cannot cover the survival bundle at the given prices.
struct InfeasibleBudget : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by standalone excess-supply evaluation when progressive hedging hits
// its iteration cap; carries the last non-anticipativity residual so the
// caller can decide whether the approximate transfer is acceptable.
struct PhMaxIterExceeded : std::runtime_error {
    double residual;
    PhMaxIterExceeded(const std::string& msg, double res)
        : std::runtime_error(msg), residual(res) {}
};

struct QpInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace walrex
