#pragma once

#include <cstddef>
#include <utility>

#include "walrex/base.hpp"

namespace walrex {

// Euclidean projection onto the unit simplex {x >= 0, sum x = 1} by the
// sort-and-threshold rule. Components within 1e-14 of zero are snapped to
// exact zeros. Throws std::invalid_argument on non-finite input.
Vec project_simplex(Vec v);

// Index and value of the smallest component; smallest index wins ties.
std::pair<std::size_t, double> min_vertex(const Vec& s);

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
    LpStatus status = LpStatus::Optimal;
    Vec y;
    double value = 0.0;
};

// max <c,y>  s.t.  A y <= b, y >= 0. Dense two-phase tableau simplex with
// Bland's rule, so it terminates on degenerate instances.
LpResult solve_lp(const Vec& c, const Matrix& A, const Vec& b);

struct QpResult {
    Vec y;
    double value = 0.0;
};

// max sum_j (c_j y_j - (rho/2) y_j^2)  s.t.  A y <= b, y >= 0, with rho > 0.
// Square diagonal A short-circuits to per-coordinate clamps; the general case
// runs a primal active-set iteration (Hildreth's dual coordinate ascent as a
// fallback on cycling). Throws QpInfeasible when no y >= 0 satisfies A y <= b.
QpResult solve_separable_qp(const Vec& c, double rho, const Matrix& A, const Vec& b);

}  // namespace walrex
