#include "walrex/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "walrex/kernels.hpp"

namespace walrex {

Vec project_simplex(Vec v) {
    const std::size_t n = v.size();
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite projection input");

    Vec u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double tau = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        css += u[k];
        double t = (css - 1.0) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) tau = t;
    }
    for (double& x : v) {
        x = std::max(x - tau, 0.0);
        if (x < 1e-14) x = 0.0;
    }
    return v;
}

std::pair<std::size_t, double> min_vertex(const Vec& s) {
    std::size_t j = kernels::min_index(s);
    return {j, s[j]};
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kOptTol = 1e-9;

// Dense simplex tableau. Columns: n structural, m slack, then artificials.
struct Tableau {
    std::size_t m, n, total;
    std::vector<Vec> row;    // m rows, each total+1 wide (last = rhs)
    std::vector<std::size_t> basis;
    std::size_t n_artificial = 0;

    bool is_artificial(std::size_t col) const { return col >= n + m; }

    void pivot(std::size_t r, std::size_t c) {
        double piv = row[r][c];
        kernels::ops().scale(row[r].data(), 1.0 / piv, row[r].size());
        row[r][c] = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || row[i][c] == 0.0) continue;
            double f = row[i][c];
            kernels::ops().axpy(-f, row[r].data(), row[i].data(), row[i].size());
            row[i][c] = 0.0;
        }
        basis[r] = c;
    }

    // Bland's rule: entering = smallest-index improving column, leaving =
    // smallest basis variable among the minimum ratios.
    LpStatus run(const Vec& cost, bool allow_artificial) {
        const std::size_t limit = 50000;
        Vec obj(total + 1, 0.0);
        auto rebuild_obj = [&] {
            std::fill(obj.begin(), obj.end(), 0.0);
            for (std::size_t j = 0; j < total; ++j) obj[j] = -cost[j];
            for (std::size_t i = 0; i < m; ++i) {
                double cb = cost[basis[i]];
                if (cb != 0.0) kernels::ops().axpy(cb, row[i].data(), obj.data(), obj.size());
            }
        };
        rebuild_obj();
        for (std::size_t iter = 0; iter < limit; ++iter) {
            std::size_t enter = total;
            for (std::size_t j = 0; j < total; ++j) {
                if (!allow_artificial && is_artificial(j)) continue;
                if (obj[j] < -kOptTol) { enter = j; break; }
            }
            if (enter == total) return LpStatus::Optimal;
            std::size_t leave = m;
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (row[i][enter] <= kPivotTol) continue;
                double ratio = row[i][total] / row[i][enter];
                if (leave == m || ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == m) return LpStatus::Unbounded;
            pivot(leave, enter);
            double f = obj[enter];
            if (f != 0.0) {
                kernels::ops().axpy(-f, row[leave].data(), obj.data(), obj.size());
                obj[enter] = 0.0;
            }
        }
        return LpStatus::Unbounded;  // cycling guard, not expected with Bland
    }
};

}  // namespace

LpResult solve_lp(const Vec& c, const Matrix& A, const Vec& b) {
    const std::size_t m = A.rows, n = A.cols;
    Tableau t;
    t.m = m;
    t.n = n;

    std::vector<std::size_t> artificial_of_row(m, SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i)
        if (b[i] < 0.0) artificial_of_row[i] = t.n_artificial++;
    t.total = n + m + t.n_artificial;

    t.row.assign(m, Vec(t.total + 1, 0.0));
    t.basis.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        double sgn = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t.row[i][j] = sgn * A(i, j);
        t.row[i][n + i] = sgn;
        t.row[i][t.total] = sgn * b[i];
        if (artificial_of_row[i] != SIZE_MAX) {
            t.row[i][n + m + artificial_of_row[i]] = 1.0;
            t.basis[i] = n + m + artificial_of_row[i];
        } else {
            t.basis[i] = n + i;
        }
    }

    if (t.n_artificial > 0) {
        Vec phase1_cost(t.total, 0.0);
        for (std::size_t k = 0; k < t.n_artificial; ++k) phase1_cost[n + m + k] = -1.0;
        LpStatus st = t.run(phase1_cost, true);
        if (st != LpStatus::Optimal) return {LpStatus::Infeasible, Vec(n, 0.0), 0.0};
        double infeas = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (t.is_artificial(t.basis[i])) infeas += t.row[i][t.total];
        if (infeas > 1e-8) return {LpStatus::Infeasible, Vec(n, 0.0), 0.0};
        // drive lingering zero-level artificials out where possible
        for (std::size_t i = 0; i < m; ++i) {
            if (!t.is_artificial(t.basis[i])) continue;
            for (std::size_t j = 0; j < n + m; ++j) {
                if (std::abs(t.row[i][j]) > kPivotTol) {
                    t.pivot(i, j);
                    break;
                }
            }
        }
    }

    Vec cost(t.total, 0.0);
    for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];
    LpStatus st = t.run(cost, false);
    if (st != LpStatus::Optimal) return {st, Vec(n, 0.0), 0.0};

    LpResult res;
    res.status = LpStatus::Optimal;
    res.y.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis[i] < n) res.y[t.basis[i]] = t.row[i][t.total];
    res.value = kernels::dot(res.y, c);
    return res;
}

namespace {

bool square_diagonal(const Matrix& A) {
    if (A.rows != A.cols) return false;
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j)
            if (i != j && A(i, j) != 0.0) return false;
    return true;
}

double qp_objective(const Vec& c, double rho, const Vec& y) {
    double v = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) v += c[j] * y[j] - 0.5 * rho * y[j] * y[j];
    return v;
}

// dense solve with partial pivoting; false when the system is (near) singular
bool dense_solve(std::vector<Vec>& M, Vec& rhs) {
    const std::size_t k = rhs.size();
    double scale = 1e-300;
    for (const Vec& row : M)
        for (double v : row) scale = std::max(scale, std::abs(v));
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        if (std::abs(M[piv][col]) < 1e-11 * scale) return false;
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = M[r][col] / M[col][col];
            for (std::size_t j = col; j < k; ++j) M[r][j] -= f * M[col][j];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = 0; i < k; ++i) rhs[i] /= M[i][i];
    return true;
}

// Hildreth's coordinate ascent on the dual of the equivalent projection of
// z = c/rho onto {y >= 0, A y <= b}. Slow on near-parallel rows, but every
// sweep is a descent, so it is the safe fallback when the active-set method
// suspects cycling.
Vec hildreth_qp(const Vec& c, double rho, const Matrix& A, const Vec& b) {
    const std::size_t m = A.rows, n = A.cols;
    Vec z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = c[j] / rho;
    Vec lambda(m, 0.0), mu(n, 0.0);
    Vec row_norm2(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        row_norm2[i] = kernels::ops().dot(A.data.data() + i * n, A.data.data() + i * n, n);

    Vec y = z;
    const std::size_t max_sweeps = 200000;
    const double tol = 1e-12;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (row_norm2[i] == 0.0) continue;
            double viol = kernels::ops().dot(A.data.data() + i * n, y.data(), n) - b[i];
            double step = viol / row_norm2[i];
            double nl = std::max(0.0, lambda[i] + step);
            double d = nl - lambda[i];
            if (d != 0.0) {
                lambda[i] = nl;
                kernels::ops().axpy(-d, A.data.data() + i * n, y.data(), n);
                change = std::max(change, std::abs(d) * std::sqrt(row_norm2[i]));
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            double nm = std::max(0.0, mu[j] - y[j]);
            double d = nm - mu[j];
            if (d != 0.0) {
                mu[j] = nm;
                y[j] += d;
                change = std::max(change, std::abs(d));
            }
        }
        if (change < tol) break;
    }
    return y;
}

}  // namespace

QpResult solve_separable_qp(const Vec& c, double rho, const Matrix& A, const Vec& b) {
    const std::size_t m = A.rows, n = A.cols;
    if (!(rho > 0.0)) throw std::invalid_argument("separable qp needs rho > 0");

    if (square_diagonal(A)) {
        Vec y(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double ub = std::numeric_limits<double>::infinity();
            if (A(j, j) > 0.0) {
                ub = b[j] / A(j, j);
            } else if (b[j] < 0.0) {
                throw QpInfeasible("empty feasible set: row " + std::to_string(j));
            }
            if (ub < 0.0) throw QpInfeasible("empty feasible set: row " + std::to_string(j));
            y[j] = std::clamp(c[j] / rho, 0.0, ub);
        }
        return {y, qp_objective(c, rho, y)};
    }

    for (std::size_t i = 0; i < m; ++i) {
        bool zero_row = true;
        for (std::size_t j = 0; j < n; ++j)
            if (A(i, j) != 0.0) zero_row = false;
        if (zero_row && b[i] < 0.0) throw QpInfeasible("empty feasible set: row " + std::to_string(i));
    }
    bool b_nonneg = true;
    for (std::size_t i = 0; i < m; ++i)
        if (b[i] < 0.0) b_nonneg = false;
    Vec y(n, 0.0);
    if (!b_nonneg) {
        LpResult feas = solve_lp(Vec(n, 0.0), A, b);
        if (feas.status == LpStatus::Infeasible) throw QpInfeasible("empty feasible set");
        y = feas.y;
        for (double& v : y)
            if (v < 0.0) v = 0.0;
    }

    // Primal active set from the feasible start: maximize over the working
    // set's equality span, step to the nearest blocking row, drop rows whose
    // multiplier turns negative. The Hessian is rho*I, so the working-set
    // maximizer solves the small system (G_W G_W^T) lambda = G_W c - rho h_W
    // with y = (c - G_W^T lambda) / rho. Constraint i < m is row i of A;
    // constraint m + j is the bound -y_j <= 0.
    const std::size_t total = m + n;
    auto gdot = [&](std::size_t i, const Vec& v) {
        if (i < m) return kernels::ops().dot(A.data.data() + i * n, v.data(), n);
        return -v[i - m];
    };
    auto gg = [&](std::size_t i1, std::size_t i2) {
        if (i1 > i2) std::swap(i1, i2);
        if (i2 < m)
            return kernels::ops().dot(A.data.data() + i1 * n, A.data.data() + i2 * n, n);
        if (i1 < m) return -A(i1, i2 - m);
        return i1 == i2 ? 1.0 : 0.0;
    };
    auto rhs_of = [&](std::size_t i) { return i < m ? b[i] : 0.0; };

    double cscale = 1.0;
    for (double v : c) cscale = std::max(cscale, std::abs(v));
    std::vector<std::size_t> W;
    Vec lambda, y_eq(n), d(n);
    bool solved = false;
    const std::size_t cap = 100 * total + 100;
    for (std::size_t it = 0; it < cap; ++it) {
        if (W.empty()) {
            for (std::size_t j = 0; j < n; ++j) y_eq[j] = c[j] / rho;
            lambda.clear();
        } else {
            std::vector<Vec> M(W.size(), Vec(W.size(), 0.0));
            Vec r(W.size(), 0.0);
            for (std::size_t a2 = 0; a2 < W.size(); ++a2) {
                for (std::size_t b2 = 0; b2 < W.size(); ++b2) M[a2][b2] = gg(W[a2], W[b2]);
                r[a2] = gdot(W[a2], c) - rho * rhs_of(W[a2]);
            }
            if (!dense_solve(M, r)) {
                W.pop_back();  // dependent row slipped in; retry without it
                continue;
            }
            lambda = r;
            y_eq = c;
            for (std::size_t a2 = 0; a2 < W.size(); ++a2) {
                std::size_t i = W[a2];
                if (i < m)
                    kernels::ops().axpy(-lambda[a2], A.data.data() + i * n, y_eq.data(), n);
                else
                    y_eq[i - m] += lambda[a2];
            }
            for (double& v : y_eq) v /= rho;

            // Dividing the cancellation-prone c - G^T lambda by rho leaves the
            // working-set rows violated by roundoff/rho; project back onto them.
            Vec resid(W.size(), 0.0);
            for (std::size_t a2 = 0; a2 < W.size(); ++a2)
                resid[a2] = rhs_of(W[a2]) - gdot(W[a2], y_eq);
            std::vector<Vec> M2(W.size(), Vec(W.size(), 0.0));
            for (std::size_t a2 = 0; a2 < W.size(); ++a2)
                for (std::size_t b2 = 0; b2 < W.size(); ++b2) M2[a2][b2] = gg(W[a2], W[b2]);
            if (dense_solve(M2, resid)) {
                for (std::size_t a2 = 0; a2 < W.size(); ++a2) {
                    std::size_t i = W[a2];
                    if (i < m)
                        kernels::ops().axpy(resid[a2], A.data.data() + i * n, y_eq.data(), n);
                    else
                        y_eq[i - m] -= resid[a2];
                }
            }
        }

        double dmax = 0.0, ymax = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            d[j] = y_eq[j] - y[j];
            dmax = std::max(dmax, std::abs(d[j]));
            ymax = std::max(ymax, std::abs(y_eq[j]));
        }
        if (dmax <= 1e-12 * (1.0 + ymax)) {
            std::size_t worst = W.size();
            double lmin = -1e-10 * cscale;
            for (std::size_t a2 = 0; a2 < W.size(); ++a2)
                if (lambda[a2] < lmin) {
                    lmin = lambda[a2];
                    worst = a2;
                }
            if (worst == W.size()) {
                solved = true;
                break;
            }
            W.erase(W.begin() + static_cast<std::ptrdiff_t>(worst));
            continue;
        }

        double alpha = 1.0;
        std::size_t blocker = total;
        for (std::size_t i = 0; i < total; ++i) {
            if (std::find(W.begin(), W.end(), i) != W.end()) continue;
            double g = gdot(i, d);
            if (g <= 1e-13 * dmax * (1.0 + std::abs(rhs_of(i)))) continue;
            double slack = rhs_of(i) - gdot(i, y);
            if (slack < 0.0) slack = 0.0;
            double ai = slack / g;
            if (ai < alpha) {
                alpha = ai;
                blocker = i;
            }
        }
        for (std::size_t j = 0; j < n; ++j) y[j] += alpha * d[j];
        if (blocker < total) W.push_back(blocker);
    }
    if (!solved) y = hildreth_qp(c, rho, A, b);

    for (double& v : y)
        if (v < 0.0 && v > -1e-13) v = 0.0;
    return {y, qp_objective(c, rho, y)};
}

}  // namespace walrex
