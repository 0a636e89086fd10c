#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "walrex/base.hpp"
#include "walrex/simplex.hpp"

using walrex::LpStatus;
using walrex::Matrix;
using walrex::Vec;

namespace {

// small dense solve with partial pivoting; returns false on (near) singular
bool lin_solve(std::vector<std::vector<double>> a, Vec rhs, Vec& out) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-11) return false;
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            rhs[r] -= f * rhs[col];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i] / a[i][i];
    return true;
}

// Brute-force LP oracle: enumerate every basic point (each choice of n active
// constraints among the m rows and n sign bounds), keep the feasible ones,
// return the best objective. Only for tiny n.
struct BasicPoint {
    Vec y;
    double value;
};

std::vector<BasicPoint> enumerate_vertices(const Vec& c, const Matrix& A, const Vec& b) {
    const std::size_t n = c.size(), m = b.size(), total = m + n;
    std::vector<BasicPoint> out;
    std::vector<std::size_t> pick(n);
    std::vector<bool> mask(total, false);
    std::fill(mask.end() - static_cast<long>(n), mask.end(), true);
    do {
        std::size_t k = 0;
        for (std::size_t i = 0; i < total; ++i)
            if (mask[i]) pick[k++] = i;
        std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
        Vec rhs(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            if (pick[r] < m) {
                for (std::size_t j = 0; j < n; ++j) rows[r][j] = A(pick[r], j);
                rhs[r] = b[pick[r]];
            } else {
                rows[r][pick[r] - m] = 1.0;  // y_j = 0
            }
        }
        Vec y;
        if (!lin_solve(rows, rhs, y)) continue;
        bool feas = true;
        for (double v : y)
            if (v < -1e-9) feas = false;
        for (std::size_t r = 0; feas && r < m; ++r) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) lhs += A(r, j) * y[j];
            if (lhs > b[r] + 1e-9) feas = false;
        }
        if (!feas) continue;
        double val = 0.0;
        for (std::size_t j = 0; j < n; ++j) val += c[j] * y[j];
        out.push_back({std::move(y), val});
    } while (std::next_permutation(mask.begin(), mask.end()));
    return out;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double qp_obj(const Vec& c, double rho, const Vec& y) {
    double v = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) v += c[j] * y[j] - 0.5 * rho * y[j] * y[j];
    return v;
}

// Exact QP oracle: for every active set (rows S forced to equality, variables
// Z pinned at zero) solve the equality-constrained maximizer, keep primal
// feasible candidates, take the best. The optimal active set is enumerated,
// so the best candidate is the unique maximizer of the strictly concave QP.
Vec qp_oracle(const Vec& c, double rho, const Matrix& A, const Vec& b) {
    const std::size_t n = c.size(), m = b.size();
    Vec best;
    double best_val = -1e300;
    for (std::size_t zs = 0; zs < (1u << n); ++zs) {
        std::vector<std::size_t> free_vars;
        for (std::size_t j = 0; j < n; ++j)
            if (!(zs & (1u << j))) free_vars.push_back(j);
        for (std::size_t ss = 0; ss < (1u << m); ++ss) {
            std::vector<std::size_t> act;
            for (std::size_t i = 0; i < m; ++i)
                if (ss & (1u << i)) act.push_back(i);
            if (act.size() > free_vars.size()) continue;
            // unknowns: y_free then lambda_act
            const std::size_t nf = free_vars.size(), na = act.size(), dim = nf + na;
            std::vector<std::vector<double>> sys(dim, std::vector<double>(dim, 0.0));
            Vec rhs(dim, 0.0);
            for (std::size_t r = 0; r < nf; ++r) {
                sys[r][r] = rho;
                for (std::size_t k = 0; k < na; ++k)
                    sys[r][nf + k] = A(act[k], free_vars[r]);
                rhs[r] = c[free_vars[r]];
            }
            for (std::size_t k = 0; k < na; ++k) {
                for (std::size_t r = 0; r < nf; ++r)
                    sys[nf + k][r] = A(act[k], free_vars[r]);
                rhs[nf + k] = b[act[k]];
            }
            Vec sol;
            if (!lin_solve(sys, rhs, sol)) continue;
            Vec y(n, 0.0);
            for (std::size_t r = 0; r < nf; ++r) y[free_vars[r]] = sol[r];
            bool feas = true;
            for (double v : y)
                if (v < -1e-9) feas = false;
            for (std::size_t i = 0; feas && i < m; ++i) {
                double lhs = 0.0;
                for (std::size_t j = 0; j < n; ++j) lhs += A(i, j) * y[j];
                if (lhs > b[i] + 1e-9) feas = false;
            }
            if (!feas) continue;
            double val = qp_obj(c, rho, y);
            if (val > best_val) {
                best_val = val;
                best = y;
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("simplex projection: known points") {
    CHECK(walrex::project_simplex({0.4, 0.6}) == Vec{0.4, 0.6});
    CHECK(walrex::project_simplex({2.0, 0.0}) == Vec{1.0, 0.0});
    Vec p = walrex::project_simplex({0.0, 0.0, 0.0});
    for (double v : p) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    // huge pull in one coordinate pins the whole mass there
    p = walrex::project_simplex({-5.0, 9.0, -3.0});
    CHECK(p == Vec{0.0, 1.0, 0.0});
}

TEST_CASE("simplex projection: feasibility, idempotence, closest point") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_int_distribution<std::size_t> len(1, 12);
    for (int rep = 0; rep < 500; ++rep) {
        std::size_t n = len(gen);
        Vec v(n);
        for (double& x : v) x = u(gen);
        Vec p = walrex::project_simplex(v);

        double s = 0.0;
        for (double x : p) {
            CHECK(x >= 0.0);
            s += x;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

        Vec pp = walrex::project_simplex(p);
        for (std::size_t j = 0; j < n; ++j)
            CHECK(pp[j] == doctest::Approx(p[j]).epsilon(1e-13));

        // no random simplex point is closer to v than the projection
        std::gamma_distribution<double> gamma(1.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            Vec z(n);
            double zs = 0.0;
            for (double& x : z) {
                x = gamma(gen) + 1e-12;
                zs += x;
            }
            for (double& x : z) x /= zs;
            double dp = 0.0, dz = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                dp += (v[j] - p[j]) * (v[j] - p[j]);
                dz += (v[j] - z[j]) * (v[j] - z[j]);
            }
            CHECK(dp <= dz + 1e-12);
        }
    }
}

TEST_CASE("simplex projection rejects non-finite input") {
    CHECK_THROWS_AS(walrex::project_simplex({1.0, std::nan("")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(walrex::project_simplex({1.0, HUGE_VAL}), std::invalid_argument);
}

TEST_CASE("min_vertex picks smallest value, first index on ties") {
    auto [i, v] = walrex::min_vertex({3.0, -1.0, -1.0, 2.0});
    CHECK(i == 1);
    CHECK(v == -1.0);
    auto [i2, v2] = walrex::min_vertex({7.0});
    CHECK(i2 == 0);
    CHECK(v2 == 7.0);
}

TEST_CASE("lp: hand-checked instances") {
    // max x + y s.t. x <= 1, y <= 2
    Matrix A(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 1.0;
    auto r = walrex::solve_lp({1.0, 1.0}, A, {1.0, 2.0});
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.y[0] == doctest::Approx(1.0));
    CHECK(r.y[1] == doctest::Approx(2.0));
    CHECK(r.value == doctest::Approx(3.0));

    // infeasible: 0 <= y <= -1
    Matrix A1(1, 1);
    A1(0, 0) = 1.0;
    CHECK(walrex::solve_lp({1.0}, A1, {-1.0}).status == LpStatus::Infeasible);

    // unbounded: constraint never binds the improving ray
    Matrix A2(1, 1);
    A2(0, 0) = 0.0;
    CHECK(walrex::solve_lp({1.0}, A2, {5.0}).status == LpStatus::Unbounded);

    // degenerate: duplicated rows must not cycle (Bland)
    Matrix A3(3, 2);
    for (int rrow = 0; rrow < 3; ++rrow) {
        A3(rrow, 0) = 1.0;
        A3(rrow, 1) = 1.0;
    }
    auto r3 = walrex::solve_lp({1.0, 2.0}, A3, {1.0, 1.0, 1.0});
    REQUIRE(r3.status == LpStatus::Optimal);
    CHECK(r3.value == doctest::Approx(2.0));
}

TEST_CASE("lp agrees with vertex enumeration on random bounded instances") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.2, 2.5);
    std::uniform_int_distribution<std::size_t> nn(1, 4), mm(1, 4);
    int optimal_seen = 0;
    for (int rep = 0; rep < 400; ++rep) {
        std::size_t n = nn(gen), m = mm(gen);
        Vec c(n);
        for (double& x : c) x = coef(gen);
        Matrix A(m + 1, n);
        Vec b(m + 1);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) A(i, j) = coef(gen);
            b[i] = pos(gen);
        }
        for (std::size_t j = 0; j < n; ++j) A(m, j) = 1.0;  // sum y <= R bounds it
        b[m] = 4.0;

        auto r = walrex::solve_lp(c, A, b);
        REQUIRE(r.status == LpStatus::Optimal);  // y = 0 feasible, sum row bounds
        ++optimal_seen;

        for (double v : r.y) CHECK(v >= -1e-9);
        for (std::size_t i = 0; i <= m; ++i) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) lhs += A(i, j) * r.y[j];
            CHECK(lhs <= b[i] + 1e-8);
        }
        CHECK(r.value == doctest::Approx(dot(c, r.y)).epsilon(1e-10));

        auto verts = enumerate_vertices(c, A, b);
        REQUIRE(!verts.empty());
        double best = -1e300;
        for (const auto& bp : verts) best = std::max(best, bp.value);
        CHECK(r.value == doctest::Approx(best).epsilon(1e-8));
    }
    CHECK(optimal_seen == 400);
}

TEST_CASE("qp: diagonal fast path equals per-coordinate clamps") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_real_distribution<double> diag(0.3, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::size_t n = 1 + rep % 6;
        Vec c(n), b(n);
        Matrix A(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            c[j] = coef(gen);
            A(j, j) = diag(gen);
            b[j] = diag(gen);
        }
        double rho = diag(gen);
        auto r = walrex::solve_separable_qp(c, rho, A, b);
        for (std::size_t j = 0; j < n; ++j) {
            double want = std::clamp(c[j] / rho, 0.0, b[j] / A(j, j));
            CHECK(r.y[j] == doctest::Approx(want).epsilon(1e-12));
        }
        CHECK(r.value == doctest::Approx(qp_obj(c, rho, r.y)).epsilon(1e-12));
    }
}

TEST_CASE("qp: general path agrees with the active-set oracle") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> entry(0.0, 1.5);
    std::uniform_real_distribution<double> rhs(0.3, 2.0);
    std::uniform_int_distribution<std::size_t> nn(1, 3), mm(1, 3);
    for (int rep = 0; rep < 300; ++rep) {
        std::size_t n = nn(gen), m = mm(gen);
        Vec c(n), b(m);
        Matrix A(m, n);
        for (double& x : c) x = coef(gen);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) A(i, j) = entry(gen);
            b[i] = rhs(gen);  // b >= 0 keeps y = 0 feasible
        }
        double rho = 0.5 + entry(gen);
        auto r = walrex::solve_separable_qp(c, rho, A, b);
        Vec want = qp_oracle(c, rho, A, b);
        REQUIRE(!want.empty());
        for (std::size_t j = 0; j < n; ++j)
            CHECK(r.y[j] == doctest::Approx(want[j]).epsilon(1e-5));
        CHECK(qp_obj(c, rho, r.y) == doctest::Approx(qp_obj(c, rho, want)).epsilon(1e-8));
    }
}

TEST_CASE("qp: infeasibility and bad rho are reported") {
    Matrix A(1, 1);
    A(0, 0) = 1.0;
    CHECK_THROWS_AS(walrex::solve_separable_qp({1.0}, 1.0, A, {-0.5}), walrex::QpInfeasible);

    Matrix Z(1, 2);  // zero row with negative bound: 0 <= -2
    CHECK_THROWS_AS(walrex::solve_separable_qp({1.0, 1.0}, 1.0, Z, {-2.0}),
                    walrex::QpInfeasible);

    Matrix I1(1, 1);
    I1(0, 0) = 1.0;
    CHECK_THROWS_AS(walrex::solve_separable_qp({1.0}, 0.0, I1, {1.0}),
                    std::invalid_argument);

    // negative bound reachable through a mixed row is still feasible
    Matrix M(1, 2);
    M(0, 0) = -1.0;
    M(0, 1) = 1.0;  // -y0 + y1 <= -0.5, so y0 >= y1 + 0.5
    auto r = walrex::solve_separable_qp({1.0, 1.0}, 1.0, M, {-0.5});
    CHECK(-r.y[0] + r.y[1] <= -0.5 + 1e-8);
}
