#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "walrex/demand.hpp"

using namespace walrex;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec huge_cap(std::size_t n) { return Vec(n, 1e18); }

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// random interior price vector on the simplex, entries bounded away from 0
Vec random_prices(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Vec p(n);
    double s = 0.0;
    for (double& v : p) {
        v = u(gen);
        s += v;
    }
    for (double& v : p) v /= s;
    return p;
}

UtilitySpec random_utility(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    if (gen() % 2 == 0) {
        Vec beta(n);
        double s = 0.0;
        for (double& v : beta) {
            v = u(gen);
            s += v;
        }
        for (double& v : beta) v /= s;
        return CobbDouglas{beta};
    }
    Vec a(n);
    for (double& v : a) v = u(gen);
    static const double bs[] = {0.3, 0.5, 0.8, 1.3, 2.0, 3.0};
    return Ces{a, bs[gen() % 6]};
}

// feasible random bundle: spend random budget shares, then clamp to the box
Vec random_feasible(std::mt19937_64& gen, const Vec& p, double wealth, const Vec& lb,
                    const Vec& cap) {
    const std::size_t n = p.size();
    std::gamma_distribution<double> g(1.0, 1.0);
    Vec share(n);
    double s = 0.0;
    for (double& v : share) {
        v = g(gen) + 1e-9;
        s += v;
    }
    double base = dot(p, lb);
    Vec x = lb;
    double left = wealth - base;
    for (std::size_t j = 0; j < n; ++j) {
        double add = left * share[j] / s / p[j];
        x[j] = std::min(lb[j] + add, cap[j]);
    }
    return x;
}

}  // namespace

TEST_CASE("utility values at hand-checked points") {
    CHECK(utility_value(CobbDouglas{{0.3, 0.7}}, {1.0, 1.0}) == doctest::Approx(1.0));
    CHECK(utility_value(CobbDouglas{{0.3, 0.7}}, {2.0, 2.0}) == doctest::Approx(2.0));
    CHECK(utility_value(CobbDouglas{{0.5, 0.5}}, {4.0, 1.0}) == doctest::Approx(2.0));

    Ces sym{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.5};
    CHECK(utility_value(sym, {1.0, 1.0, 1.0}) == doctest::Approx(3.0).epsilon(1e-12));

    // complements (b < 1) die at a zero component, substitutes (b > 1) do not
    CHECK(utility_value(sym, {1.0, 0.0, 1.0}) == 0.0);
    CHECK(utility_value(CobbDouglas{{0.3, 0.7}}, {1.0, 0.0}) == 0.0);
    CHECK(utility_value(Ces{{0.5, 0.5}, 2.0}, {1.0, 0.0}) ==
          doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(utility_value(sym, {1.0, -0.1, 1.0}), std::domain_error);
}

TEST_CASE("interior closed forms: frozen three-good instance") {
    // symmetric CES agent at the classic skewed start prices
    Ces u{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.5};
    Vec p{0.12, 0.56, 0.32};
    DemandResult d = demand(u, p, 1.0, Vec(3, 0.001), {2.0, 2.0, 2.0});
    CHECK(d.x[0] == doctest::Approx(1.738559560280024).epsilon(1e-12));
    CHECK(d.x[1] == doctest::Approx(0.8047966927794874).epsilon(1e-12));
    CHECK(d.x[2] == doctest::Approx(1.0646459525308878).epsilon(1e-12));
    CHECK(d.spent == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.utility == doctest::Approx(3.264396492212356).epsilon(1e-12));
    for (Bound b : d.bound) CHECK(b == Bound::Interior);

    CHECK(stage_multiplier(u, p) == doctest::Approx(3.264396492212356).epsilon(1e-12));
    CHECK(stage_multiplier(CobbDouglas{{0.3, 0.7}}, {0.5, 0.5}) ==
          doctest::Approx(1.0857629053796507).epsilon(1e-12));
}

TEST_CASE("no random feasible bundle beats the returned demand") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> wdist(0.5, 3.0);
    for (int rep = 0; rep < 120; ++rep) {
        std::size_t n = 2 + rep % 3;
        UtilitySpec u = random_utility(gen, n);
        Vec p = random_prices(gen, n);
        double w = wdist(gen);
        Vec lb(n, 0.01), cap(n, rep % 2 ? 4.0 : 1e18);

        DemandResult d = demand(u, p, w, lb, cap);
        double ud = utility_value(u, d.x);
        CHECK(dot(p, d.x) <= w * (1.0 + 1e-10));
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(d.x[j] >= lb[j] * (1.0 - 1e-12));
            CHECK(d.x[j] <= cap[j] * (1.0 + 1e-12));
        }
        for (int trial = 0; trial < 400; ++trial) {
            Vec x = random_feasible(gen, p, w, lb, cap);
            CHECK(utility_value(u, x) <= ud * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("two-good grid search pins the maximizer") {
    std::mt19937_64 gen(77);
    for (int rep = 0; rep < 40; ++rep) {
        UtilitySpec u = random_utility(gen, 2);
        Vec p = random_prices(gen, 2);
        double w = 1.0;
        Vec lb(2, 0.0), cap = huge_cap(2);
        DemandResult d = demand(u, p, w, lb, cap);

        double best = -1.0;
        const int steps = 40000;
        for (int i = 0; i <= steps; ++i) {
            double t = double(i) / steps;  // budget share of good 1
            Vec x{t * w / p[0], (1.0 - t) * w / p[1]};
            best = std::max(best, utility_value(u, x));
        }
        CHECK(utility_value(u, d.x) >= best * (1.0 - 1e-8));
    }
}

TEST_CASE("budget exhausts when caps stay slack") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> wdist(0.2, 5.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::size_t n = 2 + rep % 4;
        UtilitySpec u = random_utility(gen, n);
        Vec p = random_prices(gen, n);
        double w = wdist(gen);
        DemandResult d = demand(u, p, w, Vec(n, 0.0), huge_cap(n));
        CHECK(d.spent == doctest::Approx(w).epsilon(1e-12));
        CHECK(dot(p, d.x) == doctest::Approx(w).epsilon(1e-10));
    }
}

TEST_CASE("demand is homogeneous of degree zero in (p, wealth)") {
    std::mt19937_64 gen(57);
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t n = 2 + rep % 3;
        UtilitySpec u = random_utility(gen, n);
        Vec p = random_prices(gen, n);
        DemandResult d1 = demand(u, p, 1.3, Vec(n, 0.01), Vec(n, 5.0));
        Vec ps = p;
        for (double& v : ps) v *= 100.0;
        DemandResult d2 = demand(u, ps, 130.0, Vec(n, 0.01), Vec(n, 5.0));
        for (std::size_t j = 0; j < n; ++j)
            CHECK(d1.x[j] == doctest::Approx(d2.x[j]).epsilon(1e-9));
    }
}

TEST_CASE("homotheticity: indirect utility is the multiplier times wealth") {
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> wdist(0.5, 4.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t n = 2 + rep % 3;
        UtilitySpec u = random_utility(gen, n);
        Vec p = random_prices(gen, n);
        double w = wdist(gen);
        DemandResult d = demand(u, p, w, Vec(n, 0.0), huge_cap(n));
        CHECK(d.utility == doctest::Approx(stage_multiplier(u, p) * w).epsilon(1e-9));
    }
}

TEST_CASE("box-bound handling") {
    // tiny price on good 1 pushes its demand into the cap
    CobbDouglas u{{0.5, 0.5}};
    Vec p{0.01, 0.99};
    DemandResult d = demand(u, p, 1.0, Vec(2, 0.0), {3.0, 3.0});
    CHECK(d.x[0] == doctest::Approx(3.0));
    CHECK(d.bound[0] == Bound::Upper);
    // leftover budget spills into good 2 beyond its interior share
    CHECK(d.x[1] == doctest::Approx((1.0 - 0.01 * 3.0) / 0.99).epsilon(1e-10));
    CHECK(d.bound[1] == Bound::Interior);

    // expensive good 2 falls to its floor; floor purchase still paid for
    DemandResult d2 = demand(CobbDouglas{{0.95, 0.05}}, {0.2, 0.8}, 1.0, Vec(2, 0.5),
                             huge_cap(2));
    CHECK(d2.x[1] == doctest::Approx(0.5));
    CHECK(d2.bound[1] == Bound::Lower);
    CHECK(dot(Vec{0.2, 0.8}, d2.x) == doctest::Approx(1.0).epsilon(1e-10));

    // zero-weight goods are pinned at the floor
    DemandResult d3 = demand(CobbDouglas{{1.0, 0.0}}, {0.5, 0.5}, 1.0, Vec(2, 0.1),
                             huge_cap(2));
    CHECK(d3.x[1] == doctest::Approx(0.1));
}

TEST_CASE("subsistence boundary and infeasible budgets") {
    CobbDouglas u{{0.4, 0.6}};
    Vec p{0.5, 0.5}, lb{0.3, 0.3};
    // exactly affordable floor: the floor is the only feasible bundle
    DemandResult d = demand(u, p, 0.3, lb, huge_cap(2));
    CHECK(d.x[0] == doctest::Approx(0.3));
    CHECK(d.x[1] == doctest::Approx(0.3));

    CHECK_THROWS_AS(demand(u, p, 0.29, lb, huge_cap(2)), InfeasibleBudget);
    CHECK_THROWS_AS(demand(u, p, 0.0, lb, huge_cap(2)), InfeasibleBudget);
}

TEST_CASE("equal marginal utility per unit price across interior goods") {
    std::mt19937_64 gen(203);
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t n = 3;
        UtilitySpec u = random_utility(gen, n);
        Vec p = random_prices(gen, n);
        DemandResult d = demand(u, p, 2.0, Vec(n, 0.0), huge_cap(n));

        const double h = 1e-6;
        Vec bang(n);
        for (std::size_t j = 0; j < n; ++j) {
            Vec xp = d.x, xm = d.x;
            xp[j] += h;
            xm[j] -= h;
            bang[j] = (utility_value(u, xp) - utility_value(u, xm)) / (2.0 * h) / p[j];
        }
        for (std::size_t j = 1; j < n; ++j)
            CHECK(bang[j] == doctest::Approx(bang[0]).epsilon(1e-4));
    }
}
