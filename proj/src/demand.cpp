#include "walrex/demand.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>

#include "walrex/kernels.hpp"

namespace walrex {

namespace {

void require_nonneg(const Vec& x) {
    for (double v : x)
        if (!(v >= 0.0)) throw std::domain_error("bundle component must be nonnegative");
}

double cd_utility(const CobbDouglas& u, const Vec& x) {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (u.beta[j] == 0.0) continue;
        if (x[j] == 0.0) return 0.0;
        acc += u.beta[j] * std::log(x[j]);
    }
    return std::exp(acc);
}

double ces_utility(const Ces& u, const Vec& x) {
    const double b = u.b;
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (u.a[j] == 0.0) continue;
        if (x[j] == 0.0) {
            if (b < 1.0) return 0.0;
            continue;
        }
        s += std::pow(u.a[j], 1.0 / b) * std::pow(x[j], (b - 1.0) / b);
    }
    if (s == 0.0) return 0.0;
    return std::pow(s, b / (b - 1.0));
}

}  // namespace

double utility_value(const UtilitySpec& u, const Vec& x) {
    require_nonneg(x);
    if (const auto* cd = std::get_if<CobbDouglas>(&u)) return cd_utility(*cd, x);
    return ces_utility(std::get<Ces>(u), x);
}

double stage_multiplier(const UtilitySpec& u, const Vec& p) {
    for (double v : p)
        if (!(v > 0.0)) throw std::domain_error("price must be strictly positive");
    if (const auto* cd = std::get_if<CobbDouglas>(&u)) {
        double acc = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
            if (cd->beta[j] > 0.0)
                acc += cd->beta[j] * (std::log(cd->beta[j]) - std::log(p[j]));
        return std::exp(acc);
    }
    const auto& ces = std::get<Ces>(u);
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (ces.a[j] > 0.0) s += ces.a[j] * std::pow(p[j], 1.0 - ces.b);
    return std::pow(s, 1.0 / (ces.b - 1.0));
}

DemandResult demand(const UtilitySpec& u, const Vec& p, double wealth, const Vec& lb,
                    const Vec& cap) {
    const std::size_t n = p.size();
    for (double v : p)
        if (!(v > 0.0)) throw std::domain_error("price must be strictly positive");

    const auto* cd = std::get_if<CobbDouglas>(&u);
    const auto* ces = cd ? nullptr : &std::get<Ces>(u);
    const Vec& weight = cd ? cd->beta : ces->a;
    const double mult_exp = cd ? 1.0 : ces->b;  // x_j(lambda) = k_j * lambda^-mult_exp

    double need = kernels::dot(p, lb);
    if (wealth < need - 1e-12 * std::max(1.0, std::abs(wealth))) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "wealth %.12g cannot cover the survival bundle costing %.12g (short by %.3e)",
                      wealth, need, need - wealth);
        throw InfeasibleBudget(msg);
    }
    const double target = std::max(wealth, need);

    DemandResult res;
    res.x = lb;
    res.bound.assign(n, Bound::Lower);

    // k_j carries the closed form: beta_j/p_j (Cobb-Douglas), a_j p_j^-b (CES)
    Vec k(n, 0.0);
    double pk = 0.0;       // sum_j p_j k_j over weighted goods
    double cap_cost = 0.0; // cost of the caps on weighted goods
    double lb_cost = 0.0;  // cost of the floors on weighted goods
    double pinned_cost = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (weight[j] == 0.0) {
            pinned_cost += p[j] * lb[j];
            continue;
        }
        k[j] = cd ? cd->beta[j] / p[j] : ces->a[j] * std::pow(p[j], -ces->b);
        pk += p[j] * k[j];
        cap_cost += p[j] * cap[j];
        lb_cost += p[j] * lb[j];
    }

    const double budget = target - pinned_cost;  // for the weighted goods
    auto finish = [&] {
        res.spent = kernels::dot(p, res.x);
        res.utility = utility_value(u, res.x);
        return res;
    };

    if (pk == 0.0) return finish();  // no weighted goods: pinned bundle

    if (budget <= lb_cost + 1e-12 * std::max(1.0, budget)) return finish();  // subsistence

    if (cap_cost <= budget) {  // whole cap affordable, budget may stay slack
        for (std::size_t j = 0; j < n; ++j)
            if (weight[j] > 0.0) {
                res.x[j] = cap[j];
                res.bound[j] = Bound::Upper;
            }
        return finish();
    }

    auto classify = [&](double xj, std::size_t j) {
        double scale = 1.0 + std::abs(xj);
        if (xj - lb[j] <= 1e-12 * scale) return Bound::Lower;
        if (cap[j] - xj <= 1e-12 * scale) return Bound::Upper;
        return Bound::Interior;
    };

    // interior closed form first
    {
        bool inside = true;
        double t = budget / pk;
        for (std::size_t j = 0; j < n && inside; ++j) {
            if (weight[j] == 0.0) continue;
            double xj = k[j] * t;
            if (xj < lb[j] - 1e-14 * (1.0 + lb[j]) || xj > cap[j] + 1e-14 * (1.0 + cap[j]))
                inside = false;
        }
        if (inside) {
            for (std::size_t j = 0; j < n; ++j) {
                if (weight[j] == 0.0) continue;
                double xj = std::clamp(k[j] * t, lb[j], cap[j]);
                res.x[j] = xj;
                res.bound[j] = classify(xj, j);
            }
            return finish();
        }
    }

    // clamped KKT path, bisected on the budget multiplier lambda; the path is
    // componentwise nonincreasing in lambda so the bracket budgets must stay
    // ordered (asserted below)
    auto spend_at = [&](double lambda, Vec* x_out) {
        double t = std::pow(lambda, -mult_exp);
        double spend = pinned_cost;
        for (std::size_t j = 0; j < n; ++j) {
            if (weight[j] == 0.0) continue;
            double xj = std::clamp(k[j] * t, lb[j], cap[j]);
            spend += p[j] * xj;
            if (x_out) (*x_out)[j] = xj;
        }
        return spend;
    };

    double lo = 1.0, hi = 1.0;
    for (int i = 0; i < 600 && spend_at(lo, nullptr) < target; ++i) lo *= 0.25;
    for (int i = 0; i < 600 && spend_at(hi, nullptr) > target; ++i) hi *= 4.0;
    double spend_lo = spend_at(lo, nullptr);
    double spend_hi = spend_at(hi, nullptr);
    const double tol = 1e-12 * std::max(1.0, target);
    double lambda = lo;
    for (int it = 0; it < 200; ++it) {
        assert(spend_lo >= spend_hi - tol);
        lambda = 0.5 * (lo + hi);
        double s = spend_at(lambda, nullptr);
        if (std::abs(s - target) <= tol) break;
        if (s > target) {
            lo = lambda;
            spend_lo = s;
        } else {
            hi = lambda;
            spend_hi = s;
        }
    }
    spend_at(lambda, &res.x);
    for (std::size_t j = 0; j < n; ++j)
        if (weight[j] > 0.0) res.bound[j] = classify(res.x[j], j);
    return finish();
}

}  // namespace walrex
