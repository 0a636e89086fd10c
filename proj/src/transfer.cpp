#include "walrex/transfer.hpp"

#include <cmath>

#include "walrex/kernels.hpp"
#include "walrex/simplex.hpp"

namespace walrex {

RewardCoefficients reward_coefficients(const Agent& a, const Vec& p0, const Vec& p1,
                                       std::size_t scenario) {
    RewardCoefficients rc;
    rc.alpha0 = stage_multiplier(a.utility0, p0);
    rc.alpha1 = stage_multiplier(*a.utility1, p1);
    rc.constant = rc.alpha0 * kernels::dot(p0, a.e0) + rc.alpha1 * kernels::dot(p1, a.e1[scenario]);
    Vec in_cost = matvec_t(a.T0, p0);             // stage-0 value absorbed per unit
    Vec out_value = matvec_t(a.T1[scenario], p1); // stage-1 value produced per unit
    rc.linear.assign(a.T0.cols, 0.0);
    for (std::size_t k = 0; k < a.T0.cols; ++k)
        rc.linear[k] = -rc.alpha0 * in_cost[k] + rc.alpha1 * out_value[k];
    return rc;
}

PlanPolytope plan_constraints(const Agent& a, const PriceSystem& p) {
    const std::size_t n = a.e0.size();
    const std::size_t m = a.T0.cols;
    const std::size_t ns = p.p1.size();

    PlanPolytope poly;
    poly.A = Matrix(n + 1 + ns, m);
    poly.b.assign(n + 1 + ns, 0.0);
    for (std::size_t g = 0; g < n; ++g) {
        for (std::size_t k = 0; k < m; ++k) poly.A(g, k) = a.T0(g, k);
        poly.b[g] = a.e0[g];
    }
    const Vec absorbed = matvec_t(a.T0, p.p0);
    for (std::size_t k = 0; k < m; ++k) poly.A(n, k) = absorbed[k];
    poly.b[n] = kernels::dot(p.p0, a.e0) - kernels::dot(p.p0, a.survival_lb);
    for (std::size_t xi = 0; xi < ns; ++xi) {
        const Vec produced = matvec_t(a.T1[xi], p.p1[xi]);
        for (std::size_t k = 0; k < m; ++k) poly.A(n + 1 + xi, k) = -produced[k];
        poly.b[n + 1 + xi] =
            kernels::dot(p.p1[xi], a.e1[xi]) - kernels::dot(p.p1[xi], a.survival_lb);
    }
    return poly;
}

Vec solve_transfer(const Agent& a, const Vec& p0, const Vec& p1) {
    if (a.T0.cols == 0) return {};
    RewardCoefficients rc = reward_coefficients(a, p0, p1, 0);
    PriceSystem p;
    p.p0 = p0;
    p.p1 = {p1};
    const PlanPolytope poly = plan_constraints(a, p);
    LpResult lp = solve_lp(rc.linear, poly.A, poly.b);
    if (lp.status == LpStatus::Infeasible)
        throw InfeasibleBudget("no transfer plan keeps the survival bundle affordable for agent '" +
                               a.name + "'");
    if (lp.status != LpStatus::Optimal)
        throw std::logic_error("transfer plan LP failed; is some activity free of stage-0 inputs?");
    return lp.y;
}

double plan_wealth(const Vec& p, const Vec& avail, const Vec& survival_lb) {
    const double w = kernels::dot(p, avail);
    const double floor_cost = kernels::dot(p, survival_lb);
    return w < floor_cost && w > floor_cost - 1e-9 * (1.0 + floor_cost) ? floor_cost : w;
}

std::pair<DemandResult, DemandResult> stage_demands(const Agent& a, const Vec& p0, const Vec& p1,
                                                    const Vec& y, const Vec& cap0,
                                                    const Vec& cap1, std::size_t scenario) {
    Vec used = matvec(a.T0, y);
    Vec avail0 = a.e0;
    for (std::size_t g = 0; g < avail0.size(); ++g) {
        avail0[g] -= used[g];
        if (avail0[g] < -1e-10)
            throw std::domain_error("transfer plan overdraws stage-0 good " +
                                    std::to_string(g + 1));
        if (avail0[g] < 0.0) avail0[g] = 0.0;
    }
    Vec gained = matvec(a.T1[scenario], y);
    Vec avail1 = a.e1[scenario];
    kernels::axpy(1.0, gained, avail1);

    DemandResult x0 = demand(a.utility0, p0, plan_wealth(p0, avail0, a.survival_lb),
                             a.survival_lb, cap0);
    DemandResult x1 = demand(*a.utility1, p1, plan_wealth(p1, avail1, a.survival_lb),
                             a.survival_lb, cap1);
    return {std::move(x0), std::move(x1)};
}

}  // namespace walrex
