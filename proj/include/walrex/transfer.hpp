#pragma once

#include <utility>

#include "walrex/base.hpp"
#include "walrex/demand.hpp"
#include "walrex/economy.hpp"

namespace walrex {

// Transfer-first reduction of a two-stage agent: with homothetic stage
// utilities the indirect reward of an activity plan y is affine,
//   r(y) = alpha0 <p0, e0 - T0 y> + alpha1 <p1, e1 + T1 y>
//        = constant + <linear, y>.
struct RewardCoefficients {
    double constant = 0.0;
    Vec linear;
    double alpha0 = 0.0;  // stage multiplier at p0
    double alpha1 = 0.0;  // stage multiplier at p1 (scenario's stage-1 utility)
};

RewardCoefficients reward_coefficients(const Agent& a, const Vec& p0, const Vec& p1,
                                       std::size_t scenario);

// Plans the agent can execute at prices p: stage-0 resource rows T0 y <= e0,
// one affordability row keeping the stage-0 survival bundle within the
// post-transfer budget, <p0, T0 y> <= <p0, e0 - lb>, and one such row per
// scenario on the stage-1 side, <p1, T1 y> >= <p1, lb - e1>. Outside the
// polytope some stage cannot buy its survival bundle and demand is
// undefined. The deterministic LP and every hedging subproblem share the
// same polytope, so the belief-averaged hedging plan stays feasible by
// convexity even before the scenario plans agree. Validation guarantees
// every activity consumes some stage-0 good, which keeps the set bounded.
struct PlanPolytope {
    Matrix A;
    Vec b;
};

PlanPolytope plan_constraints(const Agent& a, const PriceSystem& p);

// Deterministic transfer plan: max <linear, y> over plan_constraints with the
// single stage-1 block p1. Throws InfeasibleBudget when no plan keeps both
// survival bundles affordable.
Vec solve_transfer(const Agent& a, const Vec& p0, const Vec& p1);

// Wealth <p, avail> of a post-transfer bundle. Optimal plans sit on the
// survival-affordability facet, where re-evaluating the dot product can land
// a few ulps below the bundle cost; lift those back onto the boundary so only
// a real shortfall reaches the demand solver.
double plan_wealth(const Vec& p, const Vec& avail, const Vec& survival_lb);

// Stage demands under the plan y: stage-0 wealth <p0, e0 - T0 y>, stage-1
// wealth <p1, e1 + T1 y>, caps supplied by the caller (aggregate endowments).
// Throws std::domain_error when T0 y overdraws e0 beyond 1e-10, naming the
// good; propagates InfeasibleBudget from the demand module.
std::pair<DemandResult, DemandResult> stage_demands(const Agent& a, const Vec& p0, const Vec& p1,
                                                    const Vec& y, const Vec& cap0,
                                                    const Vec& cap1, std::size_t scenario);

}  // namespace walrex
