#pragma once

#include <vector>

#include "walrex/base.hpp"
#include "walrex/economy.hpp"

namespace walrex {

struct PhConfig {
    double rho = 1.0;
    double tol = 1e-6;
    std::size_t max_iter = 500;
};

struct PhState {
    std::size_t iteration = 0;  // 1-based
    std::vector<Vec> y;         // per scenario
    Vec ybar;
    std::vector<Vec> w;         // multipliers after this iteration's update
    double residual = 0.0;      // max_xi |y(xi) - ybar|_inf
};

struct PhResult {
    Vec y;  // ybar at exit; feasible by convexity even without convergence
    bool converged = false;
    double residual = 0.0;
    std::size_t iterations = 0;
    std::vector<PhState> trace;
};

// Scenario subproblem coefficient: cbar(xi) = linear-reward(xi) - w(xi) +
// rho * ybar, so the subproblem is max <cbar, y> - (rho/2)|y|^2 over the
// shared plan polytope (plan_constraints) and y >= 0.
Vec ph_scenario_coefficients(const Agent& a, const Vec& p0, const Vec& p1_xi,
                             std::size_t scenario, const Vec& w_xi, const Vec& ybar, double rho);

// Progressive hedging on the agent's scenario-separable transfer problem.
// Multipliers start at 0 (belief-weighted mean 0) and stay belief-centered;
// stops when the non-anticipativity residual drops to tol. On hitting
// max_iter the last ybar is still returned with converged = false.
PhResult ph_solve(const Agent& a, const PriceSystem& p, const PhConfig& cfg = {});

}  // namespace walrex
