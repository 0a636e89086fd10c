#include "walrex/hedging.hpp"

#include <cmath>

#include "walrex/kernels.hpp"
#include "walrex/simplex.hpp"
#include "walrex/transfer.hpp"

namespace walrex {

Vec ph_scenario_coefficients(const Agent& a, const Vec& p0, const Vec& p1_xi,
                             std::size_t scenario, const Vec& w_xi, const Vec& ybar,
                             double rho) {
    RewardCoefficients rc = reward_coefficients(a, p0, p1_xi, scenario);
    Vec cbar = rc.linear;
    for (std::size_t k = 0; k < cbar.size(); ++k) cbar[k] += rho * ybar[k] - w_xi[k];
    return cbar;
}

PhResult ph_solve(const Agent& a, const PriceSystem& p, const PhConfig& cfg) {
    const std::size_t m = a.T0.cols;
    const std::size_t ns = p.p1.size();

    PhResult res;
    res.y.assign(m, 0.0);
    if (m == 0 || ns == 0) {
        res.converged = true;
        res.iterations = ns == 0 ? 0 : 1;
        return res;
    }

    std::vector<Vec> w(ns, Vec(m, 0.0));
    Vec ybar(m, 0.0);
    std::vector<Vec> y(ns);
    const PlanPolytope poly = plan_constraints(a, p);

    for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
        for (std::size_t xi = 0; xi < ns; ++xi) {
            Vec cbar = ph_scenario_coefficients(a, p.p0, p.p1[xi], xi, w[xi], ybar, cfg.rho);
            y[xi] = solve_separable_qp(cbar, cfg.rho, poly.A, poly.b).y;
        }
        Vec next(m, 0.0);
        for (std::size_t xi = 0; xi < ns; ++xi) kernels::axpy(a.beliefs[xi], y[xi], next);
        double residual = 0.0;
        for (std::size_t xi = 0; xi < ns; ++xi)
            residual = std::max(residual, kernels::max_abs_diff(y[xi], next));
        ybar = next;

        bool done = residual <= cfg.tol;
        if (!done)
            for (std::size_t xi = 0; xi < ns; ++xi)
                for (std::size_t k = 0; k < m; ++k)
                    w[xi][k] += cfg.rho * (y[xi][k] - ybar[k]);

        PhState st;
        st.iteration = iter;
        st.y = y;
        st.ybar = ybar;
        st.w = w;
        st.residual = residual;
        res.trace.push_back(std::move(st));

        res.residual = residual;
        res.iterations = iter;
        if (done) {
            res.converged = true;
            break;
        }
    }
    res.y = ybar;
    return res;
}

}  // namespace walrex
