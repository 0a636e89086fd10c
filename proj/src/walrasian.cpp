#include "walrex/walrasian.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "walrex/kernels.hpp"
#include "walrex/simplex.hpp"
#include "walrex/transfer.hpp"

namespace walrex {

Vec ExcessSupply::flat() const {
    Vec out = s0;
    for (const Vec& blk : s1) out.insert(out.end(), blk.begin(), blk.end());
    return out;
}

StageCaps demand_caps(const Economy& eco) {
    StageCaps caps;
    caps.cap0 = eco.aggregate_e0();
    for (std::size_t xi = 0; xi < eco.n_scenarios(); ++xi) {
        Vec cap = eco.aggregate_e1(xi);
        for (const Agent& a : eco.agents) {
            for (std::size_t k = 0; k < a.T0.cols; ++k) {
                double ymax = std::numeric_limits<double>::infinity();
                for (std::size_t g = 0; g < eco.n_goods; ++g)
                    if (a.T0(g, k) > 0.0) ymax = std::min(ymax, a.e0[g] / a.T0(g, k));
                if (!std::isfinite(ymax)) continue;  // validation rejects free activities
                for (std::size_t g = 0; g < eco.n_goods; ++g)
                    if (a.T1[xi](g, k) > 0.0) cap[g] += a.T1[xi](g, k) * ymax;
            }
        }
        caps.cap1.push_back(std::move(cap));
    }
    return caps;
}

namespace {

Vec stage0_available(const Agent& a, const Vec& y) {
    Vec avail = a.e0;
    if (!y.empty()) {
        Vec used = matvec(a.T0, y);
        for (std::size_t g = 0; g < avail.size(); ++g) {
            avail[g] -= used[g];
            if (avail[g] < 0.0) avail[g] = 0.0;  // QP/LP rounding dust
        }
    }
    return avail;
}

}  // namespace

Evaluation evaluate_economy(const Economy& eco, const PriceSystem& p, const EvalOptions& opt) {
    assert(p.p0.size() == eco.n_goods);
    assert(p.p1.size() == eco.n_scenarios());

    const StageCaps caps = demand_caps(eco);
    Evaluation ev;
    ev.s.s0.assign(eco.n_goods, 0.0);
    ev.s.s1.assign(eco.n_scenarios(), Vec(eco.n_goods, 0.0));

    for (const Agent& a : eco.agents) {
        AgentAllocation alloc;

        if (eco.model_class == ModelClass::Exchange) {
            alloc.x0 = demand(a.utility0, p.p0, kernels::dot(p.p0, a.e0), a.survival_lb,
                              caps.cap0);
            kernels::axpy(1.0, a.e0, ev.s.s0);
            kernels::axpy(-1.0, alloc.x0.x, ev.s.s0);
            ev.agents.push_back(std::move(alloc));
            continue;
        }

        if (eco.model_class == ModelClass::TwoStageDeterministic) {
            alloc.y = solve_transfer(a, p.p0, p.p1[0]);
        } else {
            PhResult ph = ph_solve(a, p, opt.ph);
            alloc.y = ph.y;
            alloc.ph_residual = ph.residual;
            alloc.ph_iterations = ph.iterations;
            alloc.ph_converged = ph.converged;
            if (!ph.converged && opt.throw_on_ph_failure)
                throw PhMaxIterExceeded("progressive hedging for agent '" + a.name +
                                            "' stopped at residual " +
                                            std::to_string(ph.residual),
                                        ph.residual);
        }

        Vec avail0 = stage0_available(a, alloc.y);
        alloc.x0 = demand(a.utility0, p.p0, plan_wealth(p.p0, avail0, a.survival_lb),
                          a.survival_lb, caps.cap0);
        kernels::axpy(1.0, avail0, ev.s.s0);
        kernels::axpy(-1.0, alloc.x0.x, ev.s.s0);

        for (std::size_t xi = 0; xi < eco.n_scenarios(); ++xi) {
            Vec avail1 = a.e1[xi];
            if (!alloc.y.empty()) kernels::axpy(1.0, matvec(a.T1[xi], alloc.y), avail1);
            DemandResult x1 = demand(*a.utility1, p.p1[xi],
                                     plan_wealth(p.p1[xi], avail1, a.survival_lb),
                                     a.survival_lb, caps.cap1[xi]);
            kernels::axpy(1.0, avail1, ev.s.s1[xi]);
            kernels::axpy(-1.0, x1.x, ev.s.s1[xi]);
            alloc.x1.push_back(std::move(x1));
        }
        ev.agents.push_back(std::move(alloc));
    }

#ifndef NDEBUG
    // lower bound: every agent demands at most the stage cap
    const double agents = static_cast<double>(eco.agents.size());
    for (std::size_t k = 0; k < ev.s.n_blocks(); ++k) {
        const Vec& cap = k == 0 ? caps.cap0 : caps.cap1[k - 1];
        for (std::size_t g = 0; g < eco.n_goods; ++g)
            assert(ev.s.block(k)[g] >= -agents * cap[g] - 1e-9);
    }
#endif
    return ev;
}

ExcessSupply excess_supply(const Economy& eco, const PriceSystem& p, const EvalOptions& opt) {
    return evaluate_economy(eco, p, opt).s;
}

double residual(const ExcessSupply& s) {
    double m = kernels::min_value(s.s0);
    for (const Vec& blk : s.s1) m = std::min(m, kernels::min_value(blk));
    return m < 0.0 ? -m : 0.0;
}

double walrasian_value(const ExcessSupply& s, const PriceSystem& q) {
    double v = kernels::dot(q.p0, s.s0);
    for (std::size_t xi = 0; xi < s.s1.size(); ++xi) v += kernels::dot(q.p1[xi], s.s1[xi]);
    return v;
}

namespace {

double augmented_block_selfdual(const Vec& s, const Vec& q, double r, Vec& z_out) {
    Vec target = q;
    kernels::axpy(-r, s, target);
    z_out = project_simplex(std::move(target));
    double dist2 = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        double d = z_out[j] - q[j];
        dist2 += d * d;
    }
    return kernels::dot(z_out, s) + dist2 / (2.0 * r);
}

double augmented_block_linf(const Vec& s, const Vec& q, double r, Vec& z_out) {
    const std::size_t n = s.size();
    Vec lo(n), width(n);
    double mass = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        lo[j] = std::max(0.0, q[j] - r);
        width[j] = q[j] + r - lo[j];
        mass -= lo[j];
    }
    // min <s,z> over the box slice of the simplex, as an LP in t = z - lo:
    // max <-s,t> s.t. t <= width, sum t = mass (two inequality rows), t >= 0
    Matrix A(n + 2, n);
    Vec b(n + 2);
    for (std::size_t j = 0; j < n; ++j) {
        A(j, j) = 1.0;
        b[j] = width[j];
        A(n, j) = 1.0;
        A(n + 1, j) = -1.0;
    }
    b[n] = mass;
    b[n + 1] = -mass;
    Vec c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = -s[j];
    LpResult lp = solve_lp(c, A, b);
    if (lp.status != LpStatus::Optimal)
        throw std::logic_error("sup-norm ball LP failed unexpectedly");
    z_out = lo;
    kernels::axpy(1.0, lp.y, z_out);
    return kernels::dot(z_out, s);
}

}  // namespace

AugmentedEval augmented_walrasian(const ExcessSupply& s, const PriceSystem& q, double r,
                                  Augmenting kind) {
    if (!(r > 0.0)) throw std::invalid_argument("augmentation parameter r must be positive");
    AugmentedEval ev;
    ev.z.p0.assign(s.s0.size(), 0.0);
    ev.z.p1.assign(s.s1.size(), Vec());
    for (std::size_t k = 0; k < s.n_blocks(); ++k) {
        const Vec& sb = s.block(k);
        const Vec& qb = q.block(k);
        Vec zb;
        ev.value += kind == Augmenting::SelfDual ? augmented_block_selfdual(sb, qb, r, zb)
                                                 : augmented_block_linf(sb, qb, r, zb);
        ev.z.block(k) = std::move(zb);
    }
    return ev;
}

}  // namespace walrex
