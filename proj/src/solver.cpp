#include "walrex/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "walrex/kernels.hpp"
#include "walrex/simplex.hpp"

namespace walrex {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

std::vector<std::int64_t> price_key(const PriceSystem& p) {
    Vec flat = p.flat();
    std::vector<std::int64_t> key(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i)
        key[i] = std::llround(flat[i] * 1e12);
    return key;
}

// Simplex chart per block: all but the last coordinate. Expansion projects
// back onto the simplex when the chart point wandered out, then floors at
// delta and renormalizes. The chart representative returned alongside is the
// pre-floor projected point, which makes the mapping reproducible when a
// point is re-centered.
struct Chart {
    std::vector<std::size_t> block_size;
    std::size_t dim = 0;

    explicit Chart(const PriceSystem& p) {
        for (std::size_t k = 0; k < p.n_blocks(); ++k) {
            block_size.push_back(p.block(k).size());
            dim += p.block(k).size() - 1;
        }
    }

    Vec from_prices(const PriceSystem& p) const {
        Vec x;
        x.reserve(dim);
        for (std::size_t k = 0; k < p.n_blocks(); ++k)
            x.insert(x.end(), p.block(k).begin(), p.block(k).end() - 1);
        return x;
    }

    struct Expanded {
        PriceSystem prices;  // floored, renormalized
        Vec chart;           // chart coords of the pre-floor projected point
    };

    Expanded expand(const Vec& x, double delta) const {
        Expanded ex;
        std::size_t off = 0;
        for (std::size_t k = 0; k < block_size.size(); ++k) {
            const std::size_t nb = block_size[k];
            Vec blk(nb);
            double sum = 0.0;
            bool inside = true;
            for (std::size_t j = 0; j + 1 < nb; ++j) {
                blk[j] = x[off + j];
                sum += blk[j];
                if (blk[j] < 0.0 || blk[j] > 1.0) inside = false;
            }
            blk[nb - 1] = 1.0 - sum;
            if (blk[nb - 1] < 0.0 || blk[nb - 1] > 1.0) inside = false;
            if (!inside) blk = project_simplex(std::move(blk));
            ex.chart.insert(ex.chart.end(), blk.begin(), blk.end() - 1);

            kernels::floor_inplace(blk, delta);
            kernels::scale(blk, 1.0 / kernels::sum(blk));
            if (k == 0)
                ex.prices.p0 = std::move(blk);
            else
                ex.prices.p1.push_back(std::move(blk));
            off += nb - 1;
        }
        return ex;
    }
};

}  // namespace

Evaluator::Evaluator(const Economy& eco, const SolverConfig& cfg) : eco_(eco) {
    opt_.ph = cfg.ph;
    opt_.throw_on_ph_failure = false;  // solver degrades gracefully, logs residuals
}

const Evaluator::Entry& Evaluator::eval(const PriceSystem& p) {
    ++lookups_;
    auto key = price_key(p);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    ++misses_;
    Evaluation ev = evaluate_economy(eco_, p, opt_);
    Entry entry;
    entry.s = std::move(ev.s);
    if (eco_.model_class == ModelClass::TwoStageStochastic)
        for (const AgentAllocation& a : ev.agents) entry.ph_residuals.push_back(a.ph_residual);
    return cache_.emplace(std::move(key), std::move(entry)).first->second;
}

PriceSystem phase1(const ExcessSupply& s, const PriceSystem& p, double r) {
    (void)r;  // the argmin is the same vertex for every r > 0 and both kernels
    PriceSystem q;
    q.p0.assign(p.p0.size(), 0.0);
    q.p0[min_vertex(s.s0).first] = 1.0;
    for (std::size_t xi = 0; xi < s.s1.size(); ++xi) {
        Vec blk(p.p1[xi].size(), 0.0);
        blk[min_vertex(s.s1[xi]).first] = 1.0;
        q.p1.push_back(std::move(blk));
    }
    return q;
}

namespace {

// Trust-region ascent on f(x) = augmented_walrasian(s(expand(x)), q, r).
// Each sweep spends 2*dim evaluations on a central-difference stencil that
// doubles as a Jacobian estimate of the flat excess supply, then proposes
//   (a) the linearized blockwise max-min step (an LP over the trust region,
//       the right model when r is large and f is a kinked min over goods),
//   (b) a line search along the exact gradient J^T z* (Danskin, since the
//       inner argmin z* is unique for the self-dual kernel),
//   (c) the best raw stencil point,
// and accepts whichever scores best on the true objective.
PriceSystem phase2_impl(Evaluator& ev, const PriceSystem& q, const PriceSystem& p_start,
                        double r, const SolverConfig& cfg) {
    const Chart chart(p_start);
    const std::size_t dim = chart.dim;
    const std::size_t n_blocks = chart.block_size.size();

    struct Probe {
        double f = -std::numeric_limits<double>::infinity();
        Chart::Expanded ex;
        Vec s_flat;
    };
    std::size_t evals = 0;
    auto probe = [&](const Vec& x, Probe& out) {
        out.ex = chart.expand(x, cfg.delta);
        const ExcessSupply& s = ev.eval(out.ex.prices).s;
        out.s_flat = s.flat();
        out.f = augmented_walrasian(s, q, r, cfg.augmenting).value;
        ++evals;
    };

    Probe cur;
    Vec x = chart.from_prices(p_start);
    probe(x, cur);
    x = cur.ex.chart;

    PriceSystem best_p = cur.ex.prices;
    double best_f = cur.f;

    const std::size_t n_flat = cur.s_flat.size();
    // chart coordinate k lives in block_of[k]; flat good j in flat_block[j]
    std::vector<std::size_t> block_of(dim), flat_block(n_flat);
    {
        std::size_t ck = 0, fj = 0;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            for (std::size_t k = 0; k + 1 < chart.block_size[b]; ++k) block_of[ck++] = b;
            for (std::size_t j = 0; j < chart.block_size[b]; ++j) flat_block[fj++] = b;
        }
    }

    double R = cfg.phase2_step_init;
    Matrix J(n_flat, dim);
    Probe scratch, stencil, cand;

    while (R > cfg.phase2_step_tol && evals + 2 * dim + 8 <= cfg.phase2_max_evals) {
        const double h = std::clamp(0.25 * R, 1e-8, 0.05);

        stencil.f = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < dim; ++k) {
            Vec xp = x;
            xp[k] += h;
            probe(xp, scratch);
            if (scratch.f > stencil.f) stencil = scratch;
            Vec sp = std::move(scratch.s_flat);
            Vec xm = x;
            xm[k] -= h;
            probe(xm, scratch);
            if (scratch.f > stencil.f) stencil = scratch;
            for (std::size_t j = 0; j < n_flat; ++j)
                J(j, k) = (sp[j] - scratch.s_flat[j]) / (2.0 * h);
        }

        Probe best_cand = stencil;

        // (a) linearized max-min LP: maximize sum_b t_b subject to
        //     s + J d >= t blockwise, |d| <= R, chart box and block sums.
        {
            Vec lo(dim), width(dim);
            for (std::size_t k = 0; k < dim; ++k) {
                lo[k] = std::min(R, x[k]);  // d_k >= -lo
                width[k] = lo[k] + std::min(R, 1.0 - x[k]);
            }
            Vec block_min(n_blocks, std::numeric_limits<double>::infinity());
            for (std::size_t j = 0; j < n_flat; ++j)
                block_min[flat_block[j]] = std::min(block_min[flat_block[j]], cur.s_flat[j]);

            // variables: u_k = d_k + lo_k, then tau_b = t_b - block_min_b
            const std::size_t nv = dim + n_blocks;
            const std::size_t n_rows = n_flat + dim + n_blocks;
            Matrix A(n_rows, nv);
            Vec b(n_rows, 0.0), c(nv, 0.0);
            for (std::size_t j = 0; j < n_flat; ++j) {
                double rhs = cur.s_flat[j] - block_min[flat_block[j]];
                for (std::size_t k = 0; k < dim; ++k) {
                    A(j, k) = -J(j, k);
                    rhs -= J(j, k) * lo[k];
                }
                A(j, dim + flat_block[j]) = 1.0;
                b[j] = rhs;
            }
            for (std::size_t k = 0; k < dim; ++k) {
                A(n_flat + k, k) = 1.0;
                b[n_flat + k] = width[k];
            }
            for (std::size_t bl = 0; bl < n_blocks; ++bl) {
                double slack = 1.0;
                for (std::size_t k = 0; k < dim; ++k)
                    if (block_of[k] == bl) {
                        A(n_flat + dim + bl, k) = 1.0;
                        slack -= x[k] - lo[k];
                    }
                b[n_flat + dim + bl] = slack;
            }
            for (std::size_t bl = 0; bl < n_blocks; ++bl) c[dim + bl] = 1.0;

            LpResult lp = solve_lp(c, A, b);
            if (lp.status == LpStatus::Optimal) {
                Vec xl = x;
                bool moved = false;
                for (std::size_t k = 0; k < dim; ++k) {
                    xl[k] += lp.y[k] - lo[k];
                    if (std::abs(lp.y[k] - lo[k]) > 1e-15) moved = true;
                }
                if (moved) {
                    probe(xl, cand);
                    if (cand.f > best_cand.f) best_cand = cand;
                }
            }
        }

        // (b) exact-gradient line search
        {
            Vec zstar =
                augmented_walrasian(ev.eval(cur.ex.prices).s, q, r, cfg.augmenting).z.flat();
            Vec g(dim, 0.0);
            for (std::size_t j = 0; j < n_flat; ++j)
                if (zstar[j] != 0.0)
                    for (std::size_t k = 0; k < dim; ++k) g[k] += zstar[j] * J(j, k);
            double gmax = 0.0;
            for (double v : g) gmax = std::max(gmax, std::abs(v));
            if (gmax > 0.0) {
                double t = R / gmax;
                for (int trial = 0; trial < 3; ++trial, t *= 0.25) {
                    Vec xg = x;
                    kernels::axpy(t, g, xg);
                    probe(xg, cand);
                    if (cand.f > best_cand.f) best_cand = cand;
                    if (cand.f > cur.f) break;
                }
            }
        }

        const double margin = 1e-15 * (1.0 + std::abs(cur.f));

        // At extreme prices several demands can sit on their truncation caps
        // at once, making s locally constant: the stencil, the LP model, and
        // the gradient all see a flat plateau. Demands release toward the
        // uniform system, so blend that way before conceding the sweep.
        if (best_cand.f <= cur.f + margin) {
            for (double t : {0.5, 1.0}) {
                Vec xc(dim);
                std::size_t off = 0;
                for (std::size_t b = 0; b < n_blocks; ++b) {
                    const double u = 1.0 / static_cast<double>(chart.block_size[b]);
                    for (std::size_t j = 0; j + 1 < chart.block_size[b]; ++j, ++off)
                        xc[off] = (1.0 - t) * x[off] + t * u;
                }
                probe(xc, cand);
                if (cand.f > best_cand.f) best_cand = cand;
                if (best_cand.f > cur.f + margin) break;
            }
        }

        if (best_cand.f > cur.f + margin) {
            x = best_cand.ex.chart;
            cur = best_cand;
            if (cur.f > best_f) {
                best_f = cur.f;
                best_p = cur.ex.prices;
            }
            R = std::min(R * 1.5, 0.5);
        } else {
            R *= 0.4;
        }
    }
    return best_p;
}

PriceSystem feasible_start(const PriceSystem& p, double delta) {
    Chart chart(p);
    return chart.expand(chart.from_prices(p), delta).prices;
}

PriceSystem random_start(const Economy& eco, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(std::numeric_limits<double>::min(), 1.0);
    auto draw_block = [&](std::size_t n) {
        Vec blk(n);
        for (double& v : blk) v = -std::log(unif(rng));
        kernels::scale(blk, 1.0 / kernels::sum(blk));
        return blk;
    };
    PriceSystem p;
    p.p0 = draw_block(eco.n_goods);
    for (std::size_t xi = 0; xi < eco.n_scenarios(); ++xi)
        p.p1.push_back(draw_block(eco.n_goods));
    return p;
}

}  // namespace

PriceSystem phase2(const Economy& eco, const PriceSystem& q, const PriceSystem& p_start,
                   double r, const SolverConfig& cfg) {
    Evaluator ev(eco, cfg);
    return phase2_impl(ev, q, p_start, r, cfg);
}

SolveResult solve(const Economy& eco, const Start& start, const SolverConfig& cfg) {
    {
        std::vector<Violation> v = validate(eco);
        if (!v.empty())
            throw std::invalid_argument("invalid economy: " + v.front().path + ": " +
                                        v.front().message);
    }
    const auto t_start = clock_type::now();

    PriceSystem p;
    switch (start.kind) {
        case Start::Centroid: p = PriceSystem::centroid(eco); break;
        case Start::Given: p = start.p; break;
        case Start::Random: {
            std::mt19937_64 rng(cfg.seed);
            p = random_start(eco, rng);
            break;
        }
    }
    p = feasible_start(p, cfg.delta);

    Evaluator ev(eco, cfg);
    SolveResult res;
    double best_res = std::numeric_limits<double>::infinity();

    for (std::size_t nu = 0; nu <= cfg.max_iters; ++nu) {
        const double r = std::min(cfg.r0 * std::pow(cfg.r_growth, static_cast<double>(nu)),
                                  cfg.r_cap);
        const Evaluator::Entry& entry = ev.eval(p);

        IterRecord rec;
        rec.nu = nu;
        rec.r = r;
        rec.p = p;
        rec.s = entry.s;
        rec.ph_residuals = entry.ph_residuals;
        rec.residual = residual(entry.s);

        auto t1 = clock_type::now();
        rec.q = phase1(entry.s, p, r);
        rec.phase1_ms = ms_since(t1);
        rec.w_value = walrasian_value(entry.s, rec.q);
        rec.waug_value = augmented_walrasian(entry.s, rec.q, r, cfg.augmenting).value;

        if (rec.residual < best_res) {
            best_res = rec.residual;
            res.p_star = p;
            res.s_star = entry.s;
        }

        const bool converged = rec.residual <= cfg.epsilon;
        const bool last = converged || nu == cfg.max_iters;
        ev.clear();

        if (!last) {
            auto t2 = clock_type::now();
            PriceSystem next = phase2_impl(ev, rec.q, p, r, cfg);
            rec.phase2_ms = ms_since(t2);
            p = next;
        }
        res.trace.push_back(std::move(rec));
        if (last) {
            if (converged) {
                res.status = SolveStatus::Converged;
                res.p_star = res.trace.back().p;
                res.s_star = res.trace.back().s;
                best_res = res.trace.back().residual;
            }
            break;
        }
    }

    res.residual = best_res;
    res.iterations = res.trace.size();
    for (std::size_t k = 0; k < res.p_star.n_blocks(); ++k) {
        Vec& blk = res.p_star.block(k);
        kernels::scale(blk, 1.0 / kernels::sum(blk));
    }
    res.wall_ms = ms_since(t_start);
    return res;
}

SolveResult multistart_solve(const Economy& eco, const SolverConfig& cfg, Start::Kind first) {
    if (first == Start::Given)
        throw std::invalid_argument("multistart_solve: pass Centroid or Random for the first start");
    const std::size_t k = std::max<std::size_t>(1, cfg.multistart);
    std::mt19937_64 rng(cfg.seed);

    std::vector<Start> starts;
    if (first == Start::Random)
        starts.push_back({Start::Given, random_start(eco, rng)});
    else
        starts.push_back({Start::Centroid, {}});
    for (std::size_t i = 1; i < k; ++i)
        starts.push_back({Start::Given, random_start(eco, rng)});

    SolveResult best;
    bool have_best = false;
    std::exception_ptr first_error;
    double best_res = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < starts.size(); ++i) {
        try {
            SolveResult r = solve(eco, starts[i], cfg);
            r.start_index = i;
            if (!have_best || r.residual < best_res) {
                best_res = r.residual;
                best = std::move(r);
                have_best = true;
            }
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (!have_best) std::rethrow_exception(first_error);
    return best;
}

}  // namespace walrex
