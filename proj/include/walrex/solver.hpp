#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "walrex/economy.hpp"
#include "walrex/hedging.hpp"
#include "walrex/walrasian.hpp"

namespace walrex {

struct SolverConfig {
    double epsilon = 1e-6;  // stop once min_j s_j(p) >= -epsilon
    double r0 = 1.0;
    double r_growth = 1.259;
    double r_cap = 1e8;
    std::size_t max_iters = 500;  // price updates; the trace gets one extra row
    double delta = 1e-6;          // price floor inside phase-2 evaluations
    Augmenting augmenting = Augmenting::SelfDual;
    std::size_t multistart = 1;
    std::uint64_t seed = 0;
    PhConfig ph;

    // phase-2 stencil search
    std::size_t phase2_max_evals = 4000;
    double phase2_step_init = 0.2;
    double phase2_step_tol = 1e-9;
};

enum class SolveStatus { Converged, MaxIterExceeded };

struct IterRecord {
    std::size_t nu = 0;
    double r = 0.0;
    PriceSystem p;
    PriceSystem q;  // phase-1 argmin at this iterate
    ExcessSupply s;
    double residual = 0.0;
    double w_value = 0.0;     // <q, s(p)>
    double waug_value = 0.0;  // augmented value at (p, q, r)
    double phase1_ms = 0.0;
    double phase2_ms = 0.0;  // cost of producing the next iterate (0 on the last row)
    std::vector<double> ph_residuals;  // per agent, stochastic economies only
};

struct SolveResult {
    SolveStatus status = SolveStatus::MaxIterExceeded;
    PriceSystem p_star;  // best-residual iterate, exactly renormalized
    ExcessSupply s_star;
    double residual = 0.0;
    std::size_t iterations = 0;  // trace rows
    double wall_ms = 0.0;
    std::size_t start_index = 0;  // which multistart run won
    std::vector<IterRecord> trace;
};

struct Start {
    enum Kind { Centroid, Random, Given } kind = Centroid;
    PriceSystem p;  // for Given
};

// Memoizing excess-supply oracle. Prices are keyed rounded at 1e-12, so the
// repeated probes of the phase-2 stencil reuse one evaluation; the solver
// clears it every outer iteration to bound memory.
class Evaluator {
  public:
    struct Entry {
        ExcessSupply s;
        std::vector<double> ph_residuals;
    };

    Evaluator(const Economy& eco, const SolverConfig& cfg);
    const Entry& eval(const PriceSystem& p);
    void clear() { cache_.clear(); }
    std::size_t lookups() const { return lookups_; }
    std::size_t misses() const { return misses_; }

  private:
    const Economy& eco_;
    EvalOptions opt_;
    std::map<std::vector<std::int64_t>, Entry> cache_;
    std::size_t lookups_ = 0;
    std::size_t misses_ = 0;
};

// Exact argmin_q of the augmented Walrasian over the price-system domain:
// per block the vertex of the most negative excess supply (smallest index on
// ties). Independent of the augmenting kernel and of r.
PriceSystem phase1(const ExcessSupply& s, const PriceSystem& p, double r);

// Derivative-free ascent of p -> augmented_walrasian(s(p), q, r) over the
// per-block simplex charts (last coordinate dropped). Each sweep evaluates a
// central-difference stencil, then races a linearized max-min LP step, a
// gradient line search, the best stencil point, and (when everything is
// flat, which happens on demand-cap plateaus) blends toward the uniform
// system; the trust region grows on accepted sweeps and shrinks otherwise.
// Every evaluated point is projected onto the simplex and floored at
// cfg.delta. Never returns a point worse than p_start.
PriceSystem phase2(const Economy& eco, const PriceSystem& q, const PriceSystem& p_start,
                   double r, const SolverConfig& cfg);

SolveResult solve(const Economy& eco, const Start& start, const SolverConfig& cfg = {});

// Centroid (or, with first = Random, a seeded uniform Dirichlet draw) plus
// (multistart-1) further Dirichlet draws from cfg.seed, run sequentially;
// best final residual wins, earliest start on ties. A run that throws counts
// as residual +inf; if every run throws, the first error is rethrown.
SolveResult multistart_solve(const Economy& eco, const SolverConfig& cfg = {},
                             Start::Kind first = Start::Centroid);

}  // namespace walrex
