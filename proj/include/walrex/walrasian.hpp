#pragma once

#include <vector>

#include "walrex/demand.hpp"
#include "walrex/economy.hpp"
#include "walrex/hedging.hpp"

namespace walrex {

struct ExcessSupply {
    Vec s0;
    std::vector<Vec> s1;  // per scenario

    std::size_t n_blocks() const { return 1 + s1.size(); }
    Vec& block(std::size_t k) { return k == 0 ? s0 : s1[k - 1]; }
    const Vec& block(std::size_t k) const { return k == 0 ? s0 : s1[k - 1]; }
    Vec flat() const;
};

// Demand caps: price-independent upper bound on aggregate availability.
// Stage 0 is the aggregate endowment; stage 1 adds every activity's output
// at its stage-0 resource bound, so realized supply never exceeds the cap.
struct StageCaps {
    Vec cap0;
    std::vector<Vec> cap1;
};
StageCaps demand_caps(const Economy& eco);

struct AgentAllocation {
    Vec y;  // transfer plan (empty for exchange)
    DemandResult x0;
    std::vector<DemandResult> x1;  // per scenario
    double ph_residual = 0.0;
    std::size_t ph_iterations = 0;
    bool ph_converged = true;
};

struct Evaluation {
    ExcessSupply s;
    std::vector<AgentAllocation> agents;
};

struct EvalOptions {
    PhConfig ph;
    // Standalone evaluations fail loudly when progressive hedging hits its
    // iteration cap; the solver flips this off and logs the residual instead.
    bool throw_on_ph_failure = true;
};

// Excess supply s(p) at strictly positive block prices: stage-0 block
// sum_i (e0_i - x0_i - T0_i y_i), stage-1 block per scenario
// sum_i (e1_i + T1_i y_i - x1_i). Exchange economies have only the stage-0
// block; deterministic two-stage plans come from the transfer LP and
// stochastic plans from progressive hedging.
Evaluation evaluate_economy(const Economy& eco, const PriceSystem& p, const EvalOptions& opt = {});
ExcessSupply excess_supply(const Economy& eco, const PriceSystem& p, const EvalOptions& opt = {});

// max(0, -min_j s_j) over all blocks; 0 exactly when min s >= 0.
double residual(const ExcessSupply& s);

// W(p, q) = sum over blocks of <q_block, s_block(p)>.
double walrasian_value(const ExcessSupply& s, const PriceSystem& q);

enum class Augmenting { SelfDual, LinfBall };

struct AugmentedEval {
    double value = 0.0;
    PriceSystem z;  // argmin
};

// Augmented Walrasian at given excess supply. Self-dual kernel:
//   min_z <z,s> + |z-q|^2/(2r) per block, z* = project_simplex(q - r s).
// Linf-ball kernel: min <z,s> over the radius-r sup-norm ball around q
// intersected with the simplex, solved as an LP per block.
AugmentedEval augmented_walrasian(const ExcessSupply& s, const PriceSystem& q, double r,
                                  Augmenting kind = Augmenting::SelfDual);

}  // namespace walrex
