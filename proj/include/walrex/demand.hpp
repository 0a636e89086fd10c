#pragma once

#include "walrex/base.hpp"
#include "walrex/economy.hpp"

namespace walrex {

enum class Bound { Interior, Lower, Upper };

struct DemandResult {
    Vec x;
    double spent = 0.0;
    double utility = 0.0;
    std::vector<Bound> bound;
};

// Utility of a nonnegative bundle; zero components are handled as limits
// (Cobb-Douglas and CES with b < 1 collapse to 0). Throws std::domain_error
// on negative components.
double utility_value(const UtilitySpec& u, const Vec& x);

// Indirect utility per unit of wealth at strictly positive prices: alpha(p)
// for Cobb-Douglas, theta(p) for CES. Homotheticity gives v(p, w) =
// stage_multiplier(u, p) * w while the box constraints stay slack.
double stage_multiplier(const UtilitySpec& u, const Vec& p);

// Utility-maximizing bundle under <p,x> <= wealth and lb <= x <= cap, for
// strictly positive prices. Interior demands come from the closed form;
// otherwise the clamped KKT path is bisected on the budget multiplier.
// Zero-weight goods are pinned at lb. Throws InfeasibleBudget when wealth
// cannot cover <p, lb>.
DemandResult demand(const UtilitySpec& u, const Vec& p, double wealth, const Vec& lb,
                    const Vec& cap);

}  // namespace walrex
