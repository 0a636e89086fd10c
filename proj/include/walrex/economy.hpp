#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "walrex/base.hpp"

namespace walrex {

enum class ModelClass { Exchange, TwoStageDeterministic, TwoStageStochastic };

struct CobbDouglas {
    Vec beta;  // nonnegative, sums to 1
};

// u(x) = (sum_j a_j^(1/b) x_j^((b-1)/b))^(b/(b-1)), b > 0, b != 1
struct Ces {
    Vec a;
    double b = 0.0;
};

using UtilitySpec = std::variant<CobbDouglas, Ces>;

struct Agent {
    std::string name;
    UtilitySpec utility0;
    std::optional<UtilitySpec> utility1;  // two-stage classes only
    Vec e0;
    Vec survival_lb;         // consumption floor, applies at every stage/scenario
    Matrix T0;               // goods x activities, stage-0 activity inputs
    std::vector<Vec> e1;     // per scenario
    std::vector<Matrix> T1;  // per scenario, goods x activities, stage-1 outputs
    Vec beliefs;             // per scenario, nonnegative, sums to 1
};

struct Economy {
    std::string name;
    ModelClass model_class = ModelClass::Exchange;
    std::size_t n_goods = 0;
    std::size_t n_activities = 0;
    std::vector<std::string> scenarios;  // empty | {single} | one per scenario
    std::vector<Agent> agents;

    std::size_t n_scenarios() const { return scenarios.size(); }
    std::size_t n_blocks() const { return 1 + scenarios.size(); }
    Vec aggregate_e0() const;
    Vec aggregate_e1(std::size_t xi) const;
};

// One point per simplex block: stage-0 prices plus one stage-1 block per
// scenario (deterministic economies carry a single stage-1 block).
struct PriceSystem {
    Vec p0;
    std::vector<Vec> p1;

    std::size_t n_blocks() const { return 1 + p1.size(); }
    Vec& block(std::size_t k) { return k == 0 ? p0 : p1[k - 1]; }
    const Vec& block(std::size_t k) const { return k == 0 ? p0 : p1[k - 1]; }
    Vec flat() const;
    static PriceSystem centroid(const Economy& eco);
    static PriceSystem zeros_like(const Economy& eco);
};

struct Violation {
    std::string path;
    std::string message;
};

// Structural and numeric admissibility. Empty result means the economy is
// usable by every other module without further checks.
std::vector<Violation> validate(const Economy& eco);

// Renormalizes Cobb-Douglas weights and beliefs whose sums are within 1e-6 of
// one (the file loader applies this before validation). Sums further out are
// left for validate to flag.
void normalize_weights(Economy& eco);

struct AgentRecourse {
    std::string agent;
    bool ok = true;
    Vec x0;               // witness stage-0 bundle (= survival_lb)
    Vec y;                // witness activity levels (= 0)
    std::vector<std::string> failures;  // human-readable, names good and scenario
};

// Relatively-complete-recourse sufficient condition via the constant witness
// (x0, y, x1) = (survival_lb, 0, survival_lb): checks e0 >= survival_lb and
// e1 >= survival_lb per scenario, with exact comparisons so boundary
// economies pass. Two-stage economies only.
std::vector<AgentRecourse> check_recourse(const Economy& eco);

}  // namespace walrex
