#include "walrex/economy.hpp"

#include <cmath>

#include "walrex/kernels.hpp"

namespace walrex {

Vec Economy::aggregate_e0() const {
    Vec agg(n_goods, 0.0);
    for (const Agent& a : agents) kernels::axpy(1.0, a.e0, agg);
    return agg;
}

Vec Economy::aggregate_e1(std::size_t xi) const {
    Vec agg(n_goods, 0.0);
    for (const Agent& a : agents) kernels::axpy(1.0, a.e1[xi], agg);
    return agg;
}

Vec PriceSystem::flat() const {
    Vec out = p0;
    for (const Vec& blk : p1) out.insert(out.end(), blk.begin(), blk.end());
    return out;
}

PriceSystem PriceSystem::centroid(const Economy& eco) {
    PriceSystem p;
    p.p0.assign(eco.n_goods, 1.0 / static_cast<double>(eco.n_goods));
    p.p1.assign(eco.n_scenarios(), p.p0);
    return p;
}

PriceSystem PriceSystem::zeros_like(const Economy& eco) {
    PriceSystem p;
    p.p0.assign(eco.n_goods, 0.0);
    p.p1.assign(eco.n_scenarios(), p.p0);
    return p;
}

namespace {

bool finite_nonneg(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x) || x < 0.0) return false;
    return true;
}

bool finite_nonneg(const Matrix& m) { return finite_nonneg(m.data); }

void check_utility(const UtilitySpec& u, std::size_t n_goods, const std::string& path,
                   std::vector<Violation>& out) {
    if (const auto* cd = std::get_if<CobbDouglas>(&u)) {
        if (cd->beta.size() != n_goods) {
            out.push_back({path, "beta has wrong length"});
            return;
        }
        if (!finite_nonneg(cd->beta)) {
            out.push_back({path, "beta entries must be finite and nonnegative"});
            return;
        }
        double s = kernels::sum(cd->beta);
        if (std::abs(s - 1.0) > 1e-6)
            out.push_back({path, "beta sums to " + std::to_string(s) + ", expected 1"});
    } else {
        const auto& ces = std::get<Ces>(u);
        if (ces.a.size() != n_goods) {
            out.push_back({path, "a has wrong length"});
            return;
        }
        if (!finite_nonneg(ces.a)) {
            out.push_back({path, "a entries must be finite and nonnegative"});
            return;
        }
        if (kernels::sum(ces.a) <= 0.0)
            out.push_back({path, "a must have a positive entry"});
        if (!std::isfinite(ces.b) || ces.b <= 0.0)
            out.push_back({path, "elasticity b must be positive"});
        else if (std::abs(ces.b - 1.0) < 1e-9)
            out.push_back({path, "elasticity b too close to 1 (use Cobb-Douglas)"});
    }
}

}  // namespace

void normalize_weights(Economy& eco) {
    auto renorm = [](Vec& v) {
        double s = kernels::sum(v);
        if (s > 0.0 && std::abs(s - 1.0) <= 1e-6 && s != 1.0) kernels::scale(v, 1.0 / s);
    };
    for (Agent& a : eco.agents) {
        if (auto* cd = std::get_if<CobbDouglas>(&a.utility0)) renorm(cd->beta);
        if (a.utility1)
            if (auto* cd = std::get_if<CobbDouglas>(&*a.utility1)) renorm(cd->beta);
        renorm(a.beliefs);
    }
}

std::vector<Violation> validate(const Economy& eco) {
    std::vector<Violation> out;
    const std::size_t n = eco.n_goods;
    const std::size_t ns = eco.n_scenarios();

    if (n == 0) out.push_back({"n_goods", "economy needs at least one good"});
    if (eco.agents.empty()) out.push_back({"agents", "economy needs at least one agent"});

    switch (eco.model_class) {
        case ModelClass::Exchange:
            if (ns != 0) out.push_back({"scenarios", "exchange economy must not list scenarios"});
            if (eco.n_activities != 0)
                out.push_back({"n_activities", "exchange economy has no activities"});
            break;
        case ModelClass::TwoStageDeterministic:
            if (ns != 1)
                out.push_back({"scenarios", "deterministic two-stage economy needs exactly one scenario"});
            break;
        case ModelClass::TwoStageStochastic:
            if (ns == 0) out.push_back({"scenarios", "stochastic economy needs at least one scenario"});
            break;
    }
    if (!out.empty() && (n == 0 || eco.agents.empty())) return out;

    const bool two_stage = eco.model_class != ModelClass::Exchange;

    for (std::size_t i = 0; i < eco.agents.size(); ++i) {
        const Agent& a = eco.agents[i];
        const std::string base = "agents[" + std::to_string(i) + "]";

        check_utility(a.utility0, n, base + ".utility0", out);
        if (a.e0.size() != n)
            out.push_back({base + ".e0", "endowment has wrong length"});
        else if (!finite_nonneg(a.e0))
            out.push_back({base + ".e0", "endowment entries must be finite and nonnegative"});
        if (a.survival_lb.size() != n)
            out.push_back({base + ".survival_lb", "survival bound has wrong length"});
        else if (!finite_nonneg(a.survival_lb))
            out.push_back({base + ".survival_lb", "survival bound must be finite and nonnegative"});

        if (!two_stage) {
            if (a.utility1 || !a.e1.empty() || !a.T1.empty() || !a.beliefs.empty() ||
                a.T0.rows * a.T0.cols != 0)
                out.push_back({base, "exchange agent must not carry stage-1 data"});
            continue;
        }

        if (!a.utility1) {
            out.push_back({base + ".utility1", "two-stage agent needs a stage-1 utility"});
        } else {
            check_utility(*a.utility1, n, base + ".utility1", out);
        }
        if (a.T0.rows != n || a.T0.cols != eco.n_activities) {
            out.push_back({base + ".T0", "activity input matrix must be goods x activities"});
        } else if (!finite_nonneg(a.T0)) {
            out.push_back({base + ".T0", "activity inputs must be finite and nonnegative"});
        } else {
            for (std::size_t k = 0; k < a.T0.cols; ++k) {
                bool has_input = false;
                for (std::size_t g = 0; g < n; ++g)
                    if (a.T0(g, k) > 0.0) has_input = true;
                if (!has_input)
                    out.push_back({base + ".T0", "activity " + std::to_string(k + 1) +
                                                     " consumes no stage-0 good, so transfer "
                                                     "plans would be unbounded"});
            }
        }
        if (a.e1.size() != ns) {
            out.push_back({base + ".e1", "needs one stage-1 endowment per scenario"});
        } else {
            for (std::size_t xi = 0; xi < ns; ++xi) {
                if (a.e1[xi].size() != n)
                    out.push_back({base + ".e1[" + std::to_string(xi) + "]", "endowment has wrong length"});
                else if (!finite_nonneg(a.e1[xi]))
                    out.push_back({base + ".e1[" + std::to_string(xi) + "]",
                                   "endowment entries must be finite and nonnegative"});
            }
        }
        if (a.T1.size() != ns) {
            out.push_back({base + ".T1", "needs one activity output matrix per scenario"});
        } else {
            for (std::size_t xi = 0; xi < ns; ++xi) {
                if (a.T1[xi].rows != n || a.T1[xi].cols != eco.n_activities)
                    out.push_back({base + ".T1[" + std::to_string(xi) + "]",
                                   "activity output matrix must be goods x activities"});
                else if (!finite_nonneg(a.T1[xi]))
                    out.push_back({base + ".T1[" + std::to_string(xi) + "]",
                                   "activity outputs must be finite and nonnegative"});
            }
        }
        if (a.beliefs.size() != ns) {
            out.push_back({base + ".beliefs", "needs one belief weight per scenario"});
        } else if (!finite_nonneg(a.beliefs)) {
            out.push_back({base + ".beliefs", "beliefs must be finite and nonnegative"});
        } else {
            double s = kernels::sum(a.beliefs);
            if (std::abs(s - 1.0) > 1e-6)
                out.push_back({base + ".beliefs",
                               "beliefs sum to " + std::to_string(s) + ", expected 1"});
        }
    }
    if (!out.empty()) return out;

    Vec agg0 = eco.aggregate_e0();
    for (std::size_t g = 0; g < n; ++g)
        if (agg0[g] <= 0.0)
            out.push_back({"agents", "aggregate stage-0 endowment of good " + std::to_string(g + 1) +
                                         " must be strictly positive"});

    // survival bounds must fit under the demand caps (aggregate endowments)
    for (std::size_t i = 0; i < eco.agents.size(); ++i) {
        const Agent& a = eco.agents[i];
        const std::string base = "agents[" + std::to_string(i) + "].survival_lb";
        for (std::size_t g = 0; g < n; ++g)
            if (a.survival_lb[g] > agg0[g])
                out.push_back({base, "exceeds aggregate stage-0 endowment of good " +
                                         std::to_string(g + 1)});
        if (two_stage) {
            for (std::size_t xi = 0; xi < ns; ++xi) {
                Vec agg1 = eco.aggregate_e1(xi);
                for (std::size_t g = 0; g < n; ++g)
                    if (a.survival_lb[g] > agg1[g])
                        out.push_back({base, "exceeds aggregate endowment of good " +
                                                 std::to_string(g + 1) + " in scenario " +
                                                 eco.scenarios[xi]});
            }
        }
    }
    return out;
}

std::vector<AgentRecourse> check_recourse(const Economy& eco) {
    if (eco.model_class == ModelClass::Exchange)
        throw std::invalid_argument("recourse check applies to two-stage economies");
    std::vector<AgentRecourse> out;
    for (const Agent& a : eco.agents) {
        AgentRecourse r;
        r.agent = a.name;
        r.x0 = a.survival_lb;
        r.y.assign(eco.n_activities, 0.0);
        for (std::size_t g = 0; g < eco.n_goods; ++g)
            if (a.e0[g] - a.survival_lb[g] < 0.0) {
                r.ok = false;
                r.failures.push_back("stage 0 good " + std::to_string(g + 1) +
                                     ": endowment below survival bound");
            }
        for (std::size_t xi = 0; xi < eco.n_scenarios(); ++xi)
            for (std::size_t g = 0; g < eco.n_goods; ++g)
                if (a.e1[xi][g] - a.survival_lb[g] < 0.0) {
                    r.ok = false;
                    r.failures.push_back("scenario " + eco.scenarios[xi] + " good " +
                                         std::to_string(g + 1) +
                                         ": endowment below survival bound");
                }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace walrex
