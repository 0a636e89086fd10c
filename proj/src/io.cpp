#include "walrex/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "walrex/walrasian.hpp"

namespace walrex {

namespace {

using njson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& msg) {
    throw ParseError(origin + ": " + path + ": " + msg);
}

const njson& require(const njson& j, const char* key, const std::string& origin,
                     const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) fail(origin, path, std::string("missing key '") + key + "'");
    return *it;
}

std::string get_string(const njson& j, const std::string& origin, const std::string& path) {
    if (!j.is_string()) fail(origin, path, "expected a string");
    return j.get<std::string>();
}

double get_number(const njson& j, const std::string& origin, const std::string& path) {
    if (!j.is_number()) fail(origin, path, "expected a number");
    return j.get<double>();
}

Vec get_vec(const njson& j, std::size_t len, const std::string& origin,
            const std::string& path) {
    if (!j.is_array()) fail(origin, path, "expected an array");
    if (j.size() != len)
        fail(origin, path, "expected " + std::to_string(len) + " entries, got " +
                               std::to_string(j.size()));
    Vec v;
    v.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
        v.push_back(get_number(j[i], origin, path + "/" + std::to_string(i)));
    return v;
}

Matrix get_matrix(const njson& j, std::size_t rows, std::size_t cols,
                  const std::string& origin, const std::string& path) {
    if (!j.is_array()) fail(origin, path, "expected an array of rows");
    if (j.size() != rows)
        fail(origin, path,
             "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        Vec row = get_vec(j[i], cols, origin, path + "/" + std::to_string(i));
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = row[k];
    }
    return m;
}

UtilitySpec get_utility(const njson& j, std::size_t n_goods, const std::string& origin,
                        const std::string& path) {
    if (!j.is_object()) fail(origin, path, "expected an object");
    std::string type = get_string(require(j, "type", origin, path), origin, path + "/type");
    if (type == "cobb-douglas") {
        CobbDouglas cd;
        cd.beta = get_vec(require(j, "beta", origin, path), n_goods, origin, path + "/beta");
        return cd;
    }
    if (type == "ces") {
        Ces c;
        c.a = get_vec(require(j, "a", origin, path), n_goods, origin, path + "/a");
        c.b = get_number(require(j, "b", origin, path), origin, path + "/b");
        return c;
    }
    fail(origin, path + "/type", "unknown utility type '" + type +
                                     "' (use cobb-douglas or ces)");
}

std::string scenario_id(const njson& j, const std::string& origin, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    fail(origin, path, "scenario id must be a string or an integer");
}

// Scenario-keyed object -> values in the economy's scenario order, rejecting
// unknown and missing keys.
std::vector<const njson*> scenario_map(const njson& j, const std::vector<std::string>& ids,
                                       const std::string& origin, const std::string& path) {
    if (!j.is_object()) fail(origin, path, "expected an object keyed by scenario id");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(ids.begin(), ids.end(), it.key()) == ids.end())
            fail(origin, path, "unknown scenario '" + it.key() + "'");
    std::vector<const njson*> out;
    for (const std::string& id : ids) {
        auto it = j.find(id);
        if (it == j.end()) fail(origin, path, "missing scenario '" + id + "'");
        out.push_back(&*it);
    }
    return out;
}

const char* model_name(ModelClass m) {
    switch (m) {
        case ModelClass::Exchange: return "exchange";
        case ModelClass::TwoStageDeterministic: return "dynamic";
        default: return "stochastic";
    }
}

Economy convert(const njson& root, const std::string& origin) {
    if (!root.is_object()) fail(origin, "/", "expected a JSON object");
    Economy eco;

    std::string model = get_string(require(root, "model", origin, "/"), origin, "/model");
    if (model == "exchange")
        eco.model_class = ModelClass::Exchange;
    else if (model == "dynamic")
        eco.model_class = ModelClass::TwoStageDeterministic;
    else if (model == "stochastic")
        eco.model_class = ModelClass::TwoStageStochastic;
    else
        fail(origin, "/model",
             "unknown model '" + model + "' (use exchange, dynamic, or stochastic)");
    const bool two_stage = eco.model_class != ModelClass::Exchange;

    if (auto it = root.find("name"); it != root.end())
        eco.name = get_string(*it, origin, "/name");

    const njson& goods = require(root, "goods", origin, "/");
    if (!goods.is_array() || goods.empty()) fail(origin, "/goods", "expected a nonempty array");
    for (std::size_t g = 0; g < goods.size(); ++g)
        get_string(goods[g], origin, "/goods/" + std::to_string(g));
    eco.n_goods = goods.size();

    if (auto it = root.find("activities"); it != root.end()) {
        if (!it->is_array()) fail(origin, "/activities", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k)
            get_string((*it)[k], origin, "/activities/" + std::to_string(k));
        eco.n_activities = it->size();
    }

    if (auto it = root.find("scenarios"); it != root.end()) {
        if (!it->is_array()) fail(origin, "/scenarios", "expected an array");
        for (std::size_t x = 0; x < it->size(); ++x) {
            const std::string path = "/scenarios/" + std::to_string(x);
            const njson& sc = (*it)[x];
            if (!sc.is_object()) fail(origin, path, "expected an object with an 'id'");
            std::string id = scenario_id(require(sc, "id", origin, path), origin, path + "/id");
            if (std::find(eco.scenarios.begin(), eco.scenarios.end(), id) !=
                eco.scenarios.end())
                fail(origin, path + "/id", "duplicate scenario id '" + id + "'");
            eco.scenarios.push_back(std::move(id));
        }
    }
    if (!two_stage && !eco.scenarios.empty())
        fail(origin, "/scenarios", "exchange economies take no scenarios");
    if (eco.model_class == ModelClass::TwoStageDeterministic && eco.scenarios.size() != 1)
        fail(origin, "/scenarios", "dynamic economies take exactly one scenario");
    if (eco.model_class == ModelClass::TwoStageStochastic && eco.scenarios.empty())
        fail(origin, "/scenarios", "stochastic economies need at least one scenario");

    const njson& agents = require(root, "agents", origin, "/");
    if (!agents.is_array() || agents.empty())
        fail(origin, "/agents", "expected a nonempty array");
    const std::size_t n = eco.n_goods;
    const std::size_t na = eco.n_activities;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const std::string base = "/agents/" + std::to_string(i);
        const njson& ja = agents[i];
        if (!ja.is_object()) fail(origin, base, "expected an object");
        Agent a;

        a.name = "agent" + std::to_string(i + 1);
        if (auto it = ja.find("name"); it != ja.end())
            a.name = get_string(*it, origin, base + "/name");

        a.utility0 = get_utility(require(ja, "utility0", origin, base), n, origin,
                                 base + "/utility0");
        a.e0 = get_vec(require(ja, "e0", origin, base), n, origin, base + "/e0");

        if (auto it = ja.find("survival_lb"); it == ja.end()) {
            a.survival_lb.assign(n, 0.0);
        } else if (it->is_number()) {
            a.survival_lb.assign(n, it->get<double>());
        } else {
            a.survival_lb = get_vec(*it, n, origin, base + "/survival_lb");
        }

        if (!two_stage) {
            for (const char* key : {"utility1", "e1", "T1", "beliefs", "T0"})
                if (ja.contains(key))
                    fail(origin, base,
                         std::string("only two-stage models use '") + key + "'");
            eco.agents.push_back(std::move(a));
            continue;
        }

        a.utility1 = get_utility(require(ja, "utility1", origin, base), n, origin,
                                 base + "/utility1");

        if (auto it = ja.find("T0"); it != ja.end())
            a.T0 = get_matrix(*it, n, na, origin, base + "/T0");
        else if (na == 0)
            a.T0 = Matrix(n, 0);
        else
            fail(origin, base, "missing key 'T0'");

        for (const njson* jv :
             scenario_map(require(ja, "e1", origin, base), eco.scenarios, origin, base + "/e1"))
            a.e1.push_back(get_vec(*jv, n, origin, base + "/e1"));

        if (auto it = ja.find("T1"); it != ja.end()) {
            for (const njson* jm : scenario_map(*it, eco.scenarios, origin, base + "/T1"))
                a.T1.push_back(get_matrix(*jm, n, na, origin, base + "/T1"));
        } else if (na == 0) {
            a.T1.assign(eco.scenarios.size(), Matrix(n, 0));
        } else {
            fail(origin, base, "missing key 'T1'");
        }

        if (auto it = ja.find("beliefs"); it != ja.end()) {
            for (const njson* jb :
                 scenario_map(*it, eco.scenarios, origin, base + "/beliefs"))
                a.beliefs.push_back(get_number(*jb, origin, base + "/beliefs"));
        } else if (eco.model_class == ModelClass::TwoStageDeterministic) {
            a.beliefs = {1.0};
        } else {
            fail(origin, base, "missing key 'beliefs'");
        }

        eco.agents.push_back(std::move(a));
    }

    normalize_weights(eco);
    std::vector<Violation> viol = validate(eco);
    if (!viol.empty()) {
        std::string msg = origin + ": invalid economy:";
        for (const Violation& v : viol) msg += "\n  " + v.path + ": " + v.message;
        throw ParseError(msg);
    }
    return eco;
}

njson utility_json(const UtilitySpec& u) {
    njson j;
    if (const auto* cd = std::get_if<CobbDouglas>(&u)) {
        j["type"] = "cobb-douglas";
        j["beta"] = cd->beta;
    } else {
        const Ces& c = std::get<Ces>(u);
        j["type"] = "ces";
        j["a"] = c.a;
        j["b"] = c.b;
    }
    return j;
}

njson matrix_json(const Matrix& m) {
    njson rows = njson::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        njson row = njson::array();
        for (std::size_t k = 0; k < m.cols; ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string f12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

njson block_json(const Economy& eco, const Vec& b0, const std::vector<Vec>& b1,
                 double scale) {
    auto scaled = [scale](const Vec& v) {
        Vec out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = scale * v[i];
        return out;
    };
    njson j;
    j["p0"] = scaled(b0);
    if (!eco.scenarios.empty()) {
        njson p1;
        for (std::size_t xi = 0; xi < eco.scenarios.size(); ++xi)
            p1[eco.scenarios[xi]] = scaled(b1[xi]);
        j["p1"] = std::move(p1);
    }
    return j;
}

}  // namespace

Economy parse_economy_text(const std::string& text, const std::string& origin) {
    njson root;
    try {
        root = njson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return convert(root, origin);
}

Economy parse_economy(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_economy_text(buf.str(), path);
}

std::string serialize_economy(const Economy& eco) {
    njson root;
    root["model"] = model_name(eco.model_class);
    if (!eco.name.empty()) root["name"] = eco.name;

    njson goods = njson::array();
    for (std::size_t g = 1; g <= eco.n_goods; ++g) goods.push_back("g" + std::to_string(g));
    root["goods"] = std::move(goods);
    if (eco.n_activities > 0) {
        njson acts = njson::array();
        for (std::size_t k = 1; k <= eco.n_activities; ++k)
            acts.push_back("a" + std::to_string(k));
        root["activities"] = std::move(acts);
    }
    if (!eco.scenarios.empty()) {
        njson sc = njson::array();
        for (const std::string& id : eco.scenarios) sc.push_back(njson{{"id", id}});
        root["scenarios"] = std::move(sc);
    }

    njson agents = njson::array();
    for (const Agent& a : eco.agents) {
        njson ja;
        ja["name"] = a.name;
        ja["utility0"] = utility_json(a.utility0);
        if (a.utility1) ja["utility1"] = utility_json(*a.utility1);
        ja["e0"] = a.e0;
        ja["survival_lb"] = a.survival_lb;
        if (eco.model_class != ModelClass::Exchange) {
            if (eco.n_activities > 0) ja["T0"] = matrix_json(a.T0);
            njson e1, t1, beliefs;
            for (std::size_t xi = 0; xi < eco.scenarios.size(); ++xi) {
                e1[eco.scenarios[xi]] = a.e1[xi];
                if (eco.n_activities > 0) t1[eco.scenarios[xi]] = matrix_json(a.T1[xi]);
                beliefs[eco.scenarios[xi]] = a.beliefs[xi];
            }
            ja["e1"] = std::move(e1);
            if (eco.n_activities > 0) ja["T1"] = std::move(t1);
            ja["beliefs"] = std::move(beliefs);
        }
        agents.push_back(std::move(ja));
    }
    root["agents"] = std::move(agents);
    return root.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& os, const Economy& eco, const SolveResult& res) {
    os << "nu,r,residual,W_value,Waug_value";
    for (std::size_t g = 1; g <= eco.n_goods; ++g) os << ",p0_g" << g;
    for (const std::string& id : eco.scenarios)
        for (std::size_t g = 1; g <= eco.n_goods; ++g) os << ",p1_" << id << "_g" << g;
    for (std::size_t g = 1; g <= eco.n_goods; ++g) os << ",s0_g" << g;
    for (const std::string& id : eco.scenarios)
        for (std::size_t g = 1; g <= eco.n_goods; ++g) os << ",s1_" << id << "_g" << g;
    os << "\n";

    for (const IterRecord& rec : res.trace) {
        os << rec.nu << ',' << f12(rec.r) << ',' << f12(rec.residual) << ','
           << f12(rec.w_value) << ',' << f12(rec.waug_value);
        for (std::size_t k = 0; k < rec.p.n_blocks(); ++k)
            for (double v : rec.p.block(k)) os << ',' << f12(v);
        for (std::size_t k = 0; k < rec.s.n_blocks(); ++k)
            for (double v : rec.s.block(k)) os << ',' << f12(v);
        os << "\n";
    }
}

void write_summary_json(std::ostream& os, const Economy& eco, const SolveResult& res,
                        const SolverConfig& cfg, const std::string& start_mode) {
    EvalOptions opt;
    opt.ph = cfg.ph;
    opt.throw_on_ph_failure = false;
    Evaluation ev = evaluate_economy(eco, res.p_star, opt);

    njson j;
    if (!eco.name.empty()) j["economy"] = eco.name;
    j["model"] = model_name(eco.model_class);
    j["status"] = res.status == SolveStatus::Converged ? "converged" : "max_iter";
    j["iterations"] = res.iterations;
    j["start_index"] = res.start_index;
    j["residual"] = residual(ev.s);
    j["walras_value"] = walrasian_value(ev.s, res.p_star);
    j["p_star"] = block_json(eco, res.p_star.p0, res.p_star.p1, 1.0);
    j["p_star_x100"] = block_json(eco, res.p_star.p0, res.p_star.p1, 100.0);
    {
        njson s = block_json(eco, ev.s.s0, ev.s.s1, 1.0);
        njson renamed;
        renamed["s0"] = std::move(s["p0"]);
        if (s.contains("p1")) renamed["s1"] = std::move(s["p1"]);
        j["s_star"] = std::move(renamed);
    }

    njson agents = njson::array();
    for (std::size_t i = 0; i < eco.agents.size(); ++i) {
        const AgentAllocation& al = ev.agents[i];
        njson ja;
        ja["name"] = eco.agents[i].name;
        if (!al.y.empty()) ja["y"] = al.y;
        ja["x0"] = al.x0.x;
        ja["spent0"] = al.x0.spent;
        ja["utility0"] = al.x0.utility;
        if (!al.x1.empty()) {
            njson x1, u1;
            for (std::size_t xi = 0; xi < eco.scenarios.size(); ++xi) {
                x1[eco.scenarios[xi]] = al.x1[xi].x;
                u1[eco.scenarios[xi]] = al.x1[xi].utility;
            }
            ja["x1"] = std::move(x1);
            ja["utility1"] = std::move(u1);
        }
        if (eco.model_class == ModelClass::TwoStageStochastic) {
            ja["ph"] = njson{{"residual", al.ph_residual},
                             {"iterations", al.ph_iterations},
                             {"converged", al.ph_converged}};
        }
        agents.push_back(std::move(ja));
    }
    j["agents"] = std::move(agents);

    njson c;
    c["epsilon"] = cfg.epsilon;
    c["r0"] = cfg.r0;
    c["r_growth"] = cfg.r_growth;
    c["r_cap"] = cfg.r_cap;
    c["max_iters"] = cfg.max_iters;
    c["delta"] = cfg.delta;
    c["augmenting"] = cfg.augmenting == Augmenting::SelfDual ? "self-dual" : "linf";
    c["multistart"] = cfg.multistart;
    c["seed"] = cfg.seed;
    c["start"] = start_mode;
    c["ph"] = njson{{"rho", cfg.ph.rho}, {"tol", cfg.ph.tol}, {"max_iter", cfg.ph.max_iter}};
    c["phase2_max_evals"] = cfg.phase2_max_evals;
    c["phase2_step_init"] = cfg.phase2_step_init;
    c["phase2_step_tol"] = cfg.phase2_step_tol;
    j["config"] = std::move(c);

    os << j.dump(2) << "\n";
}

namespace {

void print_prices(const Economy& eco, const PriceSystem& p) {
    auto line = [](const std::string& label, const Vec& blk) {
        std::printf("  %s x100:", label.c_str());
        for (double v : blk) std::printf(" %.4f", 100.0 * v);
        std::printf("\n");
    };
    line("p0", p.p0);
    for (std::size_t xi = 0; xi < eco.scenarios.size(); ++xi)
        line("p1[" + eco.scenarios[xi] + "]", p.p1[xi]);
}

int run_solve(const std::string& file, SolverConfig cfg, const std::string& augmenting,
              const std::string& start_mode, const std::string& trajectory_path,
              const std::string& summary_path) {
    Economy eco = parse_economy(file);
    cfg.augmenting = augmenting == "linf" ? Augmenting::LinfBall : Augmenting::SelfDual;
    Start::Kind first = start_mode == "random" ? Start::Random : Start::Centroid;

    SolveResult res = multistart_solve(eco, cfg, first);

    if (!trajectory_path.empty()) {
        std::ofstream f(trajectory_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + trajectory_path);
        write_trajectory_csv(f, eco, res);
    }
    if (!summary_path.empty()) {
        std::ofstream f(summary_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + summary_path);
        write_summary_json(f, eco, res, cfg, start_mode);
    }

    const char* label = eco.name.empty() ? file.c_str() : eco.name.c_str();
    if (res.status == SolveStatus::Converged)
        std::printf("%s: converged in %zu iterations, residual %.3g\n", label, res.iterations,
                    res.residual);
    else
        std::printf("%s: iteration cap reached after %zu iterations, best residual %.3g\n",
                    label, res.iterations, res.residual);
    print_prices(eco, res.p_star);
    if (cfg.multistart > 1)
        std::printf("  best start: %zu of %zu\n", res.start_index + 1, cfg.multistart);
    std::printf("  wall-clock: %.1f ms\n", res.wall_ms);
    return res.status == SolveStatus::Converged ? 0 : 2;
}

int run_validate(const std::string& file) {
    Economy eco = parse_economy(file);
    std::printf("%s: valid %s economy, %zu goods, %zu agents", file.c_str(),
                model_name(eco.model_class), eco.n_goods, eco.agents.size());
    if (eco.n_activities > 0) std::printf(", %zu activities", eco.n_activities);
    if (!eco.scenarios.empty()) std::printf(", %zu scenarios", eco.scenarios.size());
    std::printf("\n");
    return 0;
}

int run_recourse(const std::string& file) {
    Economy eco = parse_economy(file);
    std::vector<AgentRecourse> reports = check_recourse(eco);
    bool all_ok = true;
    for (const AgentRecourse& r : reports) {
        if (r.ok) {
            std::printf("%s: ok (survive on the floor bundle with y = 0)\n", r.agent.c_str());
        } else {
            all_ok = false;
            std::printf("%s: FAIL\n", r.agent.c_str());
            for (const std::string& f : r.failures) std::printf("  %s\n", f.c_str());
        }
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int cli_run(int argc, const char* const* argv) {
    CLI::App app{"Walras equilibrium solver for exchange and two-stage economies"};
    app.require_subcommand(1);

    std::string file;
    SolverConfig cfg;
    std::string augmenting = "self-dual";
    std::string start_mode = "centroid";
    std::string trajectory_path, summary_path;

    CLI::App* sol = app.add_subcommand("solve", "compute equilibrium prices");
    sol->add_option("file", file, "economy file")->required();
    sol->add_option("--epsilon", cfg.epsilon, "residual tolerance")->capture_default_str();
    sol->add_option("--r0", cfg.r0, "initial augmentation parameter")->capture_default_str();
    sol->add_option("--r-growth", cfg.r_growth, "per-iteration growth of r")
        ->capture_default_str();
    sol->add_option("--max-iters", cfg.max_iters, "outer iteration cap")->capture_default_str();
    sol->add_option("--delta", cfg.delta, "price floor during the search")
        ->capture_default_str();
    sol->add_option("--multistart", cfg.multistart, "number of starts")->capture_default_str();
    sol->add_option("--seed", cfg.seed, "random-start seed")->capture_default_str();
    sol->add_option("--ph-rho", cfg.ph.rho, "progressive hedging penalty")
        ->capture_default_str();
    sol->add_option("--ph-tol", cfg.ph.tol, "progressive hedging residual tolerance")
        ->capture_default_str();
    sol->add_option("--ph-max-iter", cfg.ph.max_iter, "progressive hedging iteration cap")
        ->capture_default_str();
    sol->add_option("--augmenting", augmenting, "augmenting kernel")
        ->check(CLI::IsMember({"self-dual", "linf"}))
        ->capture_default_str();
    sol->add_option("--start", start_mode, "first start point")
        ->check(CLI::IsMember({"centroid", "random"}))
        ->capture_default_str();
    sol->add_option("--trajectory", trajectory_path, "write the per-iteration CSV here");
    sol->add_option("--summary", summary_path, "write the summary JSON here");

    CLI::App* val = app.add_subcommand("validate", "parse and validate an economy file");
    val->add_option("file", file, "economy file")->required();

    CLI::App* rec = app.add_subcommand("recourse", "check relatively complete recourse");
    rec->add_option("file", file, "economy file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(sol))
            return run_solve(file, cfg, augmenting, start_mode, trajectory_path, summary_path);
        if (app.got_subcommand(val)) return run_validate(file);
        return run_recourse(file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cli_run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("walrex");
    for (const std::string& s : args) argv.push_back(s.c_str());
    return cli_run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace walrex
