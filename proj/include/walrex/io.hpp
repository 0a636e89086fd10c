#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "walrex/economy.hpp"
#include "walrex/solver.hpp"

namespace walrex {

// Raised for unreadable files, malformed documents, and validation failures.
// The message carries the file name and a /path/into/the/document plus, for
// syntax errors, the line and column reported by the JSON parser.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Economy file format: a JSON document with top-level keys
//   model      "exchange" | "dynamic" | "stochastic"
//   name       optional label
//   goods      list of good names (defines the good count and order)
//   activities list of activity names (two-stage models; optional when empty)
//   scenarios  list of {"id": ...} (absent for exchange; one entry for dynamic)
//   agents     list of agent objects:
//     name        optional, defaults to agent<k>
//     utility0    {"type": "cobb-douglas", "beta": [...]} or
//                 {"type": "ces", "a": [...], "b": ...}
//     utility1    like utility0, two-stage models only
//     e0          stage-0 endowment, one number per good
//     survival_lb consumption floor, a vector or a single number broadcast to
//                 every good; defaults to 0
//     T0          stage-0 activity inputs, goods x activities, list of rows
//     e1          {scenario id: endowment vector}
//     T1          {scenario id: goods x activities matrix}
//     beliefs     {scenario id: probability}; optional for dynamic models
// Weights within 1e-6 of sum 1 are renormalized, then the economy is
// validated; any violation is reported with its document path.
Economy parse_economy(const std::string& path);
Economy parse_economy_text(const std::string& text, const std::string& origin = "<string>");

// Inverse of parse_economy up to cosmetic choices: goods and activities get
// generated names g1.., a1.. (the Economy type keeps only counts), numbers
// round-trip exactly.
std::string serialize_economy(const Economy& eco);

// One row per outer iteration: nu, r, residual, W_value, Waug_value, price
// blocks (p0_g1.., p1_<scenario>_g1..), then excess-supply blocks in the same
// layout. Header row always present; values printed with 12 significant
// digits, so reruns with identical inputs are byte-identical.
void write_trajectory_csv(std::ostream& os, const Economy& eco, const SolveResult& res);

// Status, iterations, residual, p* (normalized and x100), s(p*), per-agent
// allocations and transfers at p*, and the configuration echo. Deliberately
// excludes wall-clock time so identical runs serialize identically; the CLI
// prints timing to stdout instead.
void write_summary_json(std::ostream& os, const Economy& eco, const SolveResult& res,
                        const SolverConfig& cfg, const std::string& start_mode);

// Subcommands: solve <file> [flags], validate <file>, recourse <file>.
// Returns 0 on success (solve: convergence), 2 when the solver hits its
// iteration cap, 1 on any input problem.
int cli_run(const std::vector<std::string>& args);
int cli_run(int argc, const char* const* argv);

}  // namespace walrex
