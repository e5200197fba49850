#pragma once

// Declarative scenario files: a JSON description of a polarized threefold,
// a sweep surface, and the refinement flags, plus the batch runner that
// produces an exact report.

#include "deltakit/invariants.hpp"
#include "deltakit/lattice.hpp"
#include "deltakit/okounkov.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dk {

struct ThreefoldSection {
    std::optional<ThreefoldModel> model;  // absent when chambers give vol_poly
    std::string divisor;                  // name of the swept divisor Y
    Rational A{1};                        // log discrepancy of Y
    std::vector<Chamber3> chambers;
};

struct ScenarioRefinement {
    std::string name;
    DivClass C;
    std::optional<int> c_index;  // set when C is a single lattice curve
    Rational A{1};
    std::map<int, Rational> sigma;
    std::vector<PointSpec> points;
};

struct SurfaceSection {
    CurveLattice lattice;
    std::vector<SurfaceChamber> chambers;
};

struct Scenario {
    std::string name;
    std::string description;
    std::optional<ThreefoldSection> threefold;
    std::optional<SurfaceSection> surface;
    std::optional<Rational> vol;  // normalizer override; defaults to vol(0)
    std::vector<ScenarioRefinement> refinements;
    std::vector<std::string> tasks;  // empty = run everything
    std::map<std::string, Rational> expected;

    // The normalizer actually used for surface functionals.
    Rational normalizer() const;
};

Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& sc);
Scenario load_scenario(const std::string& path);

struct RunOptions {
    std::vector<std::string> tasks;  // subset filter; empty = scenario default
    bool check = false;              // cross-checks + expected-value regression
    bool oracle = false;             // randomized exhaustive-Zariski audit
    int oracle_samples = 1000;
};

struct TaskResult {
    std::string task;
    bool ok = false;
    std::optional<Rational> value;
    std::optional<Rational> expected;
    bool matched = true;  // false only when expected present and different
    std::string error;
};

// One row of a chamber table: a single sweep cell of one refinement.
struct CellRow {
    std::string refinement;
    Rational u_lo, u_hi;
    std::string v_lo, v_hi;
    std::string support;   // space-separated curve names
    std::string n_coeffs;  // name=poly, comma-separated
    std::string p_square;
    std::string p_dot_c;
};

struct Report {
    std::string scenario;
    std::vector<TaskResult> results;
    std::vector<CheckResult> checks;  // populated under --check / --oracle
    std::vector<CellRow> cells;
    bool any_error = false;
    bool any_mismatch = false;

    bool clean() const { return !any_error && !any_mismatch; }
};

Report run(const Scenario& sc, const RunOptions& opt);

// Randomized audit used by `--oracle`: samples interior points of every cell
// and insists the symbolic tables, the iterative decomposition, and the
// exhaustive-support oracle agree. Returns a CheckResult per sweep.
std::vector<CheckResult> oracle_audit(const CurveLattice& lat, const RefinementData& ref,
                                      int samples);

}  // namespace dk
