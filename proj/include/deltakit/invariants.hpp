#pragma once

// The delta-invariant functionals: the threefold-level expected vanishing
// order S of a divisor, the surface-level S of a curve computed through the
// (u,v) sweep, the point functionals F_p and S(W;p), and the min-chain
// combiner — plus the exact identities that certify a run.

#include "deltakit/lattice.hpp"
#include "deltakit/piecewise.hpp"
#include "deltakit/sweep.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dk {

struct InvalidScenario : std::runtime_error {
    explicit InvalidScenario(const std::string& what) : std::runtime_error(what) {}
};

struct ThreefoldModel {
    std::vector<std::string> basis;
    // trilinear[i][j][k]: fully symmetric triple intersection numbers.
    std::vector<std::vector<std::vector<Rational>>> trilinear;

    void validate() const;
    Poly triple(const std::vector<Poly>& a, const std::vector<Poly>& b,
                const std::vector<Poly>& c) const;
};

// One u-chamber of the threefold family L - u*Y: either a Picard class for
// P(u) (volume computed from the trilinear form) or the volume polynomial
// directly.
struct Chamber3 {
    Rational lo, hi;
    std::optional<std::vector<Poly>> p3_class;  // affine in u, over model basis
    std::optional<Poly> vol_poly;               // cubic in u
};

PiecewiseFn vol_family(const std::optional<ThreefoldModel>& model,
                       const std::vector<Chamber3>& chambers);

// (1/vol(u0)) * integral of the volume family.
Rational s_divisor(const PiecewiseFn& vol);

// One u-chamber of the restricted family on the sweep surface: the nef part
// Q(u) of the restriction and the incoming negative part N(u) by prime curve.
struct SurfaceChamber {
    Rational lo, hi;
    ParamClass Q;                 // affine in u, over the curve basis
    std::map<int, Poly> n_input;  // curve index -> coefficient (poly in u)
};

struct PointSpec {
    std::string name;
    Rational A{1};                    // log discrepancy of the point blowup
    std::map<int, Rational> mults;    // curve index -> local multiplicity at p
    std::optional<Poly> offset;       // raw ord-integrand correction override
};

// A refinement curve with everything the point functionals reuse.
struct RefinementData {
    DivClass C;
    std::optional<int> c_index;       // set when C is a single lattice curve
    std::map<int, Rational> sigma;    // exceptional pullback components of C
    std::vector<SurfaceChamber> chambers;
    std::vector<SweepResult> sweeps;  // one per chamber
    PiecewiseFn d;                    // C-coefficient of the incoming N(u)
    Rational vol;                     // the normalizer vol(L)
    Rational s_value;                 // S(V;C)
    Rational tau() const;             // max of d + t over the chamber range
    Rational t_eval(const Rational& u) const;
};

// Runs the sweep on every chamber and evaluates S(V;C) =
// (3/vol) * sum over chambers of [ int d(u) Q(u)^2 du + sum over cells of
// the double integral of P(u,v)^2 ].
RefinementData run_refinement(const CurveLattice& lat,
                              std::vector<SurfaceChamber> chambers, DivClass C,
                              std::optional<int> c_index,
                              std::map<int, Rational> sigma, const Rational& vol);

// F_p = (6/vol) * double integral of (P.C) * M_p, where M_p collects the
// multiplicities of the negative parts at p:
//   M_p(u,v) = sum_{D != C} (N'_D(u) + n_D(u,v)) * mults[D] + offset(u,v),
// and by default offset(u,v) = -(v + d(u)) * sum_D sigma[D] * mults[D].
Rational f_point(const CurveLattice& lat, const RefinementData& ref, const PointSpec& p);

// (3/vol) * double integral of (P.C)^2 — the multiplicity-free part of S(W;p).
Rational s_point_base(const CurveLattice& lat, const RefinementData& ref);

// S(W;p) = s_point_base + F_p.
Rational s_point(const CurveLattice& lat, const RefinementData& ref, const PointSpec& p);

struct DeltaLevel {
    std::string label;
    Rational log_discrepancy;
    Rational s_value;
};

// min over levels of A / S.
Rational delta_chain(const std::vector<DeltaLevel>& levels);

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

// Exact certification identities for one refinement:
//   - per-cell polynomial identity d(P^2)/dv = -2 (P.C)
//   - per-u fiber identity: integral of (P.C) over [0, t(u)] = Q(u)^2 / 2
//   - boundary certificate at v = t(u)
//   - d convex, d + t concave
//   - when d == 0: double integral of (P.C) equals vol / 6
//   - tau/(n+1) <= S <= n*tau/(n+1) for S(V;C) with n = 3
std::vector<CheckResult> cross_checks(const CurveLattice& lat, const RefinementData& ref);

}  // namespace dk
