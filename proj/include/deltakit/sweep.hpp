#pragma once

// The parametric core: tile {(u,v) : u0 <= u <= u1, 0 <= v <= t(u)} by
// Zariski chambers of Q(u) - v*C, with exact affine data per cell.

#include "deltakit/lattice.hpp"
#include "deltakit/piecewise.hpp"

#include <map>
#include <string>
#include <vector>

namespace dk {

struct NotNefInput : std::runtime_error {
    explicit NotNefInput(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateFamily : std::runtime_error {
    explicit DegenerateFamily(const std::string& what) : std::runtime_error(what) {}
};

struct SupportCell {
    std::vector<int> support;     // curve indices carrying N(u,v)
    std::vector<Poly> n_coeffs;   // affine in (u,v), aligned with `support`
    ParamClass p_class;           // affine coefficients over the curve basis
    Rational u_lo, u_hi;
    Poly v_lo, v_hi;              // affine in u
};

struct SweepResult {
    std::vector<SupportCell> cells;
    std::vector<Rational> u_breaks;
    PiecewiseFn t;   // upper envelope (pseudoeffective threshold in v)
    PiecewiseFn d;   // C-coefficient of the incoming N(u); attached by callers

    // Cells whose u-interval is [a, b], ordered bottom-to-top in v.
    std::vector<const SupportCell*> stack(const Rational& a, const Rational& b) const;
};

// C is given as a class over the curve basis so that composite refinement
// curves work; it never enters Zariski supports itself unless it coincides
// with an active negative lattice curve discovered by the decomposition.
SweepResult sweep(const CurveLattice& lat, const ParamClass& Q,
                  const Rational& u0, const Rational& u1, const DivClass& C);

// (P(u,v) . C) on a cell, affine in (u,v).
Poly cell_pc(const CurveLattice& lat, const SupportCell& cell, const DivClass& C);
// (P(u,v))^2 on a cell, quadratic.
Poly cell_psquare(const CurveLattice& lat, const SupportCell& cell);

}  // namespace dk
