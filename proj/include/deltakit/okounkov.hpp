#pragma once

// Planar Okounkov-style valuation bodies for a flag (curve, point) on a
// surface, their exact areas and barycenters, and the slice-moment oracle
// that recomputes the divisor functional from a threefold volume family.

#include "deltakit/lattice.hpp"
#include "deltakit/piecewise.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dk {

struct ZeroArea : std::runtime_error {
    explicit ZeroArea(const std::string& what) : std::runtime_error(what) {}
};

// The body { (t, y) : 0 <= t <= tau, alpha(t) <= y <= alpha(t) + length(t) },
// stored by its piecewise-affine boundary functions.
struct OkounkovBody2D {
    Rational tau;
    PiecewiseFn alpha;   // lower boundary: the point's order along the negative part
    PiecewiseFn length;  // fiber length: (P(t) . C)
};

// Sweeps L - t*C over t in [0, tau] (the one-parameter specialization of the
// chamber sweep) and reads off the boundary functions. mults gives the local
// multiplicity at the flag point of each curve appearing in negative parts.
OkounkovBody2D body2d(const CurveLattice& lat, const DivClass& L, const DivClass& C,
                      const std::map<int, Rational>& mults);

Rational area(const OkounkovBody2D& body);
std::pair<Rational, Rational> barycenter(const OkounkovBody2D& body);

// The first-coordinate barycenter of the threefold body, computed through its
// slice areas a(u) = -vol'(u)/6 without materializing the body; equals the
// divisor functional whenever the family shrinks to zero volume at the end.
Rational slice_barycenter(const PiecewiseFn& vol);

// U + (tau - U)/(r + n) <= S <= tau - (tau - U)/(r + n), with U the infimum
// of the t-support of the body.
bool bounds_ok(const Rational& U, const Rational& tau, const Rational& S, int r_plus_n);
bool check_bounds(const OkounkovBody2D& body, const Rational& S, int r, int n);

// The boundary polygon, counterclockwise from (0, alpha(0)), collinear
// vertices pruned.
std::vector<std::pair<Rational, Rational>> body_vertices(const OkounkovBody2D& body);

// Plot-friendly rows "t,alpha,top" at every breakpoint.
std::string body_plot_csv(const OkounkovBody2D& body);

}  // namespace dk
