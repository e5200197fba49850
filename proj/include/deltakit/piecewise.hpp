#pragma once

// Piecewise-polynomial functions of u on consecutive rational intervals.
// Used for volume profiles, chamber-wise integrands, and envelope functions.

#include "deltakit/poly.hpp"

#include <vector>

namespace dk {

struct Piece {
    Rational lo, hi;   // interval [lo, hi], lo < hi
    Poly f;            // univariate in u
};

class PiecewiseFn {
public:
    PiecewiseFn() = default;
    explicit PiecewiseFn(std::vector<Piece> pieces);

    const std::vector<Piece>& pieces() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }
    Rational lo() const;
    Rational hi() const;

    // Requires lo() <= u <= hi(); at a breakpoint either piece agrees when
    // the function is continuous.
    Rational eval(const Rational& u) const;

    Rational integrate() const;
    PiecewiseFn derivative() const;

    // True when adjacent pieces agree at their shared breakpoint.
    bool is_continuous() const;
    // True when eval is convex / concave across all of [lo, hi]. Piecewise
    // polynomial of degree <= 3, checked via second derivative sign on each
    // piece plus first-derivative jumps at breakpoints.
    bool is_convex() const;
    bool is_concave() const;

    PiecewiseFn operator+(const PiecewiseFn& o) const;
    PiecewiseFn operator*(const Rational& c) const;

private:
    std::vector<Piece> pieces_;  // sorted, abutting
};

inline Rational integrate_piecewise(const PiecewiseFn& f) { return f.integrate(); }

}  // namespace dk
