#pragma once

// Sparse bivariate polynomials over exact rationals, in the two sweep
// parameters u and v. Univariate polynomials are the special case with no v
// (or no u) monomials. Degrees stay tiny (≤ 4), so a sparse map and
// schoolbook multiplication are plenty.
//
// Canonical text form is expanded monomials with rational coefficients,
// e.g. "28 - u^3" or "3 + 4*u + u^2 - 1/2*v^2"; terms are ordered by total
// degree, then by v-degree.

#include "deltakit/rational.hpp"

#include <map>
#include <string>
#include <utility>

namespace dk {

class Poly {
public:
    // (deg_u, deg_v) -> coefficient; zero coefficients never stored.
    using Monomial = std::pair<int, int>;

    Poly() = default;
    Poly(const Rational& c) { set(0, 0, c); }
    Poly(long c) { set(0, 0, Rational(c)); }

    static Poly var_u() { Poly p; p.set(1, 0, Rational(1)); return p; }
    static Poly var_v() { Poly p; p.set(0, 1, Rational(1)); return p; }

    // Parses the canonical expanded form; also tolerates "u*v", "v^2*u",
    // explicit "+"/"-" signs and redundant whitespace.
    static Poly parse(const std::string& s);

    void set(int du, int dv, const Rational& c);
    Rational coeff(int du, int dv) const;
    const std::map<Monomial, Rational>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_univariate_u() const { return degree_v() == 0; }
    bool is_univariate_v() const { return degree_u() == 0; }
    // Total degree ≤ 1 (an affine form c0 + cu·u + cv·v).
    bool is_affine() const;
    int degree_u() const;
    int degree_v() const;
    int total_degree() const;

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const Rational& c) const;
    Poly operator/(const Rational& c) const { return *this * c.reciprocal(); }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    bool operator==(const Poly& o) const { return terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return terms_ != o.terms_; }

    Rational eval(const Rational& u, const Rational& v) const;
    // Substitute u := value, leaving a polynomial in v (and vice versa).
    Poly eval_u(const Rational& u) const;
    Poly eval_v(const Rational& v) const;
    // Substitute v := g(u) for univariate g; result is univariate in u.
    Poly subst_v(const Poly& g) const;

    Poly derivative_u() const;
    Poly derivative_v() const;
    // Antiderivative in v with zero constant term.
    Poly antiderivative_v() const;
    Poly antiderivative_u() const;

    std::string str() const;

private:
    std::map<Monomial, Rational> terms_;
};

inline Poly operator*(const Rational& c, const Poly& p) { return p * c; }

// ∫_a^b p du for univariate p (in u; a pure constant also counts).
Rational integrate_interval(const Poly& p, const Rational& a, const Rational& b);

// u ↦ ∫_{lo(u)}^{hi(u)} p(u,v) dv, for affine lo, hi containing no v.
Poly integrate_strip(const Poly& p, const Poly& lo, const Poly& hi);

// Affine forms are just degree-≤1 polynomials; this validates and names them.
Poly affine_form(const Rational& c0, const Rational& cu, const Rational& cv);

}  // namespace dk
