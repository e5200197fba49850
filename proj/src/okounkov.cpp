#include "deltakit/okounkov.hpp"

#include "deltakit/sweep.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dk {

namespace {

// The sweep emits data in (u, v); a one-parameter body reads v as its own
// axis t, so rename v -> u for the piecewise machinery.
Poly rename_v_to_u(const Poly& p) {
    Poly out;
    for (const auto& [m, c] : p.terms()) {
        if (m.first != 0)
            throw std::logic_error("okounkov: one-parameter data depends on the dummy axis");
        out.set(m.second, 0, c);
    }
    return out;
}

Rational eval_at(const Poly& p, const Rational& t) { return p.eval(t, Rational(0)); }

}  // namespace

OkounkovBody2D body2d(const CurveLattice& lat, const DivClass& L, const DivClass& C,
                      const std::map<int, Rational>& mults) {
    auto z = lat.zariski_decompose(L);
    if (lat.pair(z.positive, z.positive).sign() <= 0)
        throw NotPseudoeffective("body2d: the class is not big");

    // Constant-Q sweep: the stack is t-independent of the dummy axis.
    ParamClass Q(L.size());
    for (size_t i = 0; i < L.size(); ++i) Q[i] = Poly(L[i]);
    SweepResult sw = sweep(lat, Q, Rational(0), Rational(1), C);

    OkounkovBody2D body;
    body.tau = sw.t.eval(Rational(0));
    if (body.tau.sign() <= 0) throw ZeroArea("body2d: empty body");

    std::vector<Piece> alpha_pieces, length_pieces;
    for (const auto& cell : sw.cells) {
        Poly lo = rename_v_to_u(cell.v_lo), hi = rename_v_to_u(cell.v_hi);
        if (!(lo.eval(Rational(0), Rational(0)) < hi.eval(Rational(0), Rational(0))))
            continue;
        Poly a;
        for (size_t i = 0; i < cell.support.size(); ++i) {
            auto it = mults.find(cell.support[i]);
            if (it != mults.end()) a += rename_v_to_u(cell.n_coeffs[i]) * it->second;
        }
        Rational c = eval_at(lo, Rational(0)), d = eval_at(hi, Rational(0));
        alpha_pieces.push_back({c, d, a});
        length_pieces.push_back({c, d, rename_v_to_u(cell_pc(lat, cell, C))});
    }
    body.alpha = PiecewiseFn(std::move(alpha_pieces));
    body.length = PiecewiseFn(std::move(length_pieces));

    // Body shape invariants: these certify the sweep output, so a violation
    // is an internal error, not bad input.
    for (const auto& p : body.length.pieces())
        if (eval_at(p.f, p.lo).sign() < 0 || eval_at(p.f, p.hi).sign() < 0)
            throw std::logic_error("body2d: negative fiber length");
    if (!body.alpha.is_convex()) throw std::logic_error("body2d: lower boundary not convex");
    if (!(body.alpha + body.length).is_concave())
        throw std::logic_error("body2d: upper boundary not concave");
    return body;
}

Rational area(const OkounkovBody2D& body) { return body.length.integrate(); }

std::pair<Rational, Rational> barycenter(const OkounkovBody2D& body) {
    Rational a = area(body);
    if (a.sign() <= 0) throw ZeroArea("barycenter: body has zero area");
    Rational mx, my;
    Poly t = Poly::var_u();
    for (const auto& p : body.length.pieces()) {
        mx += integrate_interval(t * p.f, p.lo, p.hi);
        // The y-moment of the fiber strip [alpha, alpha + length] is
        // (alpha + length/2) * length.
        Poly alpha_here;
        for (const auto& q : body.alpha.pieces())
            if (q.lo <= p.lo && p.hi <= q.hi) alpha_here = q.f;
        my += integrate_interval((alpha_here + p.f / Rational(2)) * p.f, p.lo, p.hi);
    }
    return {mx / a, my / a};
}

Rational slice_barycenter(const PiecewiseFn& vol) {
    PiecewiseFn a = vol.derivative() * Rational(-1, 6);
    Rational den = a.integrate();
    if (den.sign() <= 0) throw ZeroArea("slice_barycenter: degenerate volume family");
    Rational num;
    Poly u = Poly::var_u();
    for (const auto& p : a.pieces()) num += integrate_interval(u * p.f, p.lo, p.hi);
    return num / den;
}

bool bounds_ok(const Rational& U, const Rational& tau, const Rational& S, int r_plus_n) {
    if (r_plus_n <= 0) throw std::invalid_argument("bounds_ok: r + n must be positive");
    Rational gap = (tau - U) / Rational(r_plus_n);
    return U + gap <= S && S <= tau - gap;
}

bool check_bounds(const OkounkovBody2D& body, const Rational& S, int r, int n) {
    Rational U = body.tau;  // shrinks to the first point of positive length
    for (const auto& p : body.length.pieces())
        if (!p.f.is_zero()) {
            U = p.lo;
            break;
        }
    return bounds_ok(U, body.tau, S, r + n);
}

std::vector<std::pair<Rational, Rational>> body_vertices(const OkounkovBody2D& body) {
    std::vector<Rational> xs{Rational(0)};
    auto note = [&](const Rational& x) {
        if (xs.back() != x) xs.push_back(x);
    };
    for (const auto& p : body.alpha.pieces()) note(p.hi);
    {
        std::vector<Rational> merged{Rational(0)};
        size_t i = 1, j = 1;
        std::vector<Rational> tops{Rational(0)};
        for (const auto& p : body.length.pieces()) tops.push_back(p.hi);
        while (i < xs.size() || j < tops.size()) {
            Rational next = (j >= tops.size() || (i < xs.size() && xs[i] < tops[j]))
                                ? xs[i++]
                                : tops[j++];
            if (merged.back() != next) merged.push_back(next);
        }
        xs = merged;
    }

    std::vector<std::pair<Rational, Rational>> ring;
    for (const auto& x : xs) ring.emplace_back(x, body.alpha.eval(x));
    for (auto it = xs.rbegin(); it != xs.rend(); ++it)
        ring.emplace_back(*it, body.alpha.eval(*it) + body.length.eval(*it));

    // Drop duplicates and collinear interior points around the closed cycle.
    std::vector<std::pair<Rational, Rational>> out;
    auto collinear = [](const std::pair<Rational, Rational>& a,
                        const std::pair<Rational, Rational>& b,
                        const std::pair<Rational, Rational>& c) {
        return ((b.first - a.first) * (c.second - a.second) -
                (b.second - a.second) * (c.first - a.first))
                   .is_zero();
    };
    for (const auto& v : ring) {
        while (out.size() >= 2 && collinear(out[out.size() - 2], out.back(), v)) out.pop_back();
        if (out.empty() || out.back() != v) out.push_back(v);
    }
    while (out.size() >= 3 && collinear(out[out.size() - 2], out.back(), out.front()))
        out.pop_back();
    while (out.size() >= 3 && collinear(out.back(), out.front(), out[1]))
        out.erase(out.begin());
    if (out.size() >= 2 && out.back() == out.front()) out.pop_back();
    return out;
}

std::string body_plot_csv(const OkounkovBody2D& body) {
    std::ostringstream os;
    os << "t,lower,upper\n";
    std::vector<Rational> xs{body.length.lo()};
    for (const auto& p : body.length.pieces())
        if (xs.back() != p.hi) xs.push_back(p.hi);
    for (const auto& p : body.alpha.pieces())
        if (std::find(xs.begin(), xs.end(), p.hi) == xs.end()) xs.push_back(p.hi);
    std::sort(xs.begin(), xs.end());
    for (const auto& x : xs) {
        Rational lo = body.alpha.eval(x);
        os << x.str() << ',' << lo.str() << ',' << (lo + body.length.eval(x)).str() << '\n';
    }
    return os.str();
}

}  // namespace dk
