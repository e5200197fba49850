#include "deltakit/piecewise.hpp"

#include <algorithm>
#include <stdexcept>

namespace dk {

PiecewiseFn::PiecewiseFn(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) return;
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    for (const auto& p : pieces_)
        if (!(p.lo < p.hi)) throw std::invalid_argument("PiecewiseFn: empty piece");
    for (size_t i = 1; i < pieces_.size(); ++i)
        if (pieces_[i].lo != pieces_[i - 1].hi)
            throw std::invalid_argument("PiecewiseFn: pieces must abut");
    for (const auto& p : pieces_)
        if (!p.f.is_univariate_u())
            throw std::invalid_argument("PiecewiseFn: piece involves v");
}

Rational PiecewiseFn::lo() const {
    if (pieces_.empty()) throw std::logic_error("PiecewiseFn: empty");
    return pieces_.front().lo;
}

Rational PiecewiseFn::hi() const {
    if (pieces_.empty()) throw std::logic_error("PiecewiseFn: empty");
    return pieces_.back().hi;
}

Rational PiecewiseFn::eval(const Rational& u) const {
    for (const auto& p : pieces_)
        if (p.lo <= u && u <= p.hi) return p.f.eval(u, Rational(0));
    throw std::out_of_range("PiecewiseFn::eval: u outside domain");
}

Rational PiecewiseFn::integrate() const {
    Rational total;
    for (const auto& p : pieces_) total += integrate_interval(p.f, p.lo, p.hi);
    return total;
}

PiecewiseFn PiecewiseFn::derivative() const {
    std::vector<Piece> ps;
    ps.reserve(pieces_.size());
    for (const auto& p : pieces_) ps.push_back({p.lo, p.hi, p.f.derivative_u()});
    return PiecewiseFn(std::move(ps));
}

bool PiecewiseFn::is_continuous() const {
    for (size_t i = 1; i < pieces_.size(); ++i) {
        Rational x = pieces_[i].lo;
        if (pieces_[i - 1].f.eval(x, Rational(0)) != pieces_[i].f.eval(x, Rational(0)))
            return false;
    }
    return true;
}

namespace {
// Exact nonnegativity of a degree-<=2 univariate polynomial on [lo, hi]:
// the minimum sits at an endpoint or at the vertex.
bool nonneg_on_interval(const Poly& f, const Rational& lo, const Rational& hi) {
    if (f.degree_u() > 2) throw std::logic_error("nonneg_on_interval: degree too high");
    std::vector<Rational> samples{lo, hi};
    if (f.degree_u() == 2) {
        Rational a = f.coeff(2, 0), b = f.coeff(1, 0);
        Rational vx = -b / (Rational(2) * a);
        if (lo < vx && vx < hi) samples.push_back(vx);
    }
    for (const auto& x : samples)
        if (f.eval(x, Rational(0)).sign() < 0) return false;
    return true;
}
}  // namespace

bool PiecewiseFn::is_convex() const {
    PiecewiseFn d1 = derivative();
    for (size_t i = 0; i < pieces_.size(); ++i) {
        Poly d2 = d1.pieces_[i].f.derivative_u();
        if (!nonneg_on_interval(d2, pieces_[i].lo, pieces_[i].hi)) return false;
    }
    for (size_t i = 1; i < pieces_.size(); ++i) {
        Rational x = pieces_[i].lo;
        if (d1.pieces_[i - 1].f.eval(x, Rational(0)) > d1.pieces_[i].f.eval(x, Rational(0)))
            return false;
    }
    return true;
}

bool PiecewiseFn::is_concave() const { return (*this * Rational(-1)).is_convex(); }

PiecewiseFn PiecewiseFn::operator+(const PiecewiseFn& o) const {
    if (pieces_.empty()) return o;
    if (o.pieces_.empty()) return *this;
    if (lo() != o.lo() || hi() != o.hi())
        throw std::invalid_argument("PiecewiseFn: domain mismatch in +");
    // Merge the breakpoint sets.
    std::vector<Rational> cuts;
    for (const auto& p : pieces_) { cuts.push_back(p.lo); cuts.push_back(p.hi); }
    for (const auto& p : o.pieces_) { cuts.push_back(p.lo); cuts.push_back(p.hi); }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto piece_at = [](const PiecewiseFn& f, const Rational& a, const Rational& b) -> const Poly& {
        for (const auto& p : f.pieces_)
            if (p.lo <= a && b <= p.hi) return p.f;
        throw std::logic_error("PiecewiseFn: missing piece");
    };
    std::vector<Piece> ps;
    for (size_t i = 1; i < cuts.size(); ++i) {
        const Rational &a = cuts[i - 1], &b = cuts[i];
        ps.push_back({a, b, piece_at(*this, a, b) + piece_at(o, a, b)});
    }
    return PiecewiseFn(std::move(ps));
}

PiecewiseFn PiecewiseFn::operator*(const Rational& c) const {
    std::vector<Piece> ps;
    ps.reserve(pieces_.size());
    for (const auto& p : pieces_) ps.push_back({p.lo, p.hi, p.f * c});
    return PiecewiseFn(std::move(ps));
}

}  // namespace dk
