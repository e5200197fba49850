#include "deltakit/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

namespace dk {

void Poly::set(int du, int dv, const Rational& c) {
    if (du < 0 || dv < 0) throw std::invalid_argument("Poly: negative degree");
    Monomial m{du, dv};
    if (c.is_zero())
        terms_.erase(m);
    else
        terms_[m] = c;
}

Rational Poly::coeff(int du, int dv) const {
    auto it = terms_.find({du, dv});
    return it == terms_.end() ? Rational(0) : it->second;
}

bool Poly::is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_.begin()->first == Monomial{0, 0});
}

bool Poly::is_affine() const { return total_degree() <= 1; }

int Poly::degree_u() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.first);
    return d;
}

int Poly::degree_v() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.second);
    return d;
}

int Poly::total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.first + m.second);
    return d;
}

Poly Poly::operator-() const {
    Poly r;
    for (const auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [m, c] : o.terms_) r.set(m.first, m.second, r.coeff(m.first, m.second) + c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    for (const auto& [m, c] : o.terms_) r.set(m.first, m.second, r.coeff(m.first, m.second) - c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) {
            int du = m1.first + m2.first, dv = m1.second + m2.second;
            r.set(du, dv, r.coeff(du, dv) + c1 * c2);
        }
    return r;
}

Poly Poly::operator*(const Rational& c) const {
    Poly r;
    if (c.is_zero()) return r;
    for (const auto& [m, k] : terms_) r.terms_[m] = k * c;
    return r;
}

namespace {
Rational pow_rat(const Rational& x, int n) {
    Rational r(1);
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}
}  // namespace

Rational Poly::eval(const Rational& u, const Rational& v) const {
    Rational r;
    for (const auto& [m, c] : terms_) r += c * pow_rat(u, m.first) * pow_rat(v, m.second);
    return r;
}

Poly Poly::eval_u(const Rational& u) const {
    Poly r;
    for (const auto& [m, c] : terms_)
        r.set(0, m.second, r.coeff(0, m.second) + c * pow_rat(u, m.first));
    return r;
}

Poly Poly::eval_v(const Rational& v) const {
    Poly r;
    for (const auto& [m, c] : terms_)
        r.set(m.first, 0, r.coeff(m.first, 0) + c * pow_rat(v, m.second));
    return r;
}

Poly Poly::subst_v(const Poly& g) const {
    if (!g.is_univariate_u()) throw std::invalid_argument("Poly::subst_v: substituent has v");
    // Precompute powers of g up to the v-degree.
    std::vector<Poly> gp{Poly(1)};
    for (int k = 1; k <= degree_v(); ++k) gp.push_back(gp.back() * g);
    Poly r;
    for (const auto& [m, c] : terms_) {
        Poly um;
        um.set(m.first, 0, c);
        r += um * gp[m.second];
    }
    return r;
}

Poly Poly::derivative_u() const {
    Poly r;
    for (const auto& [m, c] : terms_)
        if (m.first > 0) r.set(m.first - 1, m.second, c * Rational(m.first));
    return r;
}

Poly Poly::derivative_v() const {
    Poly r;
    for (const auto& [m, c] : terms_)
        if (m.second > 0) r.set(m.first, m.second - 1, c * Rational(m.second));
    return r;
}

Poly Poly::antiderivative_v() const {
    Poly r;
    for (const auto& [m, c] : terms_)
        r.set(m.first, m.second + 1, c / Rational(m.second + 1));
    return r;
}

Poly Poly::antiderivative_u() const {
    Poly r;
    for (const auto& [m, c] : terms_)
        r.set(m.first + 1, m.second, c / Rational(m.first + 1));
    return r;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    // Order: total degree, then v-degree, then u-degree.
    std::vector<std::pair<Monomial, Rational>> ts(terms_.begin(), terms_.end());
    std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
        int ta = a.first.first + a.first.second, tb = b.first.first + b.first.second;
        if (ta != tb) return ta < tb;
        if (a.first.second != b.first.second) return a.first.second < b.first.second;
        return a.first.first < b.first.first;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : ts) {
        Rational a = c.abs();
        if (first) {
            if (c.sign() < 0) os << "-";
            first = false;
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
        }
        auto [du, dv] = m;
        bool unit = (a == Rational(1)) && (du + dv > 0);
        if (!unit) os << a.str();
        bool need_star = !unit;
        auto emit = [&](const char* var, int d) {
            if (d == 0) return;
            if (need_star) os << "*";
            os << var;
            if (d > 1) os << "^" << d;
            need_star = true;
        };
        emit("u", du);
        emit("v", dv);
    }
    return os.str();
}

Poly Poly::parse(const std::string& s) {
    Poly result;
    size_t i = 0, n = s.size();
    auto skip_ws = [&] {
        while (i < n && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    };
    skip_ws();
    if (i == n) throw std::invalid_argument("Poly: empty string");
    bool first = true;
    while (true) {
        skip_ws();
        if (i == n) break;
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = (s[i] == '-') ? -1 : 1;
            ++i;
            skip_ws();
        } else if (!first) {
            throw std::invalid_argument("Poly: expected '+' or '-' in \"" + s + "\"");
        }
        first = false;
        // One term: optional rational coefficient, then factors u^k / v^k
        // joined by '*'.
        Rational coeff(1);
        int du = 0, dv = 0;
        bool saw_factor = false;
        bool expect_factor = true;
        while (expect_factor) {
            skip_ws();
            if (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
                size_t j = i;
                while (j < n && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '/'))
                    ++j;
                coeff *= Rational::parse(s.substr(i, j - i));
                i = j;
                saw_factor = true;
            } else if (i < n && (s[i] == 'u' || s[i] == 'v')) {
                char var = s[i++];
                int d = 1;
                skip_ws();
                if (i < n && s[i] == '^') {
                    ++i;
                    skip_ws();
                    size_t j = i;
                    while (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                    if (j == i) throw std::invalid_argument("Poly: bad exponent in \"" + s + "\"");
                    d = std::stoi(s.substr(i, j - i));
                    i = j;
                }
                (var == 'u' ? du : dv) += d;
                saw_factor = true;
            } else {
                throw std::invalid_argument("Poly: bad term in \"" + s + "\"");
            }
            skip_ws();
            if (i < n && s[i] == '*') {
                ++i;
            } else {
                expect_factor = false;
            }
        }
        if (!saw_factor) throw std::invalid_argument("Poly: empty term in \"" + s + "\"");
        result.set(du, dv, result.coeff(du, dv) + Rational(sign) * coeff);
    }
    return result;
}

Rational integrate_interval(const Poly& p, const Rational& a, const Rational& b) {
    if (!p.is_univariate_u())
        throw std::invalid_argument("integrate_interval: polynomial has v");
    Poly F = p.antiderivative_u();
    return F.eval(b, Rational(0)) - F.eval(a, Rational(0));
}

Poly integrate_strip(const Poly& p, const Poly& lo, const Poly& hi) {
    if (!lo.is_univariate_u() || !hi.is_univariate_u())
        throw std::invalid_argument("integrate_strip: bounds must not involve v");
    Poly F = p.antiderivative_v();
    return F.subst_v(hi) - F.subst_v(lo);
}

Poly affine_form(const Rational& c0, const Rational& cu, const Rational& cv) {
    Poly p;
    p.set(0, 0, c0);
    p.set(1, 0, cu);
    p.set(0, 1, cv);
    return p;
}

}  // namespace dk
