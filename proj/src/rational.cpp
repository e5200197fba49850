#include "deltakit/rational.hpp"

#include <cctype>

namespace dk {

Rational Rational::parse(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string t = s.substr(b, e - b);
    if (t.empty()) throw std::invalid_argument("Rational: empty string");
    auto slash = t.find('/');
    auto check_int = [&](const std::string& part, bool allow_sign) {
        if (part.empty()) return false;
        size_t i = 0;
        if (allow_sign && (part[0] == '+' || part[0] == '-')) i = 1;
        if (i == part.size()) return false;
        for (; i < part.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
        return true;
    };
    try {
        if (!t.empty() && t[0] == '+') t = t.substr(1);  // mpz rejects a leading '+'
        if (slash != std::string::npos) slash = t.find('/');
        if (slash == std::string::npos) {
            if (!check_int(t, true)) throw std::invalid_argument("bad integer");
            return Rational(mpq_class(mpz_class(t)));
        }
        std::string num = t.substr(0, slash), den = t.substr(slash + 1);
        if (!check_int(num, true) || !check_int(den, false))
            throw std::invalid_argument("bad fraction");
        mpz_class n(num), d(den);
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        mpq_class q(n, d);
        q.canonicalize();
        return Rational(q);
    } catch (const std::domain_error&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("Rational: cannot parse \"" + s + "\"");
    }
}

std::string Rational::str() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

}  // namespace dk
