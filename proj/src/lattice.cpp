#include "deltakit/lattice.hpp"

#include <algorithm>
#include <bit>

namespace dk {

CurveLattice::CurveLattice(std::vector<std::string> names, std::vector<bool> active,
                           std::vector<std::vector<Rational>> gram)
    : names_(std::move(names)), active_(std::move(active)), gram_(std::move(gram)) {
    size_t n = names_.size();
    if (active_.size() != n || gram_.size() != n)
        throw std::invalid_argument("CurveLattice: size mismatch");
    for (size_t i = 0; i < n; ++i)
        if (gram_[i].size() != n)
            throw std::invalid_argument("CurveLattice: gram is not square");
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (gram_[i][j] != gram_[j][i])
                throw std::invalid_argument("CurveLattice: gram is not symmetric");
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (names_[i] == names_[j] && i != j)
                throw std::invalid_argument("CurveLattice: duplicate curve name " + names_[i]);
    sparse_rows_.resize(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!gram_[i][j].is_zero())
                sparse_rows_[i].emplace_back(static_cast<int>(j), gram_[i][j]);
}

int CurveLattice::index(const std::string& name) const {
    auto i = find(name);
    if (!i) throw std::invalid_argument("CurveLattice: unknown curve " + name);
    return *i;
}

std::optional<int> CurveLattice::find(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

Rational CurveLattice::pair(const DivClass& a, const DivClass& b) const {
    size_t n = names_.size();
    if (a.size() != n || b.size() != n)
        throw std::invalid_argument("CurveLattice::pair: dimension mismatch");
    Rational s;
    for (size_t i = 0; i < n; ++i) {
        if (a[i].is_zero()) continue;
        for (const auto& [j, g] : sparse_rows_[i])
            if (!b[j].is_zero()) s += a[i] * g * b[j];
    }
    return s;
}

Rational CurveLattice::pair_curve(const DivClass& a, int curve) const {
    size_t n = names_.size();
    if (a.size() != n) throw std::invalid_argument("CurveLattice::pair_curve: dimension mismatch");
    Rational s;
    for (const auto& [i, g] : sparse_rows_[curve])
        if (!a[i].is_zero()) s += a[i] * g;
    return s;
}

Poly CurveLattice::pair_curve(const ParamClass& a, int curve) const {
    size_t n = names_.size();
    if (a.size() != n) throw std::invalid_argument("CurveLattice::pair_curve: dimension mismatch");
    Poly s;
    for (const auto& [i, g] : sparse_rows_[curve])
        if (!a[i].is_zero()) s += a[i] * g;
    return s;
}

Poly CurveLattice::pair(const ParamClass& a, const ParamClass& b) const {
    size_t n = names_.size();
    if (a.size() != n || b.size() != n)
        throw std::invalid_argument("CurveLattice::pair: dimension mismatch");
    Poly s;
    for (size_t i = 0; i < n; ++i) {
        if (a[i].is_zero()) continue;
        for (const auto& [j, g] : sparse_rows_[i])
            if (!b[j].is_zero()) s += a[i] * Poly(g) * b[j];
    }
    return s;
}

bool CurveLattice::is_nef(const DivClass& p) const {
    for (int i = 0; i < size(); ++i)
        if (active_[i] && pair_curve(p, i).sign() < 0) return false;
    return true;
}

bool CurveLattice::is_negative_definite(const std::vector<int>& subset) const {
    int k = static_cast<int>(subset.size());
    // Symmetric Gaussian elimination without pivoting: for a definite matrix
    // every leading minor is nonzero, so the elimination never needs a row
    // swap and the t-th leading minor is the product of the first t pivots.
    // Negative definite iff every pivot is negative; a zero pivot means some
    // leading minor vanishes, which already rules definiteness out.
    std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m[i][j] = gram_[subset[i]][subset[j]];
    for (int c = 0; c < k; ++c) {
        if (m[c][c].sign() >= 0) return false;
        for (int r = c + 1; r < k; ++r) {
            if (m[r][c].is_zero()) continue;
            Rational f = m[r][c] / m[c][c];
            for (int j = c; j < k; ++j) m[r][j] -= f * m[c][j];
        }
    }
    return true;
}

std::vector<int> CurveLattice::support_candidates() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (active_[i] && gram_[i][i].sign() < 0) out.push_back(i);
    return out;
}

std::optional<DivClass> CurveLattice::try_support(const std::vector<int>& support,
                                                  const DivClass& d) const {
    // N = sum a_i C_i with (D - N).C_i = 0 for all i in support, i.e.
    // gram|_S a = (D.C_i).
    int k = static_cast<int>(support.size());
    DivClass n(names_.size(), Rational(0));
    if (k == 0) return n;
    std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k));
    std::vector<Rational> rhs(k);
    for (int i = 0; i < k; ++i) {
        rhs[i] = pair_curve(d, support[i]);
        for (int j = 0; j < k; ++j) a[i][j] = gram_[support[i]][support[j]];
    }
    std::vector<Rational> coef;
    try {
        coef = solve_linear(std::move(a), std::move(rhs));
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
    for (int i = 0; i < k; ++i) n[support[i]] = coef[i];
    return n;
}

bool CurveLattice::nd_mask(unsigned mask, const std::vector<int>& support) const {
    signed char& nd = nd_cache_[mask];
    if (nd == 0) nd = is_negative_definite(support) ? 1 : -1;
    return nd > 0;
}

const std::vector<std::vector<Rational>>& CurveLattice::inv_for_mask(
    unsigned mask, const std::vector<int>& support) const {
    auto it = inv_cache_.find(mask);
    if (it == inv_cache_.end()) {
        int s = static_cast<int>(support.size());
        std::vector<std::vector<Rational>> a(s, std::vector<Rational>(s));
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) a[i][j] = gram_[support[i]][support[j]];
        it = inv_cache_.emplace(mask, invert_matrix(std::move(a))).first;
    }
    return it->second;
}

ZariskiPair CurveLattice::zariski_decompose(const DivClass& d) const {
    if (d.size() != names_.size())
        throw std::invalid_argument("zariski_decompose: dimension mismatch");
    std::vector<int> support;
    std::vector<bool> in_support(names_.size(), false);
    auto candidates = support_candidates();
    int k = static_cast<int>(candidates.size());
    const bool masked = k <= 20;
    if (masked && nd_cache_.size() != (size_t{1} << k)) nd_cache_.assign(size_t{1} << k, 0);
    std::vector<int> pos(names_.size(), -1);
    for (int i = 0; i < k; ++i) pos[candidates[i]] = i;
    unsigned mask = 0;
    int cap = static_cast<int>(candidates.size()) + 1;
    DivClass n(names_.size(), Rational(0));
    for (int iter = 0; iter < cap; ++iter) {
        DivClass p(names_.size());
        for (size_t i = 0; i < names_.size(); ++i) p[i] = d[i] - n[i];
        // Collect active negative-square curves the current P meets
        // negatively; also fail P against active curves outside the
        // candidate set (those can never be fixed by growing the support).
        bool grew = false;
        for (int c = 0; c < size(); ++c) {
            if (!active_[c]) continue;
            if (pair_curve(p, c).sign() >= 0) continue;
            if (gram_[c][c].sign() >= 0)
                throw NotPseudoeffective("class meets a non-negative-square active curve negatively");
            if (!in_support[c]) {
                in_support[c] = true;
                support.insert(std::upper_bound(support.begin(), support.end(), c), c);
                if (masked) mask |= 1u << pos[c];
                grew = true;
            }
        }
        if (!grew) {
            for (const auto& c : n)
                if (c.sign() < 0)
                    throw NotPseudoeffective("negative part has a negative coefficient");
            if (pair(p, p).sign() < 0)
                throw NotPseudoeffective("positive part has negative self-intersection");
            return ZariskiPair{p, n, support};
        }
        if (masked) {
            if (!nd_mask(mask, support))
                throw NotPseudoeffective("support is not negative definite");
            const auto& inv = inv_for_mask(mask, support);
            int s = static_cast<int>(support.size());
            std::vector<Rational> rhs(s);
            for (int i = 0; i < s; ++i) rhs[i] = pair_curve(d, support[i]);
            std::fill(n.begin(), n.end(), Rational(0));
            for (int i = 0; i < s; ++i) {
                Rational acc;
                for (int j = 0; j < s; ++j) acc += inv[i][j] * rhs[j];
                n[support[i]] = std::move(acc);
            }
        } else {
            if (!is_negative_definite(support))
                throw NotPseudoeffective("support is not negative definite");
            auto solved = try_support(support, d);
            if (!solved)
                throw NotPseudoeffective("support gram matrix is singular");
            n = *solved;
        }
    }
    throw std::logic_error("zariski_decompose: iteration cap exceeded");
}

ZariskiPair CurveLattice::zariski_decompose_exhaustive(const DivClass& d) const {
    if (d.size() != names_.size())
        throw std::invalid_argument("zariski_decompose_exhaustive: dimension mismatch");
    auto candidates = support_candidates();
    int k = static_cast<int>(candidates.size());
    if (k > 20) throw std::logic_error("zariski_decompose_exhaustive: too many candidates");
    if (nd_cache_.size() != (size_t{1} << k)) nd_cache_.assign(size_t{1} << k, 0);
    // A candidate curve the input class meets negatively must carry part of
    // the negative part: leaving it out of the support keeps P.C negative as
    // long as distinct curves pair nonnegatively, so every mask omitting it
    // would fail the nef check anyway. Restricting the enumeration to
    // supersets of that mandatory set skips only those doomed masks.
    std::vector<Rational> dc(k);
    for (int i = 0; i < k; ++i) dc[i] = pair_curve(d, candidates[i]);
    unsigned must = 0;
    bool offdiag_nonneg = true;
    for (int i = 0; i < k && offdiag_nonneg; ++i)
        for (int j = 0; j < k; ++j)
            if (j != i && gram_[candidates[i]][candidates[j]].sign() < 0) {
                offdiag_nonneg = false;
                break;
            }
    if (offdiag_nonneg) {
        // Fixpoint on certified membership: if the pairing of d against C_i,
        // discounted by the guaranteed coefficients of curves already forced
        // into the support, is still negative, then leaving C_i out keeps
        // P.C_i < 0 (distinct curves pair >= 0), so C_i is forced in too.
        // A forced curve C_j satisfies P.C_j = 0, which bounds its
        // coefficient below by eff_j / C_j^2 > 0; those bounds feed back
        // into the discounts. Capped passes keep termination trivial; the
        // bounds are valid at every stage, so this only skips masks that
        // would fail the nef check.
        std::vector<Rational> beta(k, Rational(0));
        std::vector<bool> forced(k, false);
        // A few passes recover almost all of the support on the large
        // lattices; small candidate sets enumerate fast anyway, so one
        // membership pass suffices there.
        const int passes = k >= 8 ? 4 : 1;
        bool changed = true;
        for (int pass = 0; changed && pass < passes; ++pass) {
            changed = false;
            for (int i = 0; i < k; ++i) {
                Rational eff = dc[i];
                for (int j = 0; j < k; ++j)
                    if (j != i && forced[j] && !beta[j].is_zero())
                        eff -= beta[j] * gram_[candidates[j]][candidates[i]];
                if (!forced[i]) {
                    if (eff.sign() >= 0) continue;
                    forced[i] = true;
                    changed = true;
                }
                Rational bound = eff / gram_[candidates[i]][candidates[i]];
                if (bound.sign() > 0 && bound > beta[i]) {
                    beta[i] = std::move(bound);
                    changed = true;
                }
            }
        }
        for (int i = 0; i < k; ++i)
            if (forced[i]) must |= 1u << i;
    }
    const unsigned free_bits = (k ? (1u << k) - 1 : 0u) & ~must;
    // Enumerate supports by increasing size: the unique valid decomposition
    // is usually carried by the mandatory set itself or one curve more, so
    // size order finds it after examining only a handful of masks.
    const int free_count = std::popcount(free_bits);
    for (int level = 0; level <= free_count; ++level) {
        unsigned sub = 0;
        do {
            const unsigned mask = sub | must;
            const unsigned cur = sub;
            sub = (sub - free_bits) & free_bits;  // next subset of free_bits, ascending
            if (std::popcount(cur) != level) continue;
            if (nd_cache_[mask] < 0) continue;
            std::vector<int> support;
            std::vector<int> positions;
            for (int i = 0; i < k; ++i)
                if (mask & (1u << i)) {
                    support.push_back(candidates[i]);
                    positions.push_back(i);
                }
            if (!nd_mask(mask, support)) continue;
            const auto& inv = inv_for_mask(mask, support);
            int s = static_cast<int>(support.size());
            std::vector<Rational> coef(s);
            bool nonneg = true;
            for (int i = 0; i < s && nonneg; ++i) {
                for (int j = 0; j < s; ++j) coef[i] += inv[i][j] * dc[positions[j]];
                nonneg = coef[i].sign() >= 0;
            }
            if (!nonneg) continue;
            DivClass n(names_.size(), Rational(0));
            for (int i = 0; i < s; ++i) n[support[i]] = coef[i];
            DivClass p(names_.size());
            for (size_t i = 0; i < names_.size(); ++i) p[i] = d[i] - n[i];
            if (!is_nef(p)) continue;
            if (pair(p, p).sign() < 0) continue;
            // Trim curves that entered with zero coefficient so the support
            // is canonical (the minimal one).
            std::vector<int> minimal;
            for (int c : support)
                if (!n[c].is_zero()) minimal.push_back(c);
            return ZariskiPair{p, n, minimal};
        } while (sub != 0);
    }
    throw NotPseudoeffective("no negative-definite support yields a valid decomposition");
}

std::vector<Poly> CurveLattice::solve_on_support(const std::vector<int>& support,
                                                 const std::vector<Poly>& rhs) const {
    int k = static_cast<int>(support.size());
    if (static_cast<int>(rhs.size()) != k)
        throw std::invalid_argument("solve_on_support: dimension mismatch");
    if (k == 0) return {};
    std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a[i][j] = gram_[support[i]][support[j]];
    auto inv = invert_matrix(std::move(a));
    std::vector<Poly> out(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) out[i] += rhs[j] * inv[i][j];
    return out;
}

std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> a,
                                   std::vector<Rational> b) {
    int n = static_cast<int>(b.size());
    if (static_cast<int>(a.size()) != n)
        throw std::invalid_argument("solve_linear: dimension mismatch");
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (!a[r][c].is_zero()) { piv = r; break; }
        if (piv < 0) throw std::domain_error("solve_linear: singular matrix");
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (int r = c + 1; r < n; ++r) {
            if (a[r][c].is_zero()) continue;
            Rational f = a[r][c] / a[c][c];
            for (int j = c; j < n; ++j) a[r][j] -= f * a[c][j];
            b[r] -= f * b[c];
        }
    }
    std::vector<Rational> x(n);
    for (int r = n - 1; r >= 0; --r) {
        Rational s = b[r];
        for (int j = r + 1; j < n; ++j) s -= a[r][j] * x[j];
        x[r] = s / a[r][r];
    }
    return x;
}

std::vector<std::vector<Rational>> invert_matrix(std::vector<std::vector<Rational>> a) {
    int n = static_cast<int>(a.size());
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < n; ++i) inv[i][i] = Rational(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (!a[r][c].is_zero()) { piv = r; break; }
        if (piv < 0) throw std::domain_error("invert_matrix: singular matrix");
        std::swap(a[piv], a[c]);
        std::swap(inv[piv], inv[c]);
        Rational d = a[c][c];
        for (int j = 0; j < n; ++j) {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || a[r][c].is_zero()) continue;
            Rational f = a[r][c];
            for (int j = 0; j < n; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

}  // namespace dk
