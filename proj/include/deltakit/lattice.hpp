#pragma once

// Curve lattices on the polarized surface: a named list of curves, an exact
// Gram matrix of intersection numbers, and Zariski decomposition of divisor
// classes expressed in the curve basis.
//
// "Active" curves generate the cone used for nefness tests. Support
// candidates for the negative part are the active curves of negative
// self-intersection.

#include "deltakit/poly.hpp"
#include "deltakit/rational.hpp"

#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <string>
#include <vector>

namespace dk {

// Divisor class as coefficients over the lattice's curve list.
using DivClass = std::vector<Rational>;
// Divisor class whose coefficients are polynomials in (u, v).
using ParamClass = std::vector<Poly>;

struct NotPseudoeffective : std::runtime_error {
    explicit NotPseudoeffective(const std::string& what) : std::runtime_error(what) {}
};

struct ZariskiPair {
    DivClass positive;  // nef part P
    DivClass negative;  // coefficients of the negative part N (>= 0)
    std::vector<int> support;  // indices of curves carrying N
};

class CurveLattice {
public:
    CurveLattice(std::vector<std::string> names, std::vector<bool> active,
                 std::vector<std::vector<Rational>> gram);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int i) const { return names_[i]; }
    bool is_active(int i) const { return active_[i]; }
    int index(const std::string& name) const;  // throws if unknown
    std::optional<int> find(const std::string& name) const;
    const std::vector<std::vector<Rational>>& gram() const { return gram_; }

    Rational pair(const DivClass& a, const DivClass& b) const;
    Rational pair_curve(const DivClass& a, int curve) const;
    Poly pair_curve(const ParamClass& a, int curve) const;
    Poly pair(const ParamClass& a, const ParamClass& b) const;

    // P is nef on the recorded cone: P . C >= 0 for every active curve C.
    bool is_nef(const DivClass& p) const;

    // Exact negative-definiteness of gram restricted to `subset`, via
    // leading principal minors (sign of the k-th minor must be (-1)^k).
    bool is_negative_definite(const std::vector<int>& subset) const;

    // Candidates for Zariski supports: active and C^2 < 0.
    std::vector<int> support_candidates() const;

    // Iterative Zariski decomposition: grow the support by curves the
    // current positive part still meets negatively, re-solve, repeat.
    // Throws NotPseudoeffective when the class admits no decomposition.
    ZariskiPair zariski_decompose(const DivClass& d) const;

    // Independent oracle: try every negative-definite subset of support
    // candidates and return the (unique) one whose solution is a valid
    // decomposition. Same failure behavior as zariski_decompose.
    ZariskiPair zariski_decompose_exhaustive(const DivClass& d) const;

    // Solve gram|_S . n = rhs for the negative-part coefficients on a fixed
    // support, with polynomial right-hand side (used by the chamber sweep).
    std::vector<Poly> solve_on_support(const std::vector<int>& support,
                                       const std::vector<Poly>& rhs) const;

private:
    std::optional<DivClass> try_support(const std::vector<int>& support,
                                        const DivClass& d) const;
    // Cached negative-definiteness / Gram-block inverse for a support given
    // as a bitmask over support_candidates() positions. `support` must list
    // the same curves in ascending index order.
    bool nd_mask(unsigned mask, const std::vector<int>& support) const;
    const std::vector<std::vector<Rational>>& inv_for_mask(
        unsigned mask, const std::vector<int>& support) const;

    std::vector<std::string> names_;
    std::vector<bool> active_;
    std::vector<std::vector<Rational>> gram_;
    // Nonzero entries of each Gram row; the matrices are sparse and the
    // pairing scans are the hot path of the decomposition routines.
    std::vector<std::vector<std::pair<int, Rational>>> sparse_rows_;
    // Memoized negative-definiteness per subset of support_candidates(),
    // keyed by candidate bitmask: 0 unknown, 1 definite, -1 not. The lattice
    // is immutable after construction, so entries never go stale.
    mutable std::vector<signed char> nd_cache_;
    // Memoized inverses of the negative-definite restricted Gram blocks,
    // keyed by the same candidate bitmask.
    mutable std::unordered_map<unsigned, std::vector<std::vector<Rational>>> inv_cache_;
};

// Exact linear algebra used by the lattice (exposed for tests).
// Solves A x = b by Gaussian elimination; throws std::domain_error if A is
// singular.
std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> a,
                                   std::vector<Rational> b);
// Inverse of a square rational matrix; throws std::domain_error if singular.
std::vector<std::vector<Rational>> invert_matrix(std::vector<std::vector<Rational>> a);

}  // namespace dk
