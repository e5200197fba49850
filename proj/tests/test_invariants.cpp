#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "deltakit/invariants.hpp"

#include <algorithm>
#include <array>

using namespace dk;

namespace {

Rational r(long n) { return Rational(n); }
Rational r(long n, long d) { return Rational(n, d); }
Poly u_() { return Poly::var_u(); }

// The rank-3 Picard lattice threefold all the worked families live on.
ThreefoldModel x_model() {
    ThreefoldModel m;
    m.basis = {"H1", "H2", "H3"};
    m.trilinear.assign(3, std::vector<std::vector<Rational>>(3, std::vector<Rational>(3)));
    auto set = [&](int i, int j, int k, long val) {
        std::array<int, 3> idx{i, j, k};
        std::sort(idx.begin(), idx.end());
        do {
            m.trilinear[idx[0]][idx[1]][idx[2]] = Rational(val);
        } while (std::next_permutation(idx.begin(), idx.end()));
    };
    set(0, 1, 1, 1);
    set(0, 1, 2, 2);
    set(0, 2, 2, 2);
    set(1, 1, 2, 1);
    set(1, 2, 2, 1);
    set(2, 2, 2, 1);
    m.validate();
    return m;
}

std::vector<Poly> cls3(Poly a, Poly b, Poly c) {
    return {std::move(a), std::move(b), std::move(c)};
}

// Blowup of P^2 in two points: e0, e1, e2, plus the passive anticanonical-type
// curve CQ ~ 3e0 + 2e1 + 2e2.
CurveLattice qp_lattice() {
    return CurveLattice({"e0", "e1", "e2", "CQ"}, {true, true, true, false},
                        {{r(-1), r(1), r(1), r(1)},
                         {r(1), r(-1), r(0), r(1)},
                         {r(1), r(0), r(-1), r(1)},
                         {r(1), r(1), r(1), r(7)}});
}

// The Hirzebruch surface F1: section s, fiber l2, passive CE ~ 2s + 3l2.
CurveLattice e2_lattice() {
    return CurveLattice({"s", "l2", "CE"}, {true, true, false},
                        {{r(-1), r(1), r(1)}, {r(1), r(0), r(2)}, {r(1), r(2), r(8)}});
}

// One blowup further: lt2, et1, st active plus the passive CEt ~ 3*lt2 +
// 4*et1 + 2*st.
CurveLattice e2q1_lattice() {
    return CurveLattice({"lt2", "et1", "st", "CEt"}, {true, true, true, false},
                        {{r(-1), r(1), r(0), r(1)},
                         {r(1), r(-1), r(1), r(1)},
                         {r(0), r(1), r(-2), r(0)},
                         {r(1), r(1), r(0), r(7)}});
}

RefinementData qp_refinement() {
    auto lat = qp_lattice();
    std::vector<SurfaceChamber> chambers(2);
    chambers[0] = {r(0), r(1), {Poly(3), Poly(2), Poly(2), Poly(0)}, {}};
    Poly w = Poly(2) - u_();
    chambers[1] = {r(1), r(2), {w * r(3), w * r(2), w * r(2), Poly(0)}, {{3, u_() - Poly(1)}}};
    DivClass B{r(1), r(1), r(0), r(0)};  // composite: e0 + e1
    return run_refinement(lat, std::move(chambers), B, std::nullopt, {}, r(28));
}

RefinementData e2_refinement() {
    auto lat = e2_lattice();
    std::vector<SurfaceChamber> chambers(2);
    chambers[0] = {r(0), r(1), {Poly(1) + u_(), Poly(2) + u_(), Poly(0)}, {}};
    chambers[1] = {r(1), r(2),
                   {Poly(3) - u_(), Poly(5) - u_() * r(2), Poly(0)},
                   {{2, u_() - Poly(1)}}};
    DivClass C{r(0), r(1), r(0)};  // the fiber l2
    return run_refinement(lat, std::move(chambers), C, 1, {}, r(28));
}

RefinementData e2q1_refinement() {
    auto lat = e2q1_lattice();
    std::vector<SurfaceChamber> chambers(2);
    chambers[0] = {r(0), r(1),
                   {Poly(2) + u_(), Poly(3) + u_() * r(2), Poly(1) + u_(), Poly(0)},
                   {}};
    chambers[1] = {r(1), r(2),
                   {Poly(5) - u_() * r(2), Poly(8) - u_() * r(3), Poly(3) - u_(), Poly(0)},
                   {{1, u_() - Poly(1)}, {3, u_() - Poly(1)}}};
    DivClass C{r(0), r(1), r(0), r(0)};  // the exceptional curve et1
    return run_refinement(lat, std::move(chambers), C, 1, {}, r(28));
}

void expect_all_pass(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}

}  // namespace

TEST_CASE("threefold model validation and triple products") {
    auto m = x_model();
    Poly one(1);
    auto full = cls3(one, one, one);
    CHECK(m.triple(full, full, full) == Poly(28));
    auto sub = cls3(Poly(0), one, one);
    CHECK(m.triple(sub, sub, sub) == Poly(7));

    ThreefoldModel bad = m;
    bad.trilinear[0][1][2] = r(3);  // breaks symmetry
    CHECK_THROWS_AS(bad.validate(), InvalidScenario);
    CHECK_THROWS_AS(m.triple({one}, full, full), InvalidScenario);
}

TEST_CASE("volume families and the divisor functional") {
    auto m = x_model();

    SUBCASE("quadric-section family") {
        std::vector<Chamber3> ch(2);
        ch[0] = {r(0), r(1), cls3(Poly(1) - u_(), Poly(1), Poly(1)), std::nullopt};
        Poly w = Poly(2) - u_();
        ch[1] = {r(1), r(2), cls3(Poly(0), w, w), std::nullopt};
        auto vol = vol_family(m, ch);
        CHECK(vol.eval(r(0)) == r(28));
        CHECK(vol.eval(r(2)) == r(0));
        CHECK(s_divisor(vol) == r(11, 16));
    }

    SUBCASE("ruled-exceptional family") {
        std::vector<Chamber3> ch(2);
        ch[0] = {r(0), r(1), cls3(Poly(1), Poly(1) + u_(), Poly(1) - u_()), std::nullopt};
        ch[1] = {r(1), r(2), cls3(Poly(2) - u_(), Poly(3) - u_(), Poly(0)), std::nullopt};
        auto vol = vol_family(m, ch);
        CHECK(vol.eval(r(0)) == r(28));
        CHECK(s_divisor(vol) == r(51, 56));
    }

    SUBCASE("explicit volume polynomials") {
        Poly u = u_();
        Poly um1 = u - Poly(1), um2 = u - Poly(2);
        Poly base = Poly(28) - u * u * u;
        std::vector<Chamber3> ch(4);
        ch[0] = {r(0), r(1), std::nullopt, base};
        ch[1] = {r(1), r(2), std::nullopt, base + um1 * um1 * um1 / r(2)};
        ch[2] = {r(2), r(3), std::nullopt,
                 base + um1 * um1 * um1 / r(2) + um2 * um2 * (u + Poly(7)) / r(2)};
        ch[3] = {r(3), r(4), std::nullopt,
                 (Poly(7) - u) * (Poly(4) - u) * (Poly(2) + u) / r(2)};
        auto vol = vol_family(std::nullopt, ch);
        CHECK(s_divisor(vol) == r(289, 112));
    }

    SUBCASE("rejects malformed families") {
        std::vector<Chamber3> both(1);
        both[0] = {r(0), r(1), cls3(Poly(1), Poly(1), Poly(1)), Poly(28)};
        CHECK_THROWS_AS(vol_family(m, both), InvalidScenario);
        std::vector<Chamber3> jump(2);
        jump[0] = {r(0), r(1), std::nullopt, Poly(28)};
        jump[1] = {r(1), r(2), std::nullopt, Poly(5)};
        CHECK_THROWS_AS(vol_family(std::nullopt, jump), InvalidScenario);
        CHECK_THROWS_AS(vol_family(m, {}), InvalidScenario);
    }
}

TEST_CASE("composite-class refinement on the two-point blowup surface") {
    auto lat = qp_lattice();
    auto ref = qp_refinement();
    CHECK(ref.s_value == r(95, 112));
    CHECK(ref.d.eval(r(1)) == r(0));
    CHECK(ref.tau() == r(2));

    PointSpec p{"p", r(1), {{3, r(1)}}, std::nullopt};
    CHECK(f_point(lat, ref, p) == r(1, 16));
    CHECK(s_point_base(lat, ref) == r(95, 112));
    CHECK(s_point(lat, ref, p) == r(51, 56));

    Rational delta = delta_chain({{"X", r(1), r(11, 16)},
                                  {"B", r(1), ref.s_value},
                                  {"p", r(1), s_point(lat, ref, p)}});
    CHECK(delta == r(56, 51));

    expect_all_pass(cross_checks(lat, ref));
}

TEST_CASE("fiber refinement on the Hirzebruch surface") {
    auto lat = e2_lattice();
    auto ref = e2_refinement();
    CHECK(ref.s_value == r(25, 28));
    CHECK(ref.tau() == r(3));

    PointSpec on_s{"q1", r(1), {{0, r(1)}}, std::nullopt};
    PointSpec on_ce{"q2", r(1), {{2, r(1)}}, std::nullopt};
    PointSpec tangent_ce{"q3", r(1), {{2, r(2)}}, std::nullopt};
    CHECK(f_point(lat, ref, on_s) == r(15, 56));
    CHECK(f_point(lat, ref, on_ce) == r(17, 112));
    CHECK(f_point(lat, ref, tangent_ce) == r(17, 56));
    CHECK(s_point_base(lat, ref) == r(75, 112));
    CHECK(s_point(lat, ref, tangent_ce) == r(109, 112));

    Rational delta = delta_chain({{"X", r(1), r(51, 56)},
                                  {"l2", r(1), ref.s_value},
                                  {"q3", r(1), s_point(lat, ref, tangent_ce)}});
    CHECK(delta == r(112, 109));

    expect_all_pass(cross_checks(lat, ref));

    // Point multiplicities must not mention the refinement curve itself.
    PointSpec bad{"bad", r(1), {{1, r(1)}}, std::nullopt};
    CHECK_THROWS_AS(f_point(lat, ref, bad), InvalidScenario);
}

TEST_CASE("refinement carrying a nonzero negative part along the curve") {
    auto lat = e2q1_lattice();
    auto ref = e2q1_refinement();
    CHECK(ref.s_value == r(111, 56));
    CHECK(ref.d.eval(r(2)) == r(1));
    CHECK(ref.tau() == r(5));

    PointSpec on_l{"pl", r(1), {{0, r(1)}}, std::nullopt};
    PointSpec on_ce{"pc", r(1), {{3, r(1)}}, std::nullopt};
    PointSpec on_s{"ps", r(1), {{2, r(1)}}, std::nullopt};
    CHECK(f_point(lat, ref, on_l) == r(15, 32));
    CHECK(f_point(lat, ref, on_ce) == r(17, 112));
    CHECK(f_point(lat, ref, on_s) == r(115, 224));
    CHECK(s_point_base(lat, ref) == r(95, 224));
    CHECK(s_point(lat, ref, on_s) == r(15, 16));

    Rational delta = delta_chain({{"X", r(1), r(51, 56)},
                                  {"et1", r(2), ref.s_value},
                                  {"ps", r(1), s_point(lat, ref, on_s)}});
    CHECK(delta == r(112, 111));

    expect_all_pass(cross_checks(lat, ref));
}

TEST_CASE("delta chain combiner") {
    CHECK(delta_chain({{"a", r(1), r(2)}, {"b", r(3), r(2)}}) == r(1, 2));
    CHECK(delta_chain({{"a", r(2), r(1)}}) == r(2));
    CHECK_THROWS_AS(delta_chain({}), InvalidScenario);
    CHECK_THROWS_AS(delta_chain({{"a", r(0), r(1)}}), InvalidScenario);
    CHECK_THROWS_AS(delta_chain({{"a", r(1), r(-1)}}), InvalidScenario);
}

TEST_CASE("doubling covariance of the functionals") {
    // Scale every class by 2 and substitute u -> u/2, v -> v/2: volumes scale
    // by 8, every S and F scales by 2, and the chain minimizer is unchanged.
    auto lat = e2_lattice();
    auto ref = e2_refinement();

    auto stretch = [](const Poly& p) {
        // p is affine in u: c0 + c1*u -> 2*c0 + c1*u.
        Poly out = p * r(2);
        Poly fix;
        for (const auto& [m, c] : out.terms()) {
            if (m.first == 1 && m.second == 0)
                fix.set(1, 0, c / r(2));
            else
                fix.set(m.first, m.second, c);
        }
        return fix;
    };

    std::vector<SurfaceChamber> chambers;
    for (const auto& ch : ref.chambers) {
        SurfaceChamber big;
        big.lo = ch.lo * r(2);
        big.hi = ch.hi * r(2);
        for (const auto& q : ch.Q) big.Q.push_back(stretch(q));
        for (const auto& [k, n] : ch.n_input) big.n_input[k] = stretch(n);
        chambers.push_back(std::move(big));
    }
    auto big = run_refinement(lat, std::move(chambers), ref.C, ref.c_index, ref.sigma,
                              ref.vol * r(8));
    CHECK(big.s_value == ref.s_value * r(2));
    CHECK(big.tau() == ref.tau() * r(2));

    PointSpec p{"q", r(1), {{2, r(2)}}, std::nullopt};
    CHECK(f_point(lat, big, p) == f_point(lat, ref, p) * r(2));
    CHECK(s_point_base(lat, big) == s_point_base(lat, ref) * r(2));
    expect_all_pass(cross_checks(lat, big));
}

TEST_CASE("run_refinement rejects bad input") {
    auto lat = e2_lattice();
    CHECK_THROWS_AS(run_refinement(lat, {}, {r(0), r(1), r(0)}, 1, {}, r(28)),
                    InvalidScenario);
    std::vector<SurfaceChamber> ch(1);
    ch[0] = {r(1), r(1), {Poly(1), Poly(2), Poly(0)}, {}};
    CHECK_THROWS_AS(run_refinement(lat, ch, {r(0), r(1), r(0)}, 1, {}, r(28)),
                    InvalidScenario);
    ch[0] = {r(0), r(1), {Poly(1) + u_(), Poly(2) + u_(), Poly(0)}, {}};
    CHECK_THROWS_AS(run_refinement(lat, ch, {r(0), r(1), r(0)}, 1, {}, r(0)),
                    InvalidScenario);
}
