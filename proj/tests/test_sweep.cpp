#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "deltakit/sweep.hpp"

#include <random>

using namespace dk;

namespace {

Rational r(long n) { return Rational(n); }

CurveLattice qp_lattice() {
    return CurveLattice({"e0", "e1", "e2"}, {true, true, true},
                        {{r(-1), r(1), r(1)}, {r(1), r(-1), r(0)}, {r(1), r(0), r(-1)}});
}

CurveLattice e2_lattice() {
    return CurveLattice({"s", "l2", "CE"}, {true, true, false},
                        {{r(-1), r(1), r(1)}, {r(1), r(0), r(2)}, {r(1), r(2), r(8)}});
}

// The 12-curve lattice of the big resolved surface.
CurveLattice r_lattice() {
    std::vector<std::vector<long>> g{
        {-3, 1, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0}, {1, -1, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0},
        {0, 1, -1, 0, 0, 0, 0, 0, 0, 1, 0, 1}, {1, 0, 0, -1, 1, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 1, -2, 1, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, -2, 1, 0, 0, 1, 0, 0},
        {0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 1, 1}, {1, 0, 0, 0, 0, 0, 0, -1, 1, 0, 0, 1},
        {0, 0, 0, 0, 0, 0, 0, 1, -1, 1, 1, 0}, {0, 0, 1, 0, 0, 1, 0, 0, 1, -1, 0, 0},
        {0, 1, 0, 0, 0, 0, 1, 0, 1, 0, -1, 0}, {0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, -1}};
    std::vector<std::vector<Rational>> gram(12, std::vector<Rational>(12));
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) gram[i][j] = Rational(g[i][j]);
    return CurveLattice({"sR", "tp", "fS", "fR", "h1", "h2", "lp", "f2", "sp", "r1", "r2", "r3"},
                        std::vector<bool>(12, true), gram);
}

Poly u_() { return Poly::var_u(); }

ParamClass pc3(Poly a, Poly b, Poly c) { return {std::move(a), std::move(b), std::move(c)}; }

std::mt19937 rng(777);
Rational rand_in(const Rational& lo, const Rational& hi) {
    std::uniform_int_distribution<long> num(1, 9999);
    Rational f(num(rng), 10000);  // in (0,1)
    return lo + (hi - lo) * f;
}

void oracle_check(const CurveLattice& lat, const SweepResult& sw, const ParamClass& Q,
                  const DivClass& C, int samples) {
    std::uniform_int_distribution<size_t> pick(0, sw.cells.size() - 1);
    for (int i = 0; i < samples; ++i) {
        const auto& cell = sw.cells[pick(rng)];
        Rational u = rand_in(cell.u_lo, cell.u_hi);
        Rational vlo = cell.v_lo.eval(u, Rational(0)), vhi = cell.v_hi.eval(u, Rational(0));
        if (!(vlo < vhi)) continue;
        Rational v = rand_in(vlo, vhi);
        DivClass cls(lat.size());
        for (int k = 0; k < lat.size(); ++k)
            cls[k] = Q[k].eval(u, Rational(0)) - v * C[k];
        auto z = lat.zariski_decompose(cls);
        auto zo = lat.zariski_decompose_exhaustive(cls);
        REQUIRE(z.positive == zo.positive);
        REQUIRE(z.negative == zo.negative);
        for (int k = 0; k < lat.size(); ++k)
            REQUIRE(cell.p_class[k].eval(u, v) == z.positive[k]);
        // The sample must lie in exactly one cell.
        int containing = 0;
        for (const auto& other : sw.cells) {
            if (!(other.u_lo <= u && u <= other.u_hi)) continue;
            if (other.v_lo.eval(u, Rational(0)) < v && v < other.v_hi.eval(u, Rational(0)))
                ++containing;
        }
        REQUIRE(containing == 1);
    }
}

void structural_checks(const CurveLattice& lat, const SweepResult& sw, const ParamClass& Q,
                       const DivClass& C) {
    for (const auto& cell : sw.cells) {
        // P + sum n_i C_i = Q - v*C identically.
        ParamClass total = cell.p_class;
        for (size_t i = 0; i < cell.support.size(); ++i)
            total[cell.support[i]] += cell.n_coeffs[i];
        for (int k = 0; k < lat.size(); ++k)
            CHECK(total[k] == Q[k] - Poly(C[k]) * Poly::var_v());
        // d(P^2)/dv = -2 (P.C).
        CHECK(cell_psquare(lat, cell).derivative_v() ==
              cell_pc(lat, cell, C) * Rational(-2));
        // N-coefficients nondecreasing in v.
        for (const auto& n : cell.n_coeffs) CHECK(n.coeff(0, 1).sign() >= 0);
    }
    CHECK(sw.t.is_continuous());
}

}  // namespace

TEST_CASE("sweep on the ruled-surface lattice matches the hand chamber table") {
    auto lat = e2_lattice();
    ParamClass Q = pc3(Poly(1) + u_(), Poly(2) + u_(), Poly(0));
    DivClass C{r(0), r(1), r(0)};
    auto sw = sweep(lat, Q, r(0), r(1), C);

    REQUIRE(sw.cells.size() == 2);
    CHECK(sw.cells[0].support.empty());
    CHECK(sw.cells[0].v_lo == Poly(0));
    CHECK(sw.cells[0].v_hi == Poly(1));
    CHECK(cell_psquare(lat, sw.cells[0]) ==
          (Poly(1) + u_()) * (Poly(3) + u_() - Poly::var_v() * r(2)));

    CHECK(sw.cells[1].support == std::vector<int>{0});
    CHECK(sw.cells[1].n_coeffs[0] == Poly::var_v() - Poly(1));
    CHECK(sw.cells[1].v_hi == Poly(2) + u_());
    Poly expect = (Poly(2) + u_() - Poly::var_v());
    CHECK(cell_psquare(lat, sw.cells[1]) == expect * expect);
    CHECK(cell_pc(lat, sw.cells[1], C) == expect);

    CHECK(sw.t.eval(r(1)) == r(3));
    structural_checks(lat, sw, Q, C);
    oracle_check(lat, sw, Q, C, 200);
}

TEST_CASE("sweep second chamber of the ruled-surface family") {
    auto lat = e2_lattice();
    ParamClass Q = pc3(Poly(3) - u_(), Poly(5) - u_() * r(2), Poly(0));
    DivClass C{r(0), r(1), r(0)};
    auto sw = sweep(lat, Q, r(1), r(2), C);
    REQUIRE(sw.cells.size() == 2);
    CHECK(sw.cells[0].v_hi == Poly(2) - u_());
    CHECK(sw.cells[1].n_coeffs[0] == Poly(-2) + u_() + Poly::var_v());
    CHECK(sw.cells[1].v_hi == Poly(5) - u_() * r(2));
    structural_checks(lat, sw, Q, C);
    oracle_check(lat, sw, Q, C, 200);
}

TEST_CASE("sweep with a composite refinement class") {
    auto lat = qp_lattice();
    ParamClass Q = pc3(Poly(3), Poly(2), Poly(2));
    DivClass B{r(1), r(1), r(0)};
    auto sw = sweep(lat, Q, r(0), r(1), B);
    REQUIRE(sw.cells.size() == 2);
    CHECK(sw.cells[0].support.empty());
    CHECK(cell_psquare(lat, sw.cells[0]) == Poly(7) - Poly::var_v() * r(4));
    CHECK(cell_pc(lat, sw.cells[0], B) == Poly(2));
    CHECK(sw.cells[1].support == std::vector<int>{2});
    CHECK(sw.cells[1].n_coeffs[0] == Poly::var_v() - Poly(1));
    CHECK(cell_psquare(lat, sw.cells[1]) ==
          (Poly(2) - Poly::var_v()) * (Poly(4) - Poly::var_v()));
    CHECK(cell_pc(lat, sw.cells[1], B) == Poly(3) - Poly::var_v());
    CHECK(sw.t.eval(r(0)) == r(2));
    structural_checks(lat, sw, Q, B);
    oracle_check(lat, sw, Q, B, 200);

    // Second chamber: Q scaled by (2-u) on [1,2].
    ParamClass Q2 = pc3((Poly(2) - u_()) * r(3), (Poly(2) - u_()) * r(2), (Poly(2) - u_()) * r(2));
    auto sw2 = sweep(lat, Q2, r(1), r(2), B);
    REQUIRE(sw2.cells.size() == 2);
    CHECK(sw2.cells[0].v_hi == Poly(2) - u_());
    CHECK(sw2.cells[1].v_hi == Poly(4) - u_() * r(2));
    CHECK(cell_psquare(lat, sw2.cells[1]) ==
          (Poly(4) - u_() * r(2) - Poly::var_v()) * (Poly(8) - u_() * r(4) - Poly::var_v()));
    structural_checks(lat, sw2, Q2, B);
    oracle_check(lat, sw2, Q2, B, 200);
}

TEST_CASE("sweep on the 12-curve lattice: first chamber with a wide stack") {
    auto lat = r_lattice();
    // Q = the nef family [(u-6)/2, (3u-20)/2, u-9, 0, 3, 6, 8, 1, 4, 1, 2, 0].
    ParamClass Q(12);
    Q[0] = (u_() - Poly(6)) / r(2);
    Q[1] = (u_() * r(3) - Poly(20)) / r(2);
    Q[2] = u_() - Poly(9);
    Q[3] = Poly(0);
    Q[4] = Poly(3);
    Q[5] = Poly(6);
    Q[6] = Poly(8);
    Q[7] = Poly(1);
    Q[8] = Poly(4);
    Q[9] = Poly(1);
    Q[10] = Poly(2);
    Q[11] = Poly(0);
    DivClass C(12, r(0));
    C[0] = r(1);  // sweep against the first curve
    auto sw = sweep(lat, Q, r(0), r(1), C);
    REQUIRE_FALSE(sw.cells.empty());
    // The bottom cell: support {tp} with n = v, up to v = u/2.
    CHECK(sw.cells[0].support == std::vector<int>{1});
    CHECK(sw.cells[0].n_coeffs[0] == Poly::var_v());
    CHECK(sw.cells[0].v_hi == u_() / r(2));
    CHECK(sw.u_breaks.front() == r(0));
    CHECK(sw.u_breaks.back() == r(1));
    CHECK(sw.t.eval(Rational(1, 2)) >= Rational(1, 4));
    structural_checks(lat, sw, Q, C);
    oracle_check(lat, sw, Q, C, 100);
}

TEST_CASE("sweep rejects bad input") {
    auto lat = e2_lattice();
    DivClass C{r(0), r(1), r(0)};
    // Not nef: -s.
    ParamClass bad = pc3(Poly(-1), Poly(0), Poly(0));
    CHECK_THROWS_AS(sweep(lat, bad, r(0), r(1), C), NotNefInput);
    ParamClass Q = pc3(Poly(1) + u_(), Poly(2) + u_(), Poly(0));
    CHECK_THROWS_AS(sweep(lat, Q, r(1), r(1), C), std::invalid_argument);
    ParamClass quad = pc3(u_() * u_(), Poly(1), Poly(0));
    CHECK_THROWS_AS(sweep(lat, quad, r(0), r(1), C), std::invalid_argument);
}

TEST_CASE("boundary certificate along the envelope") {
    auto lat = e2_lattice();
    ParamClass Q = pc3(Poly(1) + u_(), Poly(2) + u_(), Poly(0));
    DivClass C{r(0), r(1), r(0)};
    auto sw = sweep(lat, Q, r(0), r(1), C);
    const auto& top = sw.cells.back();
    Poly psq_edge = cell_psquare(lat, top).subst_v(top.v_hi);
    Poly pc_edge = cell_pc(lat, top, C).subst_v(top.v_hi);
    CHECK((psq_edge.is_zero() || pc_edge.is_zero()));
}
