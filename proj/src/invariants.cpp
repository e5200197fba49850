#include "deltakit/invariants.hpp"

#include <algorithm>

namespace dk {

void ThreefoldModel::validate() const {
    size_t n = basis.size();
    if (trilinear.size() != n) throw InvalidScenario("trilinear: wrong rank-1 size");
    for (const auto& m : trilinear) {
        if (m.size() != n) throw InvalidScenario("trilinear: wrong rank-2 size");
        for (const auto& row : m)
            if (row.size() != n) throw InvalidScenario("trilinear: wrong rank-3 size");
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k) {
                const Rational& v = trilinear[i][j][k];
                if (trilinear[i][k][j] != v || trilinear[j][i][k] != v ||
                    trilinear[k][j][i] != v)
                    throw InvalidScenario("trilinear: not symmetric");
            }
}

Poly ThreefoldModel::triple(const std::vector<Poly>& a, const std::vector<Poly>& b,
                            const std::vector<Poly>& c) const {
    size_t n = basis.size();
    if (a.size() != n || b.size() != n || c.size() != n)
        throw InvalidScenario("triple: dimension mismatch");
    Poly s;
    for (size_t i = 0; i < n; ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < n; ++j) {
            if (b[j].is_zero()) continue;
            for (size_t k = 0; k < n; ++k)
                if (!trilinear[i][j][k].is_zero())
                    s += a[i] * b[j] * c[k] * trilinear[i][j][k];
        }
    }
    return s;
}

PiecewiseFn vol_family(const std::optional<ThreefoldModel>& model,
                       const std::vector<Chamber3>& chambers) {
    if (chambers.empty()) throw InvalidScenario("vol_family: no chambers");
    std::vector<Piece> pieces;
    for (const auto& ch : chambers) {
        if (ch.p3_class.has_value() == ch.vol_poly.has_value())
            throw InvalidScenario("vol_family: give exactly one of p3_class / vol_poly");
        Poly vol;
        if (ch.vol_poly) {
            vol = *ch.vol_poly;
        } else {
            if (!model) throw InvalidScenario("vol_family: p3_class needs a threefold model");
            vol = model->triple(*ch.p3_class, *ch.p3_class, *ch.p3_class);
        }
        if (!vol.is_univariate_u()) throw InvalidScenario("vol_family: volume involves v");
        pieces.push_back({ch.lo, ch.hi, vol});
    }
    PiecewiseFn f(std::move(pieces));
    if (!f.is_continuous())
        throw InvalidScenario("vol_family: volume is discontinuous across a chamber join");
    return f;
}

Rational s_divisor(const PiecewiseFn& vol) {
    Rational v0 = vol.eval(vol.lo());
    if (v0.sign() <= 0) throw InvalidScenario("s_divisor: vol(L) must be positive");
    return vol.integrate() / v0;
}

Rational RefinementData::tau() const {
    // d + t is piecewise affine and concave, so the max sits at a breakpoint
    // of either function.
    Rational best;
    auto consider = [&](const Rational& x) {
        Rational val = d.eval(x) + t_eval(x);
        if (val > best) best = val;
    };
    for (const auto& p : d.pieces()) {
        consider(p.lo);
        consider(p.hi);
    }
    for (const auto& sw : sweeps)
        for (const auto& b : sw.u_breaks) consider(b);
    return best;
}

// RefinementData::tau needs t at chamber breakpoints of d; t has its own
// breakpoints too, so evaluate the sum at the union.
Rational RefinementData::t_eval(const Rational& u) const {
    for (const auto& sw : sweeps)
        if (sw.t.lo() <= u && u <= sw.t.hi()) return sw.t.eval(u);
    throw std::out_of_range("tau: u outside every sweep");
}

RefinementData run_refinement(const CurveLattice& lat,
                              std::vector<SurfaceChamber> chambers, DivClass C,
                              std::optional<int> c_index,
                              std::map<int, Rational> sigma, const Rational& vol) {
    if (chambers.empty()) throw InvalidScenario("run_refinement: no chambers");
    if (vol.sign() <= 0) throw InvalidScenario("run_refinement: vol must be positive");
    RefinementData ref;
    ref.C = std::move(C);
    ref.c_index = c_index;
    ref.sigma = std::move(sigma);
    ref.vol = vol;

    std::vector<Piece> d_pieces;
    Rational total;
    for (auto& ch : chambers) {
        if (!(ch.lo < ch.hi)) throw InvalidScenario("run_refinement: empty chamber");
        Poly d_poly;
        if (c_index) {
            auto it = ch.n_input.find(*c_index);
            if (it != ch.n_input.end()) d_poly = it->second;
        }
        d_pieces.push_back({ch.lo, ch.hi, d_poly});

        SweepResult sw = sweep(lat, ch.Q, ch.lo, ch.hi, ref.C);
        sw.d = PiecewiseFn({{ch.lo, ch.hi, d_poly}});

        Poly q2 = lat.pair(ch.Q, ch.Q);
        total += integrate_interval(d_poly * q2, ch.lo, ch.hi);
        for (const auto& cell : sw.cells) {
            Poly inner = integrate_strip(cell_psquare(lat, cell), cell.v_lo, cell.v_hi);
            total += integrate_interval(inner, cell.u_lo, cell.u_hi);
        }
        ref.sweeps.push_back(std::move(sw));
    }
    ref.d = PiecewiseFn(std::move(d_pieces));
    if (!ref.d.is_continuous())
        throw InvalidScenario("run_refinement: d(u) is discontinuous");
    ref.chambers = std::move(chambers);
    ref.s_value = Rational(3) * total / vol;
    return ref;
}

namespace {

// The ord-multiplicity integrand M_p on one cell.
Poly point_integrand(const RefinementData& ref, const SurfaceChamber& ch,
                     const SupportCell& cell, const PointSpec& p, const Poly& d_poly) {
    Poly m;
    for (const auto& [curve, mult] : p.mults) {
        if (ref.c_index && curve == *ref.c_index)
            throw InvalidScenario("point mults must not reference the refinement curve");
        Poly coeff;
        auto it = ch.n_input.find(curve);
        if (it != ch.n_input.end()) coeff += it->second;
        for (size_t i = 0; i < cell.support.size(); ++i)
            if (cell.support[i] == curve) coeff += cell.n_coeffs[i];
        m += coeff * mult;
    }
    if (p.offset) {
        m += *p.offset;
    } else if (!ref.sigma.empty()) {
        Rational total;
        for (const auto& [curve, mult] : p.mults) {
            auto it = ref.sigma.find(curve);
            if (it != ref.sigma.end()) total += it->second * mult;
        }
        if (!total.is_zero()) m -= (Poly::var_v() + d_poly) * total;
    }
    return m;
}

Poly chamber_d(const RefinementData& ref, const SurfaceChamber& ch) {
    if (!ref.c_index) return Poly(0);
    auto it = ch.n_input.find(*ref.c_index);
    return it == ch.n_input.end() ? Poly(0) : it->second;
}

}  // namespace

Rational f_point(const CurveLattice& lat, const RefinementData& ref, const PointSpec& p) {
    Rational total;
    for (size_t c = 0; c < ref.chambers.size(); ++c) {
        const auto& ch = ref.chambers[c];
        Poly d_poly = chamber_d(ref, ch);
        for (const auto& cell : ref.sweeps[c].cells) {
            Poly pc = cell_pc(lat, cell, ref.C);
            Poly m = point_integrand(ref, ch, cell, p, d_poly);
            Poly inner = integrate_strip(pc * m, cell.v_lo, cell.v_hi);
            total += integrate_interval(inner, cell.u_lo, cell.u_hi);
        }
    }
    return Rational(6) * total / ref.vol;
}

Rational s_point_base(const CurveLattice& lat, const RefinementData& ref) {
    Rational total;
    for (size_t c = 0; c < ref.chambers.size(); ++c) {
        for (const auto& cell : ref.sweeps[c].cells) {
            Poly pc = cell_pc(lat, cell, ref.C);
            Poly inner = integrate_strip(pc * pc, cell.v_lo, cell.v_hi);
            total += integrate_interval(inner, cell.u_lo, cell.u_hi);
        }
    }
    return Rational(3) * total / ref.vol;
}

Rational s_point(const CurveLattice& lat, const RefinementData& ref, const PointSpec& p) {
    return s_point_base(lat, ref) + f_point(lat, ref, p);
}

Rational delta_chain(const std::vector<DeltaLevel>& levels) {
    if (levels.empty()) throw InvalidScenario("delta_chain: no levels");
    Rational best;
    bool first = true;
    for (const auto& l : levels) {
        if (l.log_discrepancy.sign() <= 0 || l.s_value.sign() <= 0)
            throw InvalidScenario("delta_chain: A and S must be positive");
        Rational r = l.log_discrepancy / l.s_value;
        if (first || r < best) {
            best = r;
            first = false;
        }
    }
    return best;
}

std::vector<CheckResult> cross_checks(const CurveLattice& lat, const RefinementData& ref) {
    std::vector<CheckResult> out;
    auto add = [&](const std::string& name, bool pass, const std::string& detail = "") {
        out.push_back({name, pass, detail});
    };

    // d(P^2)/dv = -2 (P.C) inside every cell.
    bool deriv_ok = true;
    for (size_t c = 0; c < ref.chambers.size(); ++c)
        for (const auto& cell : ref.sweeps[c].cells) {
            Poly lhs = cell_psquare(lat, cell).derivative_v();
            Poly rhs = cell_pc(lat, cell, ref.C) * Rational(-2);
            if (lhs != rhs) deriv_ok = false;
        }
    add("dP2_dv_equals_minus_2PC", deriv_ok);

    // Per-u fiber identity: integral of (P.C) dv over [0, t(u)] = Q(u)^2 / 2,
    // as a polynomial identity per u-segment.
    bool fiber_ok = true;
    Rational pc_total;  // accumulates the double integral of (P.C)
    for (size_t c = 0; c < ref.chambers.size(); ++c) {
        const auto& ch = ref.chambers[c];
        const auto& sw = ref.sweeps[c];
        Poly q2 = lat.pair(ch.Q, ch.Q);
        for (size_t b = 0; b + 1 < sw.u_breaks.size(); ++b) {
            Poly fiber;
            for (const auto& cell : sw.cells) {
                if (cell.u_lo != sw.u_breaks[b]) continue;
                fiber += integrate_strip(cell_pc(lat, cell, ref.C), cell.v_lo, cell.v_hi);
            }
            if (fiber * Rational(2) != q2) fiber_ok = false;
            pc_total += integrate_interval(fiber, sw.u_breaks[b], sw.u_breaks[b + 1]);
        }
    }
    add("fiber_integral_equals_half_Q2", fiber_ok);

    // Boundary certificate at v = t(u) for the top cell of each u-segment.
    bool boundary_ok = true;
    for (size_t c = 0; c < ref.chambers.size(); ++c) {
        const auto& sw = ref.sweeps[c];
        for (size_t b = 0; b + 1 < sw.u_breaks.size(); ++b) {
            const SupportCell* top = nullptr;
            for (const auto& cell : sw.cells)
                if (cell.u_lo == sw.u_breaks[b] && cell.v_hi == sw.t.pieces()[b].f)
                    top = &cell;
            if (!top) continue;  // empty stack: t == 0 on this segment
            Poly psq = cell_psquare(lat, *top).subst_v(top->v_hi);
            Poly pc = cell_pc(lat, *top, ref.C).subst_v(top->v_hi);
            if (!psq.is_zero() && !pc.is_zero()) boundary_ok = false;
        }
    }
    add("boundary_certificate_at_t", boundary_ok);

    // Shape of d and d + t.
    add("d_convex", ref.d.is_convex());
    {
        // Assemble d + t on the union of breakpoints.
        std::vector<Piece> tp;
        for (const auto& sw : ref.sweeps)
            for (const auto& p : sw.t.pieces()) tp.push_back(p);
        PiecewiseFn t_all{std::move(tp)};
        add("d_plus_t_concave", (ref.d + t_all).is_concave());
    }

    // Volume slicing: when no negative part was carried along C itself,
    // the (P.C) mass is exactly vol / 6.
    bool d_zero = true;
    for (const auto& p : ref.d.pieces())
        if (!p.f.is_zero()) d_zero = false;
    if (d_zero)
        add("pc_mass_equals_vol_over_6", pc_total * Rational(6) == ref.vol,
            (pc_total * Rational(6)).str() + " vs " + ref.vol.str());

    // tau/(n+1) <= S <= n*tau/(n+1), n = 3.
    Rational tau = ref.tau();
    add("s_within_tau_bounds",
        tau / Rational(4) <= ref.s_value && ref.s_value <= tau * Rational(3, 4),
        "tau = " + tau.str() + ", S = " + ref.s_value.str());
    return out;
}

}  // namespace dk
