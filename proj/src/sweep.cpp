#include "deltakit/sweep.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace dk {

namespace {

ParamClass to_param(const DivClass& d) {
    ParamClass p(d.size());
    for (size_t i = 0; i < d.size(); ++i) p[i] = Poly(d[i]);
    return p;
}

// All per-support data is affine in (u, v) because the Gram block is
// constant; solved once and reused across the whole sweep.
struct CellTemplate {
    std::vector<int> support;
    std::vector<Poly> n;             // aligned with support
    ParamClass p;                    // Q - v*C - sum n_i C_i
    std::vector<Poly> constraints;   // must be >= 0 inside the cell
    Poly pc;                         // (P . C)
    Poly psq;                        // (P)^2
};

struct StackCell {
    const CellTemplate* tpl;
    Poly v_lo, v_hi;   // affine in u
};

struct Engine {
    const CurveLattice& lat;
    ParamClass Q;
    DivClass C;
    ParamClass Cp;
    std::map<std::vector<int>, CellTemplate> cache;

    Engine(const CurveLattice& l, const ParamClass& q, const DivClass& c)
        : lat(l), Q(q), C(c), Cp(to_param(c)) {}

    const CellTemplate& tpl(std::vector<int> support) {
        std::sort(support.begin(), support.end());
        auto it = cache.find(support);
        if (it != cache.end()) return it->second;
        CellTemplate t;
        t.support = support;
        std::vector<Poly> rhs(support.size());
        for (size_t i = 0; i < support.size(); ++i)
            rhs[i] = Poly(lat.pair_curve(C, support[i])) * Poly::var_v() * Rational(-1) +
                     lat.pair_curve(Q, support[i]);
        t.n = lat.solve_on_support(support, rhs);
        t.p = Q;
        for (size_t j = 0; j < t.p.size(); ++j) t.p[j] -= Poly(C[j]) * Poly::var_v();
        for (size_t i = 0; i < support.size(); ++i) t.p[support[i]] -= t.n[i];
        for (const auto& ni : t.n) t.constraints.push_back(ni);
        for (int d = 0; d < lat.size(); ++d) {
            if (!lat.is_active(d)) continue;
            if (std::find(support.begin(), support.end(), d) != support.end()) continue;
            t.constraints.push_back(lat.pair_curve(t.p, d));
        }
        t.pc = lat.pair(t.p, Cp);
        t.psq = lat.pair(t.p, t.p);
        return cache.emplace(std::move(support), std::move(t)).first->second;
    }

    struct VRange {
        std::optional<Rational> lo, hi;
        const Poly* hi_binding = nullptr;
    };

    // Validity interval of a template in v at fixed u; nullopt when a
    // v-free constraint already fails. (P . C) >= 0 rides along as an extra
    // constraint: it holds automatically for effective C and guards the
    // interior-positivity requirement otherwise.
    std::optional<VRange> range_at(const CellTemplate& t, const Rational& u) const {
        VRange r;
        auto consider = [&](const Poly& c) -> bool {
            Rational b = c.coeff(0, 1);
            Rational a = c.coeff(0, 0) + c.coeff(1, 0) * u;
            if (b.is_zero()) return a.sign() >= 0;
            Rational root = -a / b;
            if (b.sign() > 0) {
                if (!r.lo || root > *r.lo) r.lo = root;
            } else {
                if (!r.hi || root < *r.hi) {
                    r.hi = root;
                    r.hi_binding = &c;
                }
            }
            return true;
        };
        for (const auto& c : t.constraints)
            if (!consider(c)) return std::nullopt;
        if (!consider(t.pc)) return std::nullopt;
        return r;
    }

    // True when the template is a genuine Zariski chamber on some
    // v-interval (v_w, v_w + eps) at this u.
    bool valid_above(const CellTemplate& t, const Rational& u, const Rational& v_w) const {
        auto r = range_at(t, u);
        if (!r) return false;
        if (r->lo && *r->lo > v_w) return false;
        if (r->hi && !(*r->hi > v_w)) return false;
        return true;
    }

    // Successor support after the wall at (u, v_w): first try exact
    // wall-crossing moves (curves whose walls bind there enter; support
    // curves whose coefficients vanish there may leave), then fall back to
    // pointwise decompositions just above the wall. nullptr = v_w is t(u).
    const CellTemplate* find_next(const CellTemplate& cur, const Rational& u,
                                  const Rational& v_w) {
        std::vector<int> base, movable;
        for (size_t i = 0; i < cur.support.size(); ++i) {
            if (cur.n[i].eval(u, v_w).is_zero())
                movable.push_back(cur.support[i]);
            else
                base.push_back(cur.support[i]);
        }
        for (int d = 0; d < lat.size(); ++d) {
            if (!lat.is_active(d)) continue;
            if (std::find(cur.support.begin(), cur.support.end(), d) != cur.support.end())
                continue;
            if (lat.gram()[d][d].sign() >= 0) continue;
            if (lat.pair_curve(cur.p, d).eval(u, v_w).is_zero()) movable.push_back(d);
        }
        if (movable.size() <= 10) {
            for (unsigned mask = 0; mask < (1u << movable.size()); ++mask) {
                std::vector<int> cand = base;
                for (size_t i = 0; i < movable.size(); ++i)
                    if (mask & (1u << i)) cand.push_back(movable[i]);
                std::sort(cand.begin(), cand.end());
                if (cand == cur.support) continue;
                if (!lat.is_negative_definite(cand)) continue;
                const CellTemplate& t = tpl(cand);
                if (valid_above(t, u, v_w)) return &t;
            }
        }
        // Fallback: pointwise Zariski decomposition just above the wall,
        // shrinking the overshoot until it lands in the adjacent chamber.
        Rational delta(1);
        for (int halvings = 0; halvings < 200; ++halvings, delta /= Rational(2)) {
            Rational vp = v_w + delta;
            DivClass cls(C.size());
            for (size_t i = 0; i < C.size(); ++i)
                cls[i] = Q[i].eval(u, Rational(0)) - vp * C[i];
            try {
                ZariskiPair z = lat.zariski_decompose(cls);
                std::vector<int> supp;
                for (int s : z.support)
                    if (!z.negative[s].is_zero()) supp.push_back(s);
                if (supp == cur.support) continue;  // numeric edge; shrink
                const CellTemplate& t = tpl(supp);
                if (valid_above(t, u, v_w)) return &t;
            } catch (const NotPseudoeffective&) {
            }
        }
        return nullptr;  // no chamber above: v_w is the threshold
    }

    // The ordered v-stack of cells at one generic u. v-bounds are recorded
    // as affine forms in u (the wall lines), not just values at this u.
    std::vector<StackCell> stack_at(const Rational& u) {
        std::vector<StackCell> out;
        Rational v_cur(0);
        const CellTemplate* cur = &tpl({});
        Poly lo_form = Poly(0);
        for (int guard = 0; guard < 8 * lat.size() + 16; ++guard) {
            auto r = range_at(*cur, u);
            if (!r || (r->lo && *r->lo > v_cur))
                throw std::logic_error("sweep: current cell invalid at its own level");
            if (!r->hi) throw DegenerateFamily("sweep: threshold in v is unbounded");
            Rational wall = *r->hi;
            if (wall < v_cur) throw std::logic_error("sweep: wall below the current level");
            // Wall line solved for v as an affine form in u.
            const Poly& bind = *r->hi_binding;
            Rational bv = bind.coeff(0, 1);
            Poly hi_form = (bind - Poly(bv) * Poly::var_v()) / (-bv);
            if (wall > v_cur) {
                out.push_back({cur, lo_form, hi_form});
                lo_form = hi_form;
            }
            // Threshold certificate: volume exhausted, or (for a wall above
            // the base) interior positivity of (P . C) has run out.
            if (cur->psq.eval(u, wall).is_zero() ||
                (wall.sign() > 0 && cur->pc.eval(u, wall).is_zero()))
                return out;
            const CellTemplate* next = find_next(*cur, u, wall);
            if (!next) return out;
            cur = next;
            v_cur = wall;
        }
        throw std::logic_error("sweep: wall-crossing did not terminate");
    }

    // Verify a stack over [a, b]. Returns true when valid; otherwise
    // appends the rational u-values of the detected wall events.
    bool verify(const std::vector<StackCell>& stack, const Rational& a, const Rational& b,
                std::vector<Rational>& events) {
        auto event_of = [&](const Poly& f) {
            // f is affine in u; record its root when strictly inside (a, b).
            Rational cu = f.coeff(1, 0);
            if (cu.is_zero()) return;
            Rational root = -f.coeff(0, 0) / cu;
            if (a < root && root < b) events.push_back(root);
        };
        bool ok = true;
        auto check_nonneg = [&](const Poly& f) {
            if (f.eval(a, Rational(0)).sign() < 0 || f.eval(b, Rational(0)).sign() < 0) {
                ok = false;
                event_of(f);
            }
        };
        if (stack.empty()) {
            // Claim t == 0 across [a, b]: nothing above v = 0 at either end.
            const CellTemplate& t0 = tpl({});
            return !find_next(t0, a, Rational(0)) && !find_next(t0, b, Rational(0));
        }
        for (const auto& cell : stack) {
            check_nonneg(cell.v_hi - cell.v_lo);
            for (const Poly* c : constraint_list(*cell.tpl))
                for (const Poly* bound : {&cell.v_lo, &cell.v_hi}) {
                    Poly along = c->eval_v(Rational(0)) + c->coeff(0, 1) * *bound;
                    check_nonneg(along);
                }
        }
        // The top edge must stay the threshold across the interval: at its
        // endpoints, nothing may continue above the envelope.
        const auto& top = stack.back();
        Poly psq_edge = top.tpl->psq.subst_v(top.v_hi);
        Poly pc_edge = top.tpl->pc.subst_v(top.v_hi);
        if (psq_edge.is_zero() || pc_edge.is_zero()) return ok;  // certified envelope
        for (const Rational& u : {a, b}) {
            Rational v_top = top.v_hi.eval(u, Rational(0));
            if (find_next(*top.tpl, u, v_top)) {
                ok = false;
                // The envelope break is where a successor's entry wall meets
                // the current top edge; collect crossings of all template
                // walls with the top edge.
                for (const auto& [supp, t] : cache)
                    for (const Poly* c : constraint_list(t))
                        event_of(c->eval_v(Rational(0)) + c->coeff(0, 1) * top.v_hi);
            }
        }
        return ok;
    }

    static std::vector<const Poly*> constraint_list(const CellTemplate& t) {
        std::vector<const Poly*> out;
        for (const auto& c : t.constraints) out.push_back(&c);
        out.push_back(&t.pc);
        return out;
    }
};

struct Segment {
    Rational a, b;
    std::vector<StackCell> stack;
};

void subdivide(Engine& eng, const Rational& a, const Rational& b,
               std::vector<Segment>& out, int depth) {
    if (depth > 64) throw std::logic_error("sweep: subdivision did not converge");
    Rational u_mid = a + (b - a) / Rational(2);
    std::vector<StackCell> stack = eng.stack_at(u_mid);
    std::vector<Rational> events;
    if (eng.verify(stack, a, b, events)) {
        out.push_back({a, b, std::move(stack)});
        return;
    }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    std::vector<Rational> cuts;
    for (const auto& e : events)
        if (a < e && e < b) cuts.push_back(e);
    if (cuts.empty()) cuts.push_back(u_mid);  // no rational wall found; bisect
    Rational prev = a;
    for (const auto& c : cuts) {
        subdivide(eng, prev, c, out, depth + 1);
        prev = c;
    }
    subdivide(eng, prev, b, out, depth + 1);
}

bool same_stack(const std::vector<StackCell>& x, const std::vector<StackCell>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i].tpl != y[i].tpl) return false;
        if (!(x[i].v_lo == y[i].v_lo) || !(x[i].v_hi == y[i].v_hi)) return false;
    }
    return true;
}

}  // namespace

SweepResult sweep(const CurveLattice& lat, const ParamClass& Q,
                  const Rational& u0, const Rational& u1, const DivClass& C) {
    if (static_cast<int>(Q.size()) != lat.size() || static_cast<int>(C.size()) != lat.size())
        throw std::invalid_argument("sweep: dimension mismatch");
    if (!(u0 < u1)) throw std::invalid_argument("sweep: empty u-interval");
    for (const auto& q : Q)
        if (q.degree_v() != 0 || q.degree_u() > 1)
            throw std::invalid_argument("sweep: Q must be affine in u alone");
    for (const Rational& u : {u0, u1}) {
        DivClass q(lat.size());
        for (int i = 0; i < lat.size(); ++i) q[i] = Q[i].eval(u, Rational(0));
        if (!lat.is_nef(q)) throw NotNefInput("sweep: Q is not nef at u = " + u.str());
    }

    Engine eng(lat, Q, C);
    std::vector<Segment> segs;
    subdivide(eng, u0, u1, segs, 0);

    // Merge adjacent segments with identical stacks.
    std::vector<Segment> merged;
    for (auto& s : segs) {
        if (!merged.empty() && same_stack(merged.back().stack, s.stack) && merged.back().b == s.a)
            merged.back().b = s.b;
        else
            merged.push_back(std::move(s));
    }

    SweepResult res;
    std::vector<Piece> t_pieces;
    for (const auto& s : merged) {
        res.u_breaks.push_back(s.a);
        for (const auto& c : s.stack) {
            if (c.v_hi == c.v_lo) continue;  // zero-width cell
            SupportCell cell;
            cell.support = c.tpl->support;
            cell.n_coeffs = c.tpl->n;
            cell.p_class = c.tpl->p;
            cell.u_lo = s.a;
            cell.u_hi = s.b;
            cell.v_lo = c.v_lo;
            cell.v_hi = c.v_hi;
            res.cells.push_back(std::move(cell));
        }
        t_pieces.push_back({s.a, s.b, s.stack.empty() ? Poly(0) : s.stack.back().v_hi});
    }
    res.u_breaks.push_back(merged.back().b);
    res.t = PiecewiseFn(std::move(t_pieces));
    if (!res.t.is_continuous())
        throw DegenerateFamily("sweep: threshold t(u) is discontinuous");
    res.d = PiecewiseFn({{u0, u1, Poly(0)}});
    return res;
}

std::vector<const SupportCell*> SweepResult::stack(const Rational& a, const Rational& b) const {
    std::vector<const SupportCell*> out;
    for (const auto& c : cells)
        if (c.u_lo == a && c.u_hi == b) out.push_back(&c);
    return out;
}

Poly cell_pc(const CurveLattice& lat, const SupportCell& cell, const DivClass& C) {
    return lat.pair(cell.p_class, to_param(C));
}

Poly cell_psquare(const CurveLattice& lat, const SupportCell& cell) {
    return lat.pair(cell.p_class, cell.p_class);
}

}  // namespace dk
