#include "deltakit/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace dk {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw InvalidScenario(where + ": " + what);
}

const json& need(const json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, "missing field '" + key + "'");
    return *it;
}

Rational rat(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "rationals must be strings like \"3/4\"");
    try {
        return Rational::parse(j.get<std::string>());
    } catch (const std::exception& e) {
        fail(where, std::string("bad rational: ") + e.what());
    }
}

Poly poly(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "polynomials must be strings");
    try {
        return Poly::parse(j.get<std::string>());
    } catch (const std::exception& e) {
        fail(where, std::string("bad polynomial: ") + e.what());
    }
}

std::pair<Rational, Rational> range(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) fail(where, "range must be [lo, hi]");
    Rational lo = rat(j[0], where), hi = rat(j[1], where);
    if (!(lo < hi)) fail(where, "range must satisfy lo < hi");
    return {lo, hi};
}

void check_contiguous(const std::vector<std::pair<Rational, Rational>>& rs,
                      const std::string& where) {
    for (size_t i = 0; i + 1 < rs.size(); ++i)
        if (rs[i].second != rs[i + 1].first)
            fail(where, "chamber ranges must abut: gap after " + rs[i].second.str());
}

int curve_index(const CurveLattice& lat, const std::string& name, const std::string& where) {
    auto idx = lat.find(name);
    if (!idx) fail(where, "unknown curve '" + name + "'");
    return *idx;
}

ThreefoldSection parse_threefold(const json& j) {
    ThreefoldSection t;
    t.divisor = need(j, "divisor", "threefold").get<std::string>();
    t.A = rat(need(j, "A", "threefold"), "threefold.A");
    if (t.A.sign() <= 0) fail("threefold.A", "log discrepancy must be positive");

    if (j.contains("basis")) {
        ThreefoldModel m;
        for (const auto& b : need(j, "basis", "threefold")) m.basis.push_back(b.get<std::string>());
        size_t n = m.basis.size();
        m.trilinear.assign(n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n)));
        auto idx = [&](const json& name) -> size_t {
            for (size_t i = 0; i < n; ++i)
                if (m.basis[i] == name.get<std::string>()) return i;
            fail("threefold.trilinear", "unknown basis element '" + name.get<std::string>() + "'");
        };
        for (const auto& entry : need(j, "trilinear", "threefold")) {
            if (!entry.is_array() || entry.size() != 4)
                fail("threefold.trilinear", "entries are [i, j, k, value]");
            size_t a = idx(entry[0]), b = idx(entry[1]), c = idx(entry[2]);
            Rational val = rat(entry[3], "threefold.trilinear");
            size_t ids[3] = {a, b, c};
            std::sort(std::begin(ids), std::end(ids));
            do {
                m.trilinear[ids[0]][ids[1]][ids[2]] = val;
            } while (std::next_permutation(std::begin(ids), std::end(ids)));
        }
        m.validate();
        t.model = std::move(m);
    }

    std::vector<std::pair<Rational, Rational>> rs;
    for (const auto& cj : need(j, "chambers", "threefold")) {
        Chamber3 ch;
        std::tie(ch.lo, ch.hi) = range(need(cj, "range", "threefold.chambers"),
                                       "threefold.chambers.range");
        if (cj.contains("class")) {
            std::vector<Poly> cls;
            for (const auto& p : cj["class"]) cls.push_back(poly(p, "threefold.chambers.class"));
            ch.p3_class = std::move(cls);
        }
        if (cj.contains("vol")) ch.vol_poly = poly(cj["vol"], "threefold.chambers.vol");
        if (!ch.p3_class && !ch.vol_poly)
            fail("threefold.chambers", "chamber needs 'class' or 'vol'");
        rs.emplace_back(ch.lo, ch.hi);
        t.chambers.push_back(std::move(ch));
    }
    check_contiguous(rs, "threefold.chambers");
    return t;
}

SurfaceSection parse_surface(const json& j) {
    std::vector<std::string> names;
    std::vector<bool> active;
    for (const auto& cj : need(j, "curves", "surface")) {
        names.push_back(need(cj, "name", "surface.curves").get<std::string>());
        active.push_back(need(cj, "active", "surface.curves").get<bool>());
    }
    std::vector<std::vector<Rational>> gram;
    for (const auto& row : need(j, "gram", "surface")) {
        std::vector<Rational> r;
        for (const auto& e : row) r.push_back(rat(e, "surface.gram"));
        gram.push_back(std::move(r));
    }
    std::optional<CurveLattice> lat;
    try {
        lat.emplace(std::move(names), std::move(active), std::move(gram));
    } catch (const std::exception& e) {
        fail("surface", e.what());
    }

    std::vector<SurfaceChamber> chambers;
    std::vector<std::pair<Rational, Rational>> rs;
    for (const auto& cj : need(j, "chambers", "surface")) {
        SurfaceChamber ch;
        std::tie(ch.lo, ch.hi) =
            range(need(cj, "range", "surface.chambers"), "surface.chambers.range");
        for (const auto& p : need(cj, "Q", "surface.chambers"))
            ch.Q.push_back(poly(p, "surface.chambers.Q"));
        if (static_cast<int>(ch.Q.size()) != lat->size())
            fail("surface.chambers.Q", "wrong number of coefficients");
        if (cj.contains("N"))
            for (const auto& [name, p] : cj["N"].items())
                ch.n_input[curve_index(*lat, name, "surface.chambers.N")] =
                    poly(p, "surface.chambers.N");
        rs.emplace_back(ch.lo, ch.hi);
        chambers.push_back(std::move(ch));
    }
    check_contiguous(rs, "surface.chambers");
    return {std::move(*lat), std::move(chambers)};
}

ScenarioRefinement parse_refinement(const json& j, const CurveLattice& lat) {
    ScenarioRefinement r;
    r.name = need(j, "name", "refinements").get<std::string>();
    const std::string where = "refinements." + r.name;
    r.A = rat(need(j, "A", where), where + ".A");
    if (r.A.sign() <= 0) fail(where + ".A", "log discrepancy must be positive");

    r.C.assign(lat.size(), Rational(0));
    if (j.contains("curve") == j.contains("class"))
        fail(where, "give exactly one of 'curve' / 'class'");
    if (j.contains("curve")) {
        int c = curve_index(lat, j["curve"].get<std::string>(), where);
        r.c_index = c;
        r.C[c] = Rational(1);
    } else {
        for (const auto& [name, coef] : j["class"].items())
            r.C[curve_index(lat, name, where + ".class")] = rat(coef, where + ".class");
    }

    if (j.contains("sigma"))
        for (const auto& [name, coef] : j["sigma"].items())
            r.sigma[curve_index(lat, name, where + ".sigma")] = rat(coef, where + ".sigma");

    if (j.contains("points"))
        for (const auto& pj : j["points"]) {
            PointSpec p;
            p.name = need(pj, "name", where + ".points").get<std::string>();
            if (pj.contains("A")) p.A = rat(pj["A"], where + ".points.A");
            if (p.A.sign() <= 0) fail(where + ".points", "A must be positive");
            for (const auto& [name, m] : need(pj, "mults", where + ".points").items())
                p.mults[curve_index(lat, name, where + ".points.mults")] =
                    rat(m, where + ".points.mults");
            if (pj.contains("offset")) p.offset = poly(pj["offset"], where + ".points.offset");
            r.points.push_back(std::move(p));
        }
    return r;
}

}  // namespace

Rational Scenario::normalizer() const {
    if (vol) return *vol;
    if (threefold) {
        auto fam = vol_family(threefold->model, threefold->chambers);
        return fam.eval(fam.lo());
    }
    throw InvalidScenario("scenario: no 'vol' and no threefold to derive it from");
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw InvalidScenario(std::string("scenario: malformed JSON: ") + e.what());
    }
    Scenario sc;
    sc.name = need(j, "name", "scenario").get<std::string>();
    if (j.contains("description")) sc.description = j["description"].get<std::string>();
    if (j.contains("threefold")) sc.threefold = parse_threefold(j["threefold"]);
    if (j.contains("surface")) sc.surface = parse_surface(j["surface"]);
    if (j.contains("vol")) sc.vol = rat(j["vol"], "scenario.vol");

    if (j.contains("refinements")) {
        if (!sc.surface) fail("refinements", "refinements need a surface");
        for (const auto& rj : j["refinements"]) {
            auto r = parse_refinement(rj, sc.surface->lattice);
            for (const auto& prev : sc.refinements)
                if (prev.name == r.name) fail("refinements", "duplicate name '" + r.name + "'");
            sc.refinements.push_back(std::move(r));
        }
    }
    if (j.contains("tasks"))
        for (const auto& t : j["tasks"]) sc.tasks.push_back(t.get<std::string>());
    if (j.contains("expected"))
        for (const auto& [k, v] : j["expected"].items())
            sc.expected[k] = rat(v, "expected." + k);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidScenario("scenario: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    if (!sc.description.empty()) j["description"] = sc.description;
    if (sc.threefold) {
        const auto& t = *sc.threefold;
        json tj;
        tj["divisor"] = t.divisor;
        tj["A"] = t.A.str();
        if (t.model) {
            tj["basis"] = t.model->basis;
            json tri = json::array();
            size_t n = t.model->basis.size();
            for (size_t a = 0; a < n; ++a)
                for (size_t b = a; b < n; ++b)
                    for (size_t c = b; c < n; ++c)
                        if (!t.model->trilinear[a][b][c].is_zero())
                            tri.push_back({t.model->basis[a], t.model->basis[b],
                                           t.model->basis[c],
                                           t.model->trilinear[a][b][c].str()});
            tj["trilinear"] = std::move(tri);
        }
        json chs = json::array();
        for (const auto& ch : t.chambers) {
            json cj;
            cj["range"] = {ch.lo.str(), ch.hi.str()};
            if (ch.p3_class) {
                json cls = json::array();
                for (const auto& p : *ch.p3_class) cls.push_back(p.str());
                cj["class"] = std::move(cls);
            }
            if (ch.vol_poly) cj["vol"] = ch.vol_poly->str();
            chs.push_back(std::move(cj));
        }
        tj["chambers"] = std::move(chs);
        j["threefold"] = std::move(tj);
    }
    if (sc.surface) {
        const auto& lat = sc.surface->lattice;
        json sj;
        json curves = json::array();
        for (int i = 0; i < lat.size(); ++i)
            curves.push_back({{"name", lat.name(i)}, {"active", lat.is_active(i)}});
        sj["curves"] = std::move(curves);
        json gram = json::array();
        for (const auto& row : lat.gram()) {
            json r = json::array();
            for (const auto& e : row) r.push_back(e.str());
            gram.push_back(std::move(r));
        }
        sj["gram"] = std::move(gram);
        json chs = json::array();
        for (const auto& ch : sc.surface->chambers) {
            json cj;
            cj["range"] = {ch.lo.str(), ch.hi.str()};
            json q = json::array();
            for (const auto& p : ch.Q) q.push_back(p.str());
            cj["Q"] = std::move(q);
            if (!ch.n_input.empty()) {
                json nj;
                for (const auto& [k, p] : ch.n_input) nj[lat.name(k)] = p.str();
                cj["N"] = std::move(nj);
            }
            chs.push_back(std::move(cj));
        }
        sj["chambers"] = std::move(chs);
        j["surface"] = std::move(sj);
    }
    if (sc.vol) j["vol"] = sc.vol->str();
    if (!sc.refinements.empty()) {
        const auto& lat = sc.surface->lattice;
        json refs = json::array();
        for (const auto& r : sc.refinements) {
            json rj;
            rj["name"] = r.name;
            if (r.c_index) {
                rj["curve"] = lat.name(*r.c_index);
            } else {
                json cls;
                for (int i = 0; i < lat.size(); ++i)
                    if (!r.C[i].is_zero()) cls[lat.name(i)] = r.C[i].str();
                rj["class"] = std::move(cls);
            }
            rj["A"] = r.A.str();
            if (!r.sigma.empty()) {
                json sg;
                for (const auto& [k, v] : r.sigma) sg[lat.name(k)] = v.str();
                rj["sigma"] = std::move(sg);
            }
            if (!r.points.empty()) {
                json pts = json::array();
                for (const auto& p : r.points) {
                    json pj;
                    pj["name"] = p.name;
                    pj["A"] = p.A.str();
                    json m;
                    for (const auto& [k, v] : p.mults) m[lat.name(k)] = v.str();
                    pj["mults"] = std::move(m);
                    if (p.offset) pj["offset"] = p.offset->str();
                    pts.push_back(std::move(pj));
                }
                rj["points"] = std::move(pts);
            }
            refs.push_back(std::move(rj));
        }
        j["refinements"] = std::move(refs);
    }
    if (!sc.tasks.empty()) j["tasks"] = sc.tasks;
    if (!sc.expected.empty()) {
        json e;
        for (const auto& [k, v] : sc.expected) e[k] = v.str();
        j["expected"] = std::move(e);
    }
    return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> default_tasks(const Scenario& sc) {
    std::vector<std::string> ts;
    if (sc.threefold) ts.push_back("s_divisor");
    for (const auto& r : sc.refinements) {
        ts.push_back("s_curve:" + r.name);
        for (const auto& p : r.points) {
            ts.push_back("f_point:" + r.name + ":" + p.name);
            ts.push_back("s_point:" + r.name + ":" + p.name);
        }
    }
    if (sc.threefold || !sc.refinements.empty()) ts.push_back("delta");
    return ts;
}

struct Workspace {
    const Scenario& sc;
    std::optional<PiecewiseFn> vol;
    std::map<std::string, RefinementData> refs;

    explicit Workspace(const Scenario& s) : sc(s) {}

    const PiecewiseFn& vol_fam() {
        if (!vol) {
            if (!sc.threefold) throw InvalidScenario("task needs a threefold section");
            vol = vol_family(sc.threefold->model, sc.threefold->chambers);
        }
        return *vol;
    }

    const ScenarioRefinement& spec(const std::string& name) const {
        for (const auto& r : sc.refinements)
            if (r.name == name) return r;
        throw InvalidScenario("unknown refinement '" + name + "'");
    }

    const RefinementData& refinement(const std::string& name) {
        auto it = refs.find(name);
        if (it != refs.end()) return it->second;
        if (!sc.surface) throw InvalidScenario("task needs a surface section");
        const auto& r = spec(name);
        RefinementData data = run_refinement(sc.surface->lattice, sc.surface->chambers, r.C,
                                             r.c_index, r.sigma, sc.normalizer());
        return refs.emplace(name, std::move(data)).first->second;
    }

    const PointSpec& point(const ScenarioRefinement& r, const std::string& name) const {
        for (const auto& p : r.points)
            if (p.name == name) return p;
        throw InvalidScenario("unknown point '" + name + "' in refinement '" + r.name + "'");
    }
};

Rational eval_task(Workspace& ws, const std::string& task) {
    const Scenario& sc = ws.sc;
    auto split = [&](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(item);
        return parts;
    };
    auto parts = split(task);
    if (parts.empty()) throw InvalidScenario("empty task");

    if (parts[0] == "s_divisor" && parts.size() == 1) return s_divisor(ws.vol_fam());
    if (parts[0] == "s_curve" && parts.size() == 2) return ws.refinement(parts[1]).s_value;
    if ((parts[0] == "f_point" || parts[0] == "s_point") && parts.size() == 3) {
        const auto& r = ws.spec(parts[1]);
        const auto& ref = ws.refinement(parts[1]);
        const auto& p = ws.point(r, parts[2]);
        const auto& lat = sc.surface->lattice;
        return parts[0] == "f_point" ? f_point(lat, ref, p) : s_point(lat, ref, p);
    }
    if (parts[0] == "delta" && parts.size() == 1) {
        std::vector<DeltaLevel> levels;
        if (sc.threefold)
            levels.push_back({sc.threefold->divisor, sc.threefold->A, s_divisor(ws.vol_fam())});
        for (const auto& r : sc.refinements) {
            const auto& ref = ws.refinement(r.name);
            levels.push_back({r.name, r.A, ref.s_value});
            for (const auto& p : r.points)
                levels.push_back({r.name + ":" + p.name, p.A,
                                  s_point(sc.surface->lattice, ref, p)});
        }
        return delta_chain(levels);
    }
    throw InvalidScenario("unknown task '" + task + "'");
}

}  // namespace

std::vector<CheckResult> oracle_audit(const CurveLattice& lat, const RefinementData& ref,
                                      int samples) {
    std::vector<CheckResult> out;
    std::mt19937 rng(0x5eed1234u);
    // Small denominators keep the exact arithmetic cheap while still
    // sampling interior points away from the cell walls.
    std::uniform_int_distribution<long> frac(1, 63);
    auto rand_in = [&](const Rational& lo, const Rational& hi) {
        return lo + (hi - lo) * Rational(frac(rng), 64);
    };
    for (size_t c = 0; c < ref.sweeps.size(); ++c) {
        const auto& sw = ref.sweeps[c];
        const auto& Q = ref.chambers[c].Q;
        int bad = 0, done = 0;
        if (!sw.cells.empty()) {
            std::uniform_int_distribution<size_t> pick(0, sw.cells.size() - 1);
            for (int i = 0; i < samples; ++i) {
                const auto& cell = sw.cells[pick(rng)];
                Rational u = rand_in(cell.u_lo, cell.u_hi);
                Rational vlo = cell.v_lo.eval(u, Rational(0));
                Rational vhi = cell.v_hi.eval(u, Rational(0));
                if (!(vlo < vhi)) continue;
                Rational v = rand_in(vlo, vhi);
                DivClass cls(lat.size());
                for (int k = 0; k < lat.size(); ++k)
                    cls[k] = Q[k].eval(u, Rational(0)) - v * ref.C[k];
                ++done;
                try {
                    auto z = lat.zariski_decompose(cls);
                    auto zo = lat.zariski_decompose_exhaustive(cls);
                    bool ok = z.positive == zo.positive && z.negative == zo.negative;
                    for (int k = 0; ok && k < lat.size(); ++k)
                        if (cell.p_class[k].eval(u, v) != z.positive[k]) ok = false;
                    if (!ok) ++bad;
                } catch (const std::exception&) {
                    ++bad;
                }
            }
        }
        std::ostringstream detail;
        detail << done << " samples, " << bad << " disagreements";
        out.push_back({"oracle:chamber" + std::to_string(c), bad == 0, detail.str()});
    }
    return out;
}

Report run(const Scenario& sc, const RunOptions& opt) {
    Report rep;
    rep.scenario = sc.name;
    Workspace ws(sc);

    std::vector<std::string> tasks = !opt.tasks.empty()
                                         ? opt.tasks
                                         : (!sc.tasks.empty() ? sc.tasks : default_tasks(sc));
    for (const auto& task : tasks) {
        TaskResult tr;
        tr.task = task;
        try {
            tr.value = eval_task(ws, task);
            tr.ok = true;
        } catch (const std::logic_error&) {
            throw;  // internal invariant violations abort the run
        } catch (const std::exception& e) {
            tr.error = e.what();
            rep.any_error = true;
        }
        auto exp = sc.expected.find(task);
        if (exp != sc.expected.end()) {
            tr.expected = exp->second;
            tr.matched = tr.ok && *tr.value == exp->second;
            if (!tr.matched) rep.any_mismatch = true;
        }
        rep.results.push_back(std::move(tr));
    }

    // Chamber tables for every refinement the tasks touched.
    for (const auto& r : sc.refinements) {
        auto it = ws.refs.find(r.name);
        if (it == ws.refs.end()) continue;
        const auto& lat = sc.surface->lattice;
        for (const auto& sw : it->second.sweeps)
            for (const auto& cell : sw.cells) {
                CellRow row;
                row.refinement = r.name;
                row.u_lo = cell.u_lo;
                row.u_hi = cell.u_hi;
                row.v_lo = cell.v_lo.str();
                row.v_hi = cell.v_hi.str();
                std::ostringstream supp, ncs;
                for (size_t i = 0; i < cell.support.size(); ++i) {
                    supp << (i ? " " : "") << lat.name(cell.support[i]);
                    ncs << (i ? ", " : "") << lat.name(cell.support[i]) << " = "
                        << cell.n_coeffs[i].str();
                }
                row.support = supp.str();
                row.n_coeffs = ncs.str();
                row.p_square = cell_psquare(lat, cell).str();
                row.p_dot_c = cell_pc(lat, cell, it->second.C).str();
                rep.cells.push_back(std::move(row));
            }
    }

    if (opt.check) {
        for (const auto& r : sc.refinements) {
            auto it = ws.refs.find(r.name);
            if (it == ws.refs.end()) continue;
            for (auto& c : cross_checks(sc.surface->lattice, it->second)) {
                c.name = r.name + ":" + c.name;
                rep.checks.push_back(std::move(c));
            }
        }
        if (sc.threefold) {
            try {
                const auto& vol = ws.vol_fam();
                Rational s = s_divisor(vol);
                Rational b = slice_barycenter(vol);
                rep.checks.push_back({"threefold:barycenter_equals_s_divisor", b == s,
                                      b.str() + " vs " + s.str()});
                Rational tau = vol.hi();
                rep.checks.push_back({"threefold:s_within_tau_bounds",
                                      bounds_ok(Rational(0), tau, s, 4),
                                      "tau = " + tau.str() + ", S = " + s.str()});
            } catch (const std::exception& e) {
                rep.checks.push_back({"threefold:volume_family", false, e.what()});
            }
        }
    }
    if (opt.oracle) {
        for (const auto& r : sc.refinements) {
            auto it = ws.refs.find(r.name);
            if (it == ws.refs.end()) continue;
            for (auto& c :
                 oracle_audit(sc.surface->lattice, it->second, opt.oracle_samples)) {
                c.name = r.name + ":" + c.name;
                rep.checks.push_back(std::move(c));
            }
        }
    }
    for (const auto& c : rep.checks)
        if (!c.pass) rep.any_mismatch = true;
    return rep;
}

}  // namespace dk
