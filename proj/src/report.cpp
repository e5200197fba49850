#include "deltakit/report.hpp"

#include "json.hpp"

#include <sstream>

namespace dk {

using json = nlohmann::ordered_json;

std::string report_json(const Report& rep) {
    json j;
    j["scenario"] = rep.scenario;
    json results = json::array();
    for (const auto& r : rep.results) {
        json rj;
        rj["task"] = r.task;
        rj["ok"] = r.ok;
        if (r.value) rj["value"] = r.value->str();
        if (r.expected) {
            rj["expected"] = r.expected->str();
            rj["matched"] = r.matched;
        }
        if (!r.error.empty()) rj["error"] = r.error;
        results.push_back(std::move(rj));
    }
    j["results"] = std::move(results);
    if (!rep.checks.empty()) {
        json checks = json::array();
        for (const auto& c : rep.checks) {
            json cj;
            cj["name"] = c.name;
            cj["pass"] = c.pass;
            if (!c.detail.empty()) cj["detail"] = c.detail;
            checks.push_back(std::move(cj));
        }
        j["checks"] = std::move(checks);
    }
    if (!rep.cells.empty()) {
        json cells = json::array();
        for (const auto& c : rep.cells) {
            json cj;
            cj["refinement"] = c.refinement;
            cj["u"] = {c.u_lo.str(), c.u_hi.str()};
            cj["v"] = {c.v_lo, c.v_hi};
            cj["support"] = c.support;
            cj["n"] = c.n_coeffs;
            cj["p_square"] = c.p_square;
            cj["p_dot_c"] = c.p_dot_c;
            cells.push_back(std::move(cj));
        }
        j["cells"] = std::move(cells);
    }
    j["ok"] = rep.clean();
    return j.dump(2) + "\n";
}

std::string report_markdown(const Report& rep) {
    std::ostringstream os;
    os << "# " << rep.scenario << "\n\n";
    os << "| task | value | expected | status |\n";
    os << "|---|---|---|---|\n";
    for (const auto& r : rep.results) {
        os << "| " << r.task << " | " << (r.value ? r.value->str() : "-") << " | "
           << (r.expected ? r.expected->str() : "-") << " | ";
        if (!r.ok)
            os << "error: " << r.error;
        else if (r.expected)
            os << (r.matched ? "match" : "MISMATCH");
        else
            os << "ok";
        os << " |\n";
    }
    if (!rep.checks.empty()) {
        os << "\n## Checks\n\n| check | verdict | detail |\n|---|---|---|\n";
        for (const auto& c : rep.checks)
            os << "| " << c.name << " | " << (c.pass ? "pass" : "FAIL") << " | " << c.detail
               << " |\n";
    }
    std::string current;
    for (const auto& c : rep.cells) {
        if (c.refinement != current) {
            current = c.refinement;
            os << "\n## Chamber table: " << current << "\n\n";
            os << "| u | v | support | N | P^2 | P.C |\n|---|---|---|---|---|---|\n";
        }
        os << "| [" << c.u_lo.str() << ", " << c.u_hi.str() << "] | [" << c.v_lo << ", "
           << c.v_hi << "] | " << (c.support.empty() ? "-" : c.support) << " | "
           << (c.n_coeffs.empty() ? "-" : c.n_coeffs) << " | " << c.p_square << " | "
           << c.p_dot_c << " |\n";
    }
    os << "\nresult: " << (rep.clean() ? "ok" : "FAILED") << "\n";
    return os.str();
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string report_csv(const Report& rep) {
    std::ostringstream os;
    os << "refinement,u_lo,u_hi,v_lo,v_hi,support,n_coeffs,p_square,p_dot_c\n";
    for (const auto& c : rep.cells)
        os << csv_quote(c.refinement) << ',' << c.u_lo.str() << ',' << c.u_hi.str() << ','
           << csv_quote(c.v_lo) << ',' << csv_quote(c.v_hi) << ',' << csv_quote(c.support)
           << ',' << csv_quote(c.n_coeffs) << ',' << csv_quote(c.p_square) << ','
           << csv_quote(c.p_dot_c) << '\n';
    return os.str();
}

}  // namespace dk
