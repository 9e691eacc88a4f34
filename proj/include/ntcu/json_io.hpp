#pragma once
// JSON records for the model types and the three report outputs (table, CSV, JSON).

#include <fstream>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "scenarios.hpp"

namespace ntcu::io {

using json = nlohmann::json;

inline json to_json(const Rational& q) { return to_string(q); }
inline Rational q_from(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    return parse_rational(j.get<std::string>());
}

inline json to_json(const Ext& e) { return e.str(); }
inline Ext ext_from(const json& j) {
    if (j.is_string() && j.get<std::string>() == "inf") return Ext::infinity();
    return Ext(q_from(j));
}

inline json nval_json(NVal v) { return v == kInf ? json("inf") : json(v); }
inline NVal nval_from(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInf;
        return std::stol(j.get<std::string>());
    }
    return j.get<NVal>();
}

inline json to_json(const PLFunction& f) {
    json pts = json::array();
    for (auto& b : f.points()) pts.push_back({to_json(b.t), to_json(b.v)});
    return {{"space", space_name(f.space())}, {"points", pts}, {"winding", f.winding()}};
}
inline PLFunction pl_from(const json& j) {
    Space s = parse_space(j.at("space").get<std::string>());
    std::vector<Breakpoint> pts;
    for (auto& p : j.at("points")) pts.push_back({q_from(p.at(0)), q_from(p.at(1))});
    return PLFunction(s, pts, j.value("winding", 0L));
}

inline json to_json(const OpenSet& u) {
    json arcs = json::array();
    if (u.is_full() && u.arcs().empty()) arcs.push_back({"0", "1"});
    for (auto& a : u.arcs()) arcs.push_back({to_json(a.a), to_json(a.b)});
    return {{"space", space_name(u.space())}, {"arcs", arcs}, {"full", u.is_full()}};
}
inline OpenSet open_from(const json& j) {
    Space s = parse_space(j.at("space").get<std::string>());
    if (j.value("full", false)) return OpenSet::whole(s);
    OpenSet u = OpenSet::empty(s);
    for (auto& a : j.at("arcs")) u = u.united(OpenSet::arc(s, q_from(a.at(0)), q_from(a.at(1))));
    return u;
}

inline json to_json(const LscFunction& f) {
    json cuts = json::array(), pieces = json::array(), at = json::array();
    for (auto& c : f.cuts()) cuts.push_back(to_json(c));
    for (auto v : f.pieces()) pieces.push_back(nval_json(v));
    for (auto v : f.at()) at.push_back(nval_json(v));
    return {{"space", space_name(f.space())}, {"cuts", cuts}, {"pieces", pieces}, {"at", at}};
}
inline LscFunction lsc_from(const json& j) {
    Space s = parse_space(j.at("space").get<std::string>());
    std::vector<Rational> cuts;
    std::vector<NVal> pieces, at;
    for (auto& c : j.at("cuts")) cuts.push_back(q_from(c));
    for (auto& v : j.at("pieces")) pieces.push_back(nval_from(v));
    for (auto& v : j.at("at")) at.push_back(nval_from(v));
    return LscFunction(s, cuts, pieces, at);
}

inline json to_json(const K0Image& k) {
    switch (k.kind) {
        case K0Kind::AllConstants: return "constants";
        case K0Kind::Zero: return "zero";
        default: return json{{"lattice", to_json(k.step)}};
    }
}
inline K0Image k0_from(const json& j) {
    if (j.is_object()) return K0Image::lattice(q_from(j.at("lattice")));
    auto s = j.get<std::string>();
    if (s == "constants") return K0Image::all();
    if (s == "zero") return K0Image::zero();
    throw std::invalid_argument("unknown K0 image: " + s);
}

inline json to_json(const std::vector<Block>& bs) {
    json arr = json::array();
    for (auto& b : bs)
        arr.push_back({{"base", space_name(b.base)},
                       {"size", b.size.get_str()},
                       {"k1", b.k1 == K1Tag::Z ? "Z" : "0"},
                       {"k0image", to_json(b.k0)}});
    return {{"blocks", arr}};
}
inline std::vector<Block> blocks_from(const json& j) {
    std::vector<Block> out;
    for (auto& b : j.at("blocks")) {
        mpz_class size(b.at("size").is_string() ? b.at("size").get<std::string>() : std::to_string(b.at("size").get<long>()));
        out.push_back(make_block(parse_space(b.at("base").get<std::string>()), size,
                                 b.contains("k0image") ? k0_from(b.at("k0image")) : K0Image::all()));
    }
    return out;
}

inline json to_json(const UnitaryField& u) {
    json e = json::array();
    for (auto& x : u.entries) e.push_back({{"phase", to_json(x.f)}, {"mult", x.mult}});
    return {{"space", space_name(u.base)}, {"entries", e}};
}
inline UnitaryField field_from(const json& j) {
    UnitaryField u;
    bool have_space = j.contains("space");
    if (have_space) u.base = parse_space(j.at("space").get<std::string>());
    for (auto& e : j.at("entries")) {
        auto f = pl_from(e.at("phase"));
        if (!have_space) u.base = f.space(), have_space = true;
        if (f.space() != u.base) throw TypeError("field entries over different spaces");
        u.add(f, e.value("mult", 1L));
    }
    if (u.entries.empty()) throw std::invalid_argument("empty unitary field");
    return u;
}

inline json to_json(const EigenPattern& p) {
    json maps = json::array();
    for (auto& m : p.maps) {
        json e{{"kind", map_kind_name(m.kind)}, {"mult", m.mult}};
        if (m.kind != MapKind::Const) e["phi"] = to_json(m.phi);
        if (m.kind == MapKind::Winding) e["ell"] = m.ell;
        if (m.kind != MapKind::PL) e["c"] = to_json(m.c);
        maps.push_back(e);
    }
    return {{"X", space_name(p.X)}, {"Y", space_name(p.Y)}, {"maps", maps}};
}
inline EigenPattern pattern_from(const json& j) {
    EigenPattern p;
    p.X = parse_space(j.value("X", std::string("circle")));
    p.Y = parse_space(j.value("Y", std::string("interval")));
    for (auto& e : j.at("maps")) {
        PatternMap m;
        auto k = e.at("kind").get<std::string>();
        if (k == "pl") m.kind = MapKind::PL;
        else if (k == "winding") m.kind = MapKind::Winding;
        else if (k == "const") m.kind = MapKind::Const;
        else throw std::invalid_argument("unknown map kind: " + k);
        if (e.contains("phi")) m.phi = pl_from(e.at("phi"));
        m.ell = e.value("ell", 1L);
        if (e.contains("c")) m.c = q_from(e.at("c"));
        m.mult = e.value("mult", 1L);
        p.maps.push_back(m);
    }
    check_pattern(p);
    return p;
}

// {"generator": field} or {"trivial": true, "space", "size"}
inline json to_json(const NTBasis& b) {
    json j{{"space", space_name(b.base)}, {"size", b.size}};
    if (b.trivial) j["trivial"] = true;
    else j["generator"] = to_json(b.c1);
    return j;
}
inline NTBasis basis_from(const json& j) {
    if (j.value("trivial", false))
        return trivial_basis(parse_space(j.at("space").get<std::string>()), j.value("size", 1L));
    auto u = field_from(j.at("generator"));
    NTBasis b{u.base, j.value("size", u.total()), false, u};
    check_basis(b);
    return b;
}

inline json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

// ---------------------------------------------------------------- reports

inline json to_json(const FiberReport& F) {
    json corners = json::array(), pairs = json::array();
    for (auto& [n, g] : F.corners) corners.push_back({{"corner", n}, {"group", g}});
    for (auto& p : F.pairs) pairs.push_back({{"pair", p.name}, {"distance", to_json(p.distance)}});
    return {{"K", ktype_name(F.k)}, {"metric", fiber_metric_name(F.metric)}, {"x", F.x}, {"y", F.y},
            {"corners", corners}, {"pairs", pairs}, {"max", to_json(F.max)}, {"lower_bound", F.lower_bound}};
}

inline json to_json(const ScenarioReport& R) {
    json rows = json::array(), checks = json::array();
    for (auto& q : R.rows)
        rows.push_back({{"quantity", q.name}, {"stage", q.stage}, {"value", to_json(q.value)}, {"decimal", q.value.dbl()},
                        {"exact", q.exact}, {"source", q.source}, {"note", q.note}});
    for (auto& c : R.checks) checks.push_back({{"assertion", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    json fibers = json::array();
    for (auto& f : R.fibers) fibers.push_back(to_json(f));
    return {{"scenario", R.scenario}, {"quantities", rows}, {"assertions", checks}, {"witnesses", R.witnesses},
            {"notes", R.notes}, {"fibers", fibers}, {"all_pass", R.all_pass()}};
}

inline std::string decimal(const Ext& e) {
    if (e.inf) return "inf";
    std::ostringstream s;
    s << std::setprecision(12) << e.dbl();
    return s.str();
}

inline void print_table(std::ostream& os, const ScenarioReport& R) {
    size_t w = 8;
    for (auto& q : R.rows) w = std::max(w, q.name.size());
    os << "scenario: " << R.scenario << "\n";
    os << std::left << std::setw((int)w) << "quantity" << "  " << std::setw(5) << "stage" << "  " << std::setw(14)
       << "exact" << "  " << std::setw(14) << "decimal" << "  source\n";
    for (auto& q : R.rows) {
        std::string v = q.value.str() + (q.exact ? "" : " (~)");
        os << std::setw((int)w) << q.name << "  " << std::setw(5) << q.stage << "  " << std::setw(14) << v << "  "
           << std::setw(14) << decimal(q.value) << "  " << q.source;
        if (!q.note.empty()) os << "  [" << q.note << "]";
        os << "\n";
    }
    for (auto& f : R.fibers) {
        os << "fiber " << ktype_name(f.k) << "/" << fiber_metric_name(f.metric) << " at x=" << f.x << " y=" << f.y
           << (f.lower_bound ? " (lower bound)" : "") << "\n";
        for (auto& [n, g] : f.corners) os << "  corner " << n << " = " << g << "\n";
        for (auto& p : f.pairs) os << "  " << p.name << ": " << p.distance.str() << "\n";
        os << "  max = " << f.max.str() << "\n";
    }
    for (auto& w2 : R.witnesses) os << "witness: " << w2 << "\n";
    for (auto& n : R.notes) os << "note: " << n << "\n";
    for (auto& c : R.checks)
        os << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
    return o + "\"";
}

inline void write_csv(std::ostream& os, const ScenarioReport& R) {
    os << "quantity,stage,exact,decimal,source\n";
    for (auto& q : R.rows)
        os << csv_field(q.name) << "," << q.stage << "," << csv_field(q.value.str()) << "," << decimal(q.value) << ","
           << q.source << "\n";
}

inline void write_csv(const std::string& path, const ScenarioReport& R) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, R);
}

inline void write_json(const std::string& path, const ScenarioReport& R) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(R).dump(2) << "\n";
}

}  // namespace ntcu::io
