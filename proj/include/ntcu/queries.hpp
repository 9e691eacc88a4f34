#pragma once
// The metric and determinant queries behind the command-line tool, as reports.

#include <sstream>

#include "json_io.hpp"

namespace ntcu::io {

inline K0Image pattern_k0(const json& j) { return j.contains("k0") ? k0_from(j.at("k0")) : K0Image::all(); }

inline ScenarioReport query_dcu(const std::string& a, const std::string& b) {
    auto P = pattern_from(read_file(a)), Qp = pattern_from(read_file(b));
    auto r = d_cu(P, Qp);
    ScenarioReport R;
    R.scenario = "metric dcu";
    R.add("d_cu", 0, Ext(r.value), "derived", r.exact, r.method);
    if (!r.exact) R.add("d_cu upper bound", 0, Ext(r.upper), "info");
    R.witnesses.push_back("sup attained at y = " + to_string(r.witness_y));
    R.check("d_cu computed exactly", r.exact);
    return R;
}

inline ScenarioReport query_frakd(const std::string& a, const std::string& b, const std::string& ca, const std::string& cb) {
    auto ja = read_file(a), jb = read_file(b);
    NTMorphism f{pattern_from(ja), ja.value("src_size", 1L), pattern_k0(ja)};
    NTMorphism g{pattern_from(jb), jb.value("src_size", 1L), pattern_k0(jb)};
    auto C = basis_from(read_file(ca)), D = basis_from(read_file(cb));
    auto r = frak_d(f, g, C, D);
    ScenarioReport R;
    R.scenario = "metric frakd";
    R.add("d(H)", 0, Ext(r.dH), "derived", true, "trace-space distance of the patterns");
    R.add("d_R", 0, Ext(r.dR), "derived");
    R.add("d_triv", 0, r.k1_equal ? Ext(Rational(0)) : Ext::infinity(), "derived");
    R.add("frak_d", 0, r.total, "derived");
    auto rot = relative_rotation(f, g, C, D);
    R.witnesses.push_back("relative rotation representative " + to_json(rot.rep).dump());
    for (auto* m : {&f, &g}) {
        std::string side = m == &f ? "A" : "B";
        auto r1 = rotation(*m, C, D);
        R.add("rotation(1) of " + side + ", quotient norm", 0, Ext(h_norm(r1)), "derived", true, r1.k0.str());
        R.witnesses.push_back("rotation(1) of " + side + " = " + to_json(r1.rep).dump());
        auto dg = is_diagonalisable(*m, C, D);
        R.add(side + " diagonalisable", 0, Ext(Rational(dg.diagonalisable ? 1 : 0)), "derived", dg.diagonalisable || dg.structural,
              dg.structural ? "structural criterion: " + dg.witness : dg.witness);
    }
    R.check("frak_d equals the sum of its summands",
            r.k1_equal ? r.total == Ext(Rational(r.dH + r.dR)) : r.total == Ext::infinity());
    return R;
}

inline ScenarioReport query_dstar(const std::string& a, const std::string& b, const std::string& k, const std::string& m) {
    auto P = pattern_from(read_file(a)), Qp = pattern_from(read_file(b));
    ScenarioReport R;
    R.scenario = "metric dstar";
    if (k == "k1") {
        if (m == "frakd") throw std::invalid_argument("the frak_d fiber metric needs --k kbar1");
        auto r = d_star_k1(P, Qp);
        R.add("d_cu", 0, Ext(r.eps0), "derived");
        R.add("d*_Cu K1", 0, r.value, "derived", r.exact, r.method);
        if (!r.witness.empty()) R.witnesses.push_back(r.witness);
        R.check("d*_Cu(K1) >= d_cu", Ext(r.eps0) <= r.value);
        R.check("d*_Cu(K1) computed exactly", r.exact);
    } else if (k == "kbar1") {
        auto fm = m == "frakd" ? FiberMetric::FrakD : FiberMetric::Triv;
        auto r = d_star_bar_lower(P, Qp, fm);
        R.add("d_cu", 0, Ext(r.eps0), "derived");
        R.add(std::string("d*_Cu K1bar lower bound (") + fiber_metric_name(fm) + ")", 0, r.value, "derived", r.exact,
              r.method);
        if (!r.witness.empty()) R.witnesses.push_back(r.witness);
        R.check("lower bound >= d_cu", Ext(r.eps0) <= r.value);
    } else {
        throw std::invalid_argument("--k must be k1 or kbar1");
    }
    return R;
}

inline ScenarioReport query_det(const std::string& path, bool numeric, long steps) {
    auto u = field_from(read_file(path));
    PLFunction d = det_hat(u);
    ScenarioReport R;
    R.scenario = "det";
    R.witnesses.push_back("det_hat = " + to_json(d).dump());
    R.add("winding", 0, Ext(Rational(u.base == Space::Circle ? u.winding() : 0)), "derived");
    R.add("h_norm (constants quotient)", 0, Ext(h_norm({d, K0Image::all()})), "derived");
    std::vector<Rational> ys;
    auto& pts = d.points();
    for (size_t i = 0; i < pts.size(); ++i) {
        ys.push_back(pts[i].t);
        if (i + 1 < pts.size()) ys.push_back((pts[i].t + pts[i + 1].t) / 2);
    }
    for (auto& y : ys) R.add("det_hat(y=" + to_string(y) + ")", 0, Ext(d.eval(y)), "derived");
    if (numeric) {
        double worst = 0;
        bool ok = true;
        for (auto& y : ys) {
            auto num = numeric_det_at(u, y, steps);
            ok = ok && num.ok;
            worst = std::max(worst, std::abs(num.value - to_double(d.eval(y))));
        }
        std::ostringstream s;
        s << "max |exact - numeric| = " << worst << " with " << steps << " steps";
        R.notes.push_back(s.str());
        R.check("numeric determinant agrees within 1e-9", ok && worst < 1e-9, s.str());
    }
    return R;
}

}  // namespace ntcu::io
