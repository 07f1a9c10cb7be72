#pragma once

// Artifact serializers. Complex values are [re, im] in JSON and paired columns in CSV.

#include <optional>
#include <string>
#include <vector>

#include "singtrack/hierarchy/hierarchy.hpp"
#include "singtrack/inner/inner_map.hpp"
#include "singtrack/io/format.hpp"
#include "singtrack/series/farfield.hpp"
#include "singtrack/stokes/stokes.hpp"
#include "singtrack/verify/checks.hpp"

namespace singtrack::io {

inline json rational_json(const Rational& r) { return {{"num", num_str(r)}, {"den", den_str(r)}}; }

inline Rational rational_from_json(const json& j) {
    return Rational(BigInt(j.at("num").get<std::string>()), BigInt(j.at("den").get<std::string>()));
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorKind::ConfigInvalid, "complex values are [re, im] arrays, got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

// -------------------------------------------------------------------------------------------

inline json series_table_json(const CoeffTable& t) {
    json c = json::array();
    for (int k = 0; k <= t.kmax(); ++k)
        for (int m = 0; m <= t.mmax(); ++m)
            c.push_back({{"k", k}, {"m", m}, {"exponent", rational_json(farfield_exponent(k, m))},
                         {"value", rational_json(t(k, m))}});
    json P = json::array();
    for (int n = 0; n <= std::min(t.kmax(), t.mmax()); ++n) {
        json p = json::array();
        for (const auto& v : reconstruct_P(n, t).p) p.push_back(rational_json(v));
        P.push_back({{"n", n}, {"p", p}});
    }
    return {{"artifact", "series"}, {"kmax", t.kmax()}, {"mmax", t.mmax()}, {"coefficients", c}, {"P", P}};
}

inline std::vector<std::string> raytrace_header(bool tagged) {
    std::vector<std::string> h{"s", "re_eta", "im_eta", "re_G0", "im_G0", "re_G0p", "im_G0p", "re_G0pp", "im_G0pp"};
    if (tagged) h.push_back("model");
    return h;
}

inline std::string raytrace_csv(const RayTrace& tr, const std::optional<std::string>& model = std::nullopt) {
    Csv csv(raytrace_header(model.has_value()));
    for (size_t i = 0; i < tr.samples.size(); ++i) {
        const auto& s = tr.samples[i];
        std::vector<std::string> row{fmt_real(tr.s.at(i)), fmt_real(s.eta.real()), fmt_real(s.eta.imag())};
        for (auto v : s.jet) {
            row.push_back(fmt_real(v.real()));
            row.push_back(fmt_real(v.imag()));
        }
        if (model) row.push_back(*model);
        csv.add(std::move(row));
    }
    return csv.str();
}

inline json lattice_json(const std::vector<LatticePoint>& pts) {
    json a = json::array();
    for (const auto& p : pts)
        a.push_back({{"n_hat", p.n_hat}, {"eta_s", complex_json(p.eta_s)}, {"residual", p.residual}});
    return a;
}

inline json hierarchy_store_json(const HierarchyStore& st) {
    json nodes = json::array();
    for (const auto& n : st.nodes)
        nodes.push_back({{"eta", complex_json(n.eta)}, {"s", n.s}, {"leg", to_string(n.leg)}});
    json orders = json::array();
    for (const auto& m : st.members) {
        json g = json::array(), g1 = json::array(), g2 = json::array();
        for (const auto& j : m.jet) {
            g.push_back(complex_json(j[0]));
            g1.push_back(complex_json(j[1]));
            g2.push_back(complex_json(j[2]));
        }
        orders.push_back({{"k", m.k}, {"G", g}, {"G1", g1}, {"G2", g2}, {"tolerances_met", m.tolerances_met}});
    }
    json norms = json::array();
    for (const auto& r : st.norms)
        norms.push_back({{"k", r.k}, {"eta32_G", r.eta32_g}, {"eta52_G1", r.eta52_g1}, {"G3", r.g3}});
    json cfg = {{"N", st.cfg.N}, {"nodes", st.cfg.nodes}, {"anchor_mmax", st.cfg.anchor_mmax},
                {"grid", st.cfg.kind == GridKind::Annulus ? "annulus" : "ray"}};
    if (st.cfg.kind == GridKind::Annulus) cfg["target"] = complex_json(st.cfg.target);
    else {
        cfg["ray_start"] = complex_json(st.cfg.ray_start);
        cfg["ray_end"] = complex_json(st.cfg.ray_end);
    }
    return {{"artifact", "hierarchy"},
            {"schema_version", HierarchyStore::kSchemaVersion},
            {"config", cfg},
            {"nodes", nodes},
            {"orders", orders},
            {"norms", norms},
            {"node_residual", st.node_residual},
            {"junction_residual", st.junction_residual}};
}

inline std::string norms_csv(const json& store) {
    if (store.value("schema_version", 0) != HierarchyStore::kSchemaVersion)
        throw Error(ErrorKind::UnknownArtifact, "hierarchy store schema version mismatch");
    Csv csv({"k", "eta32_G", "eta52_G1", "G3", "root"});
    for (const auto& r : store.at("norms")) {
        const int k = r.at("k").get<int>();
        const double a = r.at("eta32_G").get<double>();
        csv.add({std::to_string(k), fmt_real(a), fmt_real(r.at("eta52_G1").get<double>()),
                 fmt_real(r.at("G3").get<double>()), fmt_real(k ? std::pow(a * k * k * k, 1.0 / k) : 0.0)});
    }
    return csv.str();
}

// margin = rate/weight, whose minimum is the certificate constant
inline std::string stokes_trace_csv(const PathTrace& tr, GrowthLaw law) {
    Csv csv({"t", "re_z", "im_z", "re_P", "dreP_ds", "weight", "margin"});
    for (const auto& s : tr.samples) {
        const double w = law_weight(law, std::abs(s.z));
        csv.add({fmt_real(s.t), fmt_real(s.z.real()), fmt_real(s.z.imag()), fmt_real(s.P.real()), fmt_real(s.rate),
                 fmt_real(w), fmt_real(s.rate / w)});
    }
    return csv.str();
}

inline json boundary_json(const DomainE& d, double R, int per_edge = 64) {
    json poly = json::array();
    for (auto z : d.boundary(R, per_edge)) poly.push_back(complex_json(z));
    return {{"artifact", "boundary"},
            {"eps", d.eps},
            {"delta", d.delta},
            {"rho", d.rho()},
            {"R", R},
            {"per_edge", per_edge},
            {"corners", {{"chi1", complex_json(d.chi1())}, {"chi2", complex_json(d.chi2())}, {"chi3", complex_json(d.chi3())}}},
            {"polyline", poly}};
}

inline json report_json(const std::vector<CheckReport>& r) {
    json a = json::array();
    for (const auto& c : r) a.push_back(to_json(c));
    return a;
}

// Plot-ready CSV from a stored JSON artifact.
inline std::string export_plotdata(const json& artifact, const std::string& kind) {
    if (kind == "lattice") {
        if (!artifact.is_array()) throw Error(ErrorKind::UnknownArtifact, "lattice artifact must be an array");
        Csv csv({"n_hat", "re", "im", "residual"});
        for (const auto& p : artifact) {
            cplx z = complex_from_json(p.at("eta_s"));
            csv.add({std::to_string(p.at("n_hat").get<int>()), fmt_real(z.real()), fmt_real(z.imag()),
                     fmt_real(p.at("residual").get<double>())});
        }
        return csv.str();
    }
    if (kind == "norms") {
        if (!artifact.is_object() || artifact.value("artifact", "") != "hierarchy")
            throw Error(ErrorKind::UnknownArtifact, "norms export needs a hierarchy store");
        return norms_csv(artifact);
    }
    if (kind == "boundary") {
        if (!artifact.is_object() || artifact.value("artifact", "") != "boundary")
            throw Error(ErrorKind::UnknownArtifact, "boundary export needs a boundary artifact");
        Csv csv({"re", "im"});
        for (const auto& z : artifact.at("polyline")) {
            cplx c = complex_from_json(z);
            csv.add({fmt_real(c.real()), fmt_real(c.imag())});
        }
        return csv.str();
    }
    if (kind == "trace") {
        if (!artifact.is_object() || !artifact.contains("samples"))
            throw Error(ErrorKind::UnknownArtifact, "trace export needs a trace artifact with samples");
        const bool tagged = artifact.contains("model");
        Csv csv(raytrace_header(tagged));
        for (const auto& s : artifact.at("samples")) {
            cplx eta = complex_from_json(s.at("eta"));
            std::vector<std::string> row{fmt_real(s.at("s").get<double>()), fmt_real(eta.real()), fmt_real(eta.imag())};
            for (const auto& v : s.at("jet")) {
                cplx c = complex_from_json(v);
                row.push_back(fmt_real(c.real()));
                row.push_back(fmt_real(c.imag()));
            }
            if (tagged) row.push_back(artifact.at("model").get<std::string>());
            csv.add(std::move(row));
        }
        return csv.str();
    }
    throw Error(ErrorKind::UnknownArtifact, "unknown plot kind '" + kind + "' (trace, lattice, boundary, norms)");
}

inline json raytrace_json(const RayTrace& tr, const std::optional<std::string>& model = std::nullopt) {
    json smp = json::array();
    for (size_t i = 0; i < tr.samples.size(); ++i) {
        const auto& s = tr.samples[i];
        smp.push_back({{"s", tr.s.at(i)},
                       {"eta", complex_json(s.eta)},
                       {"jet", {complex_json(s.jet[0]), complex_json(s.jet[1]), complex_json(s.jet[2])}}});
    }
    json j = {{"artifact", "trace"}, {"terminated_by", to_string(tr.terminated_by)},
              {"sector_violation", tr.sector_violation}, {"samples", smp}};
    if (model) j["model"] = *model;
    return j;
}

// -------------------------------------------------------------------------------------------

struct OutputFile {
    std::string name;
    std::string data;
};

inline json manifest_json(const json& resolved_config, const std::vector<OutputFile>& outputs) {
    json outs = json::array();
    for (const auto& o : outputs) outs.push_back({{"file", o.name}, {"bytes", o.data.size()}, {"fnv1a64", fnv1a_hex(o.data)}});
    return {{"config_hash", fnv1a_hex(dump_json(resolved_config, -1))},
#ifdef SINGTRACK_VERSION
            {"tool_version", SINGTRACK_VERSION},
#else
            {"tool_version", "unknown"},
#endif
            {"inputs", resolved_config},
            {"outputs", outs}};
}

}  // namespace singtrack::io
