#pragma once

// Study runners behind the command line. Each study has a parameter schema (defaults plus
// range checks); unknown keys are rejected before anything runs.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "singtrack/io/export.hpp"
#include "singtrack/series/outer.hpp"
#include "singtrack/thinfilm/thinfilm.hpp"
#include "singtrack/verify/checks.hpp"

namespace singtrack::studies {

using io::json;
using io::OutputFile;

inline const std::vector<std::string>& study_names() {
    static const std::vector<std::string> s{"series", "g0", "lattice", "hierarchy", "stokes", "verify", "thinfilm"};
    return s;
}

inline json defaults(const std::string& study) {
    static const std::map<std::string, json> d{
        {"series", {{"kmax", 6}, {"mmax", 6}, {"check_outer", false}}},
        {"g0",
         {{"n_hat", 10}, {"stokes_C", "fit"}, {"fit_n_hat", 60}, {"m_init", 8}, {"rel_tol", 1e-12},
          {"abs_tol", 1e-14}, {"max_step", 0.05}, {"path", nullptr}, {"locate", true}}},
        {"lattice", {{"stokes_C", "fit"}, {"fit_n_hat", 60}, {"n_min", 10}, {"n_max", 60}}},
        {"hierarchy",
         {{"n_hat", 10}, {"stokes_C", "fit"}, {"fit_n_hat", 60}, {"N", 8}, {"nodes", 2000},
          {"residual_taus", {0.05, 0.025, 0.0125}}, {"probe_taus", {0.0, 0.02, 0.05, 0.5}}}},
        {"stokes",
         {{"mode", 1}, {"chi0", {12.0, 1.2}}, {"tmax", 40.0}, {"nodes", 64}, {"law", "power-5/4"}, {"eps", 0.3},
          {"delta", kPi / 80}, {"R", 30.0}, {"per_edge", 64}}},
        {"thinfilm",
         {{"family_amp", {0.0, 0.0}}, {"r_far", 12.0}, {"rel_tol", 1e-12}, {"abs_tol", 1e-14}, {"floor", 1e-3},
          {"path", nullptr}, {"seeds", json::array()}}},
        {"verify",
         {{"target", "all"}, {"center", "auto"}, {"radius", "auto"}, {"tau", 0.02}, {"N", 8}, {"nodes", 2000},
          {"n_hat", 10}, {"stokes_C", "fit"}, {"fit_n_hat", 60}, {"samples", 512}, {"envelope_eps", 1.0},
          {"envelope_tau", 1.0}}},
    };
    auto it = d.find(study);
    if (it == d.end()) throw Error(ErrorKind::ConfigInvalid, "unknown study '" + study + "'");
    return it->second;
}

// Defaults overlaid with user values; unknown keys are an error.
inline json resolve(const std::string& study, const json& user) {
    json p = defaults(study);
    if (user.is_null()) return p;
    if (!user.is_object()) throw Error(ErrorKind::ConfigInvalid, "parameters must be a JSON object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!p.contains(it.key()))
            throw Error(ErrorKind::ConfigInvalid, "unknown parameter '" + it.key() + "' for study " + study);
        p[it.key()] = it.value();
    }
    return p;
}

// -------------------------------------------------------------------------------------------
// typed access with range checks

inline double num(const json& p, const std::string& k, double lo, double hi) {
    const auto& v = p.at(k);
    if (!v.is_number()) throw Error(ErrorKind::ConfigInvalid, k + " must be a number");
    double x = v.get<double>();
    if (!(x >= lo && x <= hi))
        throw Error(ErrorKind::ConfigInvalid, k + " = " + v.dump() + " outside [" + io::fmt_real(lo) + ", " +
                                                  io::fmt_real(hi) + "]");
    return x;
}

inline int integer(const json& p, const std::string& k, int lo, int hi) {
    const auto& v = p.at(k);
    if (!v.is_number_integer()) throw Error(ErrorKind::ConfigInvalid, k + " must be an integer");
    long long x = v.get<long long>();
    if (x < lo || x > hi)
        throw Error(ErrorKind::ConfigInvalid,
                    k + " = " + v.dump() + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return int(x);
}

inline bool boolean(const json& p, const std::string& k) {
    if (!p.at(k).is_boolean()) throw Error(ErrorKind::ConfigInvalid, k + " must be true or false");
    return p.at(k).get<bool>();
}

inline std::string text(const json& p, const std::string& k) {
    if (!p.at(k).is_string()) throw Error(ErrorKind::ConfigInvalid, k + " must be a string");
    return p.at(k).get<std::string>();
}

inline cplx complex(const json& p, const std::string& k) { return io::complex_from_json(p.at(k)); }

inline std::vector<double> reals(const json& p, const std::string& k, double lo, double hi) {
    const auto& v = p.at(k);
    if (!v.is_array() || v.empty()) throw Error(ErrorKind::ConfigInvalid, k + " must be a nonempty array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number() || !(x.get<double>() >= lo && x.get<double>() <= hi))
            throw Error(ErrorKind::ConfigInvalid, k + " entries must be numbers in [" + io::fmt_real(lo) + ", " +
                                                      io::fmt_real(hi) + "]");
        out.push_back(x.get<double>());
    }
    return out;
}

// polyline [[re, im], ...] with at least two points
inline PathSpec polyline(const json& v, const std::string& k) {
    if (!v.is_array() || v.size() < 2) throw Error(ErrorKind::ConfigInvalid, k + " needs at least two [re, im] points");
    PathSpec p;
    cplx a = io::complex_from_json(v[0]);
    for (size_t i = 1; i < v.size(); ++i) {
        cplx b = io::complex_from_json(v[i]);
        if (b == a) throw Error(ErrorKind::ConfigInvalid, k + " repeats a point");
        p.add(Segment::line(a, b));
        a = b;
    }
    return p;
}

inline cplx stokes_constant(const json& p) {
    const auto& v = p.at("stokes_C");
    if (v.is_string()) {
        if (v.get<std::string>() != "fit") throw Error(ErrorKind::ConfigInvalid, "stokes_C is \"fit\" or [re, im]");
        const int n = integer(p, "fit_n_hat", 10, 200);
        if (n == 60) return checks::fitted_stokes_constant();
        return fit_stokes_constant(n).C;
    }
    cplx C = io::complex_from_json(v);
    if (C == cplx(0)) throw Error(ErrorKind::ConfigInvalid, "stokes_C must be nonzero");
    return C;
}

inline IntegratorConfig integrator(const json& p) {
    IntegratorConfig ic;
    ic.rel_tol = num(p, "rel_tol", 1e-15, 1e-3);
    ic.abs_tol = num(p, "abs_tol", 1e-30, 1e-3);
    if (p.contains("max_step")) ic.max_step = num(p, "max_step", 1e-6, 1.0);
    return ic;
}

inline json estimate_json(const SingularityEstimate& e) {
    return {{"eta_hat_s", io::complex_json(e.eta_hat_s)},
            {"local_amplitude", io::complex_json(e.local_amplitude)},
            {"branch_order", e.branch_order},
            {"branch_order_stderr", e.branch_order_stderr},
            {"fit_residual", e.fit_residual},
            {"correction", io::complex_json(e.correction)},
            {"seed", io::complex_json(e.seed)},
            {"refine_steps", e.refine_steps},
            {"n_samples", e.n_samples}};
}

// -------------------------------------------------------------------------------------------

struct StudyOutput {
    std::vector<OutputFile> files;
    bool failed_checks = false;  // verify: some check did not pass
    json timing = json::object();

    void add(std::string name, std::string data) { files.push_back({std::move(name), std::move(data)}); }
    void add_json(std::string name, const json& j) { add(std::move(name), io::dump_json(j)); }
};

inline void run_series(const json& p, std::uint64_t, StudyOutput& out) {
    const int kmax = integer(p, "kmax", 0, 40), mmax = integer(p, "mmax", 0, 12);
    auto t = compute_farfield_table(kmax, mmax);
    json j = io::series_table_json(t);
    if (boolean(p, "check_outer")) {
        json id = json::array();
        for (int n = 0; n <= std::min({kmax, mmax, 8}); ++n)
            id.push_back({{"n", n}, {"p_nm_equals_c", reconstruct_P(n, t) == outer_polynomial(n)}});
        j["cross_identity"] = id;
    }
    out.add_json("series.json", j);
}

inline void run_g0(const json& p, std::uint64_t, StudyOutput& out) {
    const int n_hat = integer(p, "n_hat", 1, 200), m_init = integer(p, "m_init", 0, 10);
    const IntegratorConfig ic = integrator(p);
    const bool locate = boolean(p, "locate");
    const cplx C = stokes_constant(p);
    auto lp = solve_lattice_point({C, n_hat});
    if (!lp.converged) throw Error(ErrorKind::StudyFailed, "lattice point did not converge: " + lp.error);
    PathSpec path = p.at("path").is_null() ? approach_path(lp.eta_s) : polyline(p.at("path"), "path");

    json summary = {{"stokes_C", io::complex_json(C)}, {"n_hat", n_hat}, {"eta_lattice", io::complex_json(lp.eta_s)}};
    auto tr = trace_g0(path, m_init, ic);
    out.add("trace.csv", io::raytrace_csv(tr));
    summary["terminated_by"] = to_string(tr.terminated_by);
    summary["end"] = io::complex_json(tr.back().eta);
    summary["sector_violation"] = tr.sector_violation;
    auto nb = g0_norms(tr);
    summary["norms"] = {{"sup_eta_half_G0", nb.sup_eta_half_g0}, {"sup_eta_7half_G0ppp", nb.sup_eta_7half_g0pp}};
    if (locate) {
        LocateConfig lc;
        lc.integrator = ic;
        lc.approach.m_init = m_init;
        summary["singularity"] = estimate_json(locate_singularity(lp.eta_s, lc));
    }
    out.add_json("g0.json", summary);
}

inline void run_lattice(const json& p, std::uint64_t, StudyOutput& out) {
    const int lo = integer(p, "n_min", 1, 10000), hi = integer(p, "n_max", lo, 10000);
    const cplx C = stokes_constant(p);
    auto pts = singularity_lattice(C, lo, hi);
    for (const auto& q : pts)
        if (!q.converged) throw Error(ErrorKind::StudyFailed, "lattice point " + std::to_string(q.n_hat) + ": " + q.error);
    json lat = io::lattice_json(pts);
    out.add_json("lattice.json", lat);
    out.add("lattice.csv", io::export_plotdata(lat, "lattice"));
}

inline void run_hierarchy(const json& p, std::uint64_t, StudyOutput& out) {
    const int n_hat = integer(p, "n_hat", 1, 200), N = integer(p, "N", 1, 16), nodes = integer(p, "nodes", 16, 100000);
    const auto rt = reals(p, "residual_taus", 1e-6, 1.0), pt = reals(p, "probe_taus", 0.0, 10.0);
    const cplx C = stokes_constant(p);
    auto lp = solve_lattice_point({C, n_hat});
    if (!lp.converged) throw Error(ErrorKind::StudyFailed, "lattice point did not converge: " + lp.error);
    auto e = locate_singularity(lp.eta_s);
    auto st = solve_hierarchy(annulus_config(e.eta_hat_s, N, nodes));

    json store = io::hierarchy_store_json(st);
    out.add_json("hierarchy_store.json", store);
    out.add("norms.csv", io::export_plotdata(store, "norms"));

    json res = {{"eta", io::complex_json(st.nodes[st.node_residual].eta)}, {"N", N}, {"tau", rt}};
    std::vector<double> x, y, r;
    for (double t : rt) {
        r.push_back(pde_residual(st, st.node_residual, t, N));
        x.push_back(std::log(t));
        y.push_back(std::log(r.back()));
    }
    res["residual"] = r;
    if (rt.size() >= 2) res["slope"] = fit_line(x, y).slope;
    out.add_json("residual.json", res);

    auto pr = convergence_probe(st, st.nodes.size() - 1, pt, N);
    json rows = json::array();
    for (const auto& row : pr.rows)
        rows.push_back({{"tau", row.tau}, {"term", row.term}, {"root", row.root}, {"ratio", row.ratio},
                        {"geometric", row.geometric}, {"diverging", row.diverging}});
    out.add_json("probe.json", {{"eta", io::complex_json(st.nodes[pr.node].eta)}, {"A_node", pr.A_node},
                                {"radius", pr.radius}, {"rows", rows}});
}

inline GrowthLaw growth_law(const std::string& s) {
    for (auto l : {GrowthLaw::Power54, GrowthLaw::PowerMinus1, GrowthLaw::PowerHalf, GrowthLaw::Constant})
        if (s == to_string(l)) return l;
    throw Error(ErrorKind::ConfigInvalid, "law must be power-5/4, power-(-1), power-1/2 or constant");
}

inline void run_stokes(const json& p, std::uint64_t, StudyOutput& out) {
    const int j = integer(p, "mode", 1, 3), nodes = integer(p, "nodes", 0, 100000);
    const double tmax = num(p, "tmax", 1e-9, 1e6), R = num(p, "R", 1.0, 1e4);
    const GrowthLaw law = growth_law(text(p, "law"));
    DomainE d;
    d.eps = num(p, "eps", 1e-6, 10.0);
    d.delta = num(p, "delta", 1e-9, kPi / 63);
    const int per_edge = integer(p, "per_edge", 1, 100000);

    FlowConfig fc;
    fc.nodes = nodes;
    auto tr = trace_flow_chi(j, complex(p, "chi0"), tmax, fc);
    out.add("trace.csv", io::stokes_trace_csv(tr, law));
    json b = io::boundary_json(d, R, per_edge);
    out.add_json("boundary.json", b);
    out.add("boundary.csv", io::export_plotdata(b, "boundary"));

    auto got = left_boundary_signs(d), want = expected_left_boundary_signs();
    json signs = json::array();
    for (int m = 0; m < 3; ++m)
        signs.push_back({{"mode", m + 1}, {"sign", {got.sign[m][0], got.sign[m][1]}},
                         {"expected", {want.sign[m][0], want.sign[m][1]}},
                         {"min_abs_rate", {got.min_abs_rate[m][0], got.min_abs_rate[m][1]}}});
    auto cert = monotonicity_check(tr, law);
    out.add_json("stokes.json", {{"turning_modulus", turning_modulus()},
                                 {"turning_point", io::complex_json(turning_point())},
                                 {"left_boundary_signs", signs},
                                 {"trace", {{"mode", j}, {"law", to_string(law)}, {"C_emp", cert.C_emp},
                                            {"violations", cert.violations.size()}, {"note", tr.note}}}});
}

inline void run_thinfilm(const json& p, std::uint64_t, StudyOutput& out) {
    F0Start s;
    s.family_amp = complex(p, "family_amp");
    s.r_far = num(p, "r_far", 8.0, 16.0);
    F0TraceConfig tc;
    tc.integrator = integrator(p);
    tc.floor = num(p, "floor", 0.0, 1.0);
    PathSpec path;
    if (p.at("path").is_null()) path.add(Segment::line(s.r_far, 1.0));
    else path = polyline(p.at("path"), "path");
    if (std::abs(path.start() - s.r_far) > 1e-12 * s.r_far)
        throw Error(ErrorKind::ConfigInvalid, "thin-film path must start at r_far on the real axis");
    auto tr = continue_f0(f0_start_state(s), path, tc);
    out.add("trace.csv", io::raytrace_csv(tr, std::string(kThinFilmTag)));

    const auto& seeds = p.at("seeds");
    if (!seeds.is_array()) throw Error(ErrorKind::ConfigInvalid, "seeds must be an array of [re, im]");
    json found = json::array();
    F0LocateConfig lc;
    lc.start = s;
    for (const auto& sd : seeds) {
        cplx seed = io::complex_from_json(sd);
        try {
            found.push_back({{"seed", sd}, {"estimate", estimate_json(locate_f0_singularity(seed, lc))}});
        } catch (const Error& e) {
            found.push_back({{"seed", sd}, {"error", e.what()}});
        }
    }
    out.add_json("thinfilm.json", {{"model", kThinFilmTag},
                                   {"family_amp", io::complex_json(s.family_amp)},
                                   {"terminated_by", to_string(tr.terminated_by)},
                                   {"end", io::complex_json(tr.back().eta)},
                                   {"max_defect", max_f0_defect(tr)},
                                   {"singularities", found}});
}

// Winding of G₀ (τ = 0) or of the order-N partial sum around a singularity.
inline CheckReport winding_check(const json& p) {
    const double tau = num(p, "tau", 0.0, 1.0);
    const int N = integer(p, "N", 1, 16), n_hat = integer(p, "n_hat", 1, 200), n = integer(p, "samples", 8, 1 << 16);
    if (n % 2) throw Error(ErrorKind::ConfigInvalid, "samples must be even");
    const double ce = num(p, "envelope_eps", 0.0, 100.0), ct = num(p, "envelope_tau", 0.0, 100.0);
    const cplx C = stokes_constant(p);
    auto lp = solve_lattice_point({C, n_hat});
    if (!lp.converged) throw Error(ErrorKind::StudyFailed, "lattice point did not converge: " + lp.error);
    cplx seed = p.at("center").is_string() ? lp.eta_s : io::complex_from_json(p.at("center"));
    if (p.at("center").is_string() && p.at("center") != "auto")
        throw Error(ErrorKind::ConfigInvalid, "center is \"auto\" or [re, im]");
    auto e = locate_singularity(seed);
    const double scale = singular_scale(e.eta_hat_s);
    double radius;
    if (p.at("radius").is_string()) {
        if (p.at("radius") != "auto") throw Error(ErrorKind::ConfigInvalid, "radius is \"auto\" or a number");
        radius = (tau == 0 ? 2.0 : kPartialSumWindingRadius) * scale;
    } else {
        radius = num(p, "radius", 1e-12, 1.0);
    }
    json in = {{"center", io::complex_json(e.eta_hat_s)}, {"radius", radius}, {"tau", tau}, {"samples", 2 * n}};
    WindingResult w;
    if (tau == 0) {
        const G0State a0 = e.approach.back();
        const double th = std::arg(a0.eta - e.eta_hat_s);
        w = winding_number(g0_circle_provider(a0, IntegratorConfig{}, th), e.eta_hat_s, radius, n, {1e-12, th});
    } else {
        const int nodes = integer(p, "nodes", 16, 100000);
        auto st = solve_hierarchy(annulus_config(e.eta_hat_s, N, nodes));
        const size_t end = st.nodes.size() - 1;
        const double th = std::arg(st.nodes[end].eta - e.eta_hat_s);
        w = winding_number(partial_sum_provider(st, end, tau, N, th), e.eta_hat_s, radius, n, {1e-12, th});
        in["N"] = N;
        in["nodes"] = nodes;
    }
    in["error_estimate"] = w.error_estimate;
    in["imag"] = w.value.imag();
    return checks::within("winding", in, w.value.real(), 2.0 / 3, ce * std::cbrt(radius) + ct * tau);
}

inline void run_verify(const json& p, std::uint64_t seed, StudyOutput& out) {
    const std::string target = text(p, "target");
    json report = json::array();
    auto record = [&](const TargetResult& r) {
        report.push_back(to_json(r));
        out.timing[r.target->name] = {{"seconds", r.seconds}, {"limit_s", r.target->runtime_limit_s},
                                      {"within_limit", r.within_time()}};
        if (!r.checks_pass()) out.failed_checks = true;
    };
    if (target == "winding") {
        auto c = winding_check(p);
        out.failed_checks = !c.pass;
        report.push_back(to_json(c));
    } else if (target == "all") {
        for (const auto& t : acceptance_targets()) record(run_target(t, seed));
    } else if (const auto* t = find_target(target)) {
        record(run_target(*t, seed));
    } else {
        std::string names;
        for (const auto& t : acceptance_targets()) names += std::string(" ") + t.name;
        throw Error(ErrorKind::ConfigInvalid, "unknown verify target '" + target + "' (all winding" + names + ")");
    }
    out.add_json("report.json", report);
}

using Runner = std::function<void(const json&, std::uint64_t, StudyOutput&)>;

inline Runner runner(const std::string& study) {
    static const std::map<std::string, Runner> r{{"series", run_series},       {"g0", run_g0},
                                                 {"lattice", run_lattice},     {"hierarchy", run_hierarchy},
                                                 {"stokes", run_stokes},       {"thinfilm", run_thinfilm},
                                                 {"verify", run_verify}};
    auto it = r.find(study);
    if (it == r.end()) throw Error(ErrorKind::ConfigInvalid, "unknown study '" + study + "'");
    return it->second;
}

}  // namespace singtrack::studies
