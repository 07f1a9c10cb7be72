#pragma once

// τ-hierarchy G_0..G_N on a shared grid of complex path nodes.
//
// Two grid shapes:
//  * Ray: one path from a far-field anchor inward. Every order is co-integrated from its
//    far-field jet at the path start (near the real axis the homogeneous modes are neutral).
//  * Annulus: far field -> near-singularity annulus, through legs
//      A  real axis r_far -> r0
//      B  arc at r0 onto the ray at angle θ just inside the sector edge
//      C  ray out to |target|
//      D  ray end -> target + 1.5·scale·u (forced node) -> target + 0.5·scale·u
//    Along C the mode exp(-icη^{9/4}) grows inward and exp(+icη^{9/4}) outward, so neither
//    direction is stable on its own. A and B are integrated outward from anchors at r_far.
//    On C, order k is the inward shot S_k from a far-field anchor on a spur E beyond |target|,
//    minus γ_k times the inward-growing homogeneous solution h_k; γ_k is fixed by matching
//    the jet coming out of B at r0. D is integrated outward from the end of C.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "singtrack/core/linalg.hpp"
#include "singtrack/core/ode.hpp"
#include "singtrack/g0/g0.hpp"
#include "singtrack/g0/locate.hpp"
#include "singtrack/hierarchy/closure.hpp"
#include "singtrack/inner/inner_map.hpp"

namespace singtrack {

enum class GridKind { Ray, Annulus };

inline const char* to_string(GridKind g) { return g == GridKind::Ray ? "ray" : "annulus"; }

enum class Leg { A = 0, B, C, D, Ray };

inline const char* to_string(Leg l) {
    switch (l) {
    case Leg::A: return "A";
    case Leg::B: return "B";
    case Leg::C: return "C";
    case Leg::D: return "D";
    case Leg::Ray: return "ray";
    }
    return "?";
}

inline IntegratorConfig hierarchy_integrator() {
    IntegratorConfig c;
    c.abs_tol = 1e-30;  // G_k spans many decades across orders; control is relative
    return c;
}

struct HierarchyConfig {
    GridKind kind = GridKind::Annulus;
    int N = 12;
    int nodes = 2000;
    int anchor_mmax = 8;
    // Ray grid
    cplx ray_start = 40.0;
    cplx ray_end = 10.0;
    // Annulus grid; target is the located singularity of G₀
    cplx target{};
    ApproachConfig approach{};
    double spur_gain = 12.0;       // e-folds of exp(-icη^{9/4}) decay between |target| and the spur end
    double residual_radius = 1.5;  // forced node, in units of |target|^{-5/4}
    double inner_radius = 0.5;     // end of the grid, same units
    IntegratorConfig integrator = hierarchy_integrator();

    void validate() const {
        integrator.validate();
        if (N < 1 || N > 16) throw Error(ErrorKind::ConfigInvalid, "N must lie in [1, 16]");
        if (nodes < 16) throw Error(ErrorKind::ConfigInvalid, "need at least 16 grid nodes");
        if (anchor_mmax < 0 || anchor_mmax > 10) throw Error(ErrorKind::ConfigInvalid, "anchor_mmax must lie in [0, 10]");
        if (kind == GridKind::Ray) {
            if (std::abs(ray_start) < approach.r_far * (1 - 1e-12))
                throw Error(ErrorKind::ConfigInvalid, "ray grid must start at |eta| >= r_far");
            if (!in_sector(ray_start)) throw Error(ErrorKind::ConfigInvalid, "ray grid must start inside the sector");
            if (ray_end == ray_start) throw Error(ErrorKind::ConfigInvalid, "ray grid has zero length");
        } else {
            if (!(std::abs(target) > approach.r0))
                throw Error(ErrorKind::ConfigInvalid, "annulus target must lie beyond r0");
            if (!(inner_radius > 0 && residual_radius > inner_radius))
                throw Error(ErrorKind::ConfigInvalid, "need 0 < inner_radius < residual_radius");
            if (!(spur_gain > 0)) throw Error(ErrorKind::ConfigInvalid, "spur_gain must be positive");
        }
    }
};

struct GridNode {
    cplx eta{};
    double s = 0;
    Leg leg = Leg::Ray;
};

struct GridFunction {
    int k = 0;
    std::vector<Jet3> jet;  // (G_k, G_k', G_k'') per node
    bool tolerances_met = true;
};

struct NormRow {
    int k = 0;
    double eta32_g = 0;   // sup |η^{3/2} G_k|
    double eta52_g1 = 0;  // sup |η^{5/2} G_k'|
    double g3 = 0;        // sup |G_k'''|
};

struct HierarchyStore {
    static constexpr int kSchemaVersion = 1;
    HierarchyConfig cfg;
    PathSpec grid;
    std::vector<GridNode> nodes;
    std::vector<GridFunction> members;
    std::vector<NormRow> norms;
    // annulus bookkeeping
    PathSpec spur;
    Jet3 g0_spur_end{};
    std::vector<cplx> gamma;              // per order, 0 for k = 0
    std::vector<double> junction_residual;  // max relative jet mismatch at r0
    std::vector<double> junction_scale;     // |γ_k h_k| / |G_k| at r0, the cancellation the fit has to resolve
    size_t node_r0 = 0, node_rt = 0, node_residual = 0;

    int orders() const { return static_cast<int>(members.size()) - 1; }
    double scale() const { return singular_scale(cfg.target); }
};

namespace detail {

using CV = std::vector<cplx>;

struct CoSystem {
    int K;
    double top_scale = 1.0;
    mutable SourceWork w;
    mutable CV g, g1, d, R;
    explicit CoSystem(int K_, double ts = 1.0) : K(K_), top_scale(ts), w(K_), g(K_ + 1), g1(K_ + 1), d(K_ + 1), R(K_ + 1) {}
    void operator()(cplx z, const CV& y, CV& dy) const {
        for (int j = 0; j <= K; ++j) {
            g[j] = y[3 * j];
            g1[j] = y[3 * j + 1];
        }
        hierarchy_thirds(z, K, g.data(), g1.data(), d.data(), R.data(), w, 0.0, top_scale);
        for (int j = 0; j <= K; ++j) {
            dy[3 * j] = y[3 * j + 1];
            dy[3 * j + 1] = y[3 * j + 2];
            dy[3 * j + 2] = d[j];
        }
    }
};

// State: G₀ jet, then (S_j jet, h_j jet) for j = 1..k. G_j = S_j - γ_j h_j for j < k.
struct ShotSystem {
    int k;
    CV gamma;
    double top_scale = 1.0;
    mutable SourceWork w;
    mutable CV g, d;
    ShotSystem(int k_, CV gam, double ts) : k(k_), gamma(std::move(gam)), top_scale(ts), w(k_), g(k_ + 1), d(k_ + 1) {}
    void operator()(cplx z, const CV& y, CV& dy) const {
        g[0] = y[0];
        d[0] = g0_third(z, y[0], y[1]);
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = d[0];
        for (int j = 1; j <= k; ++j) {
            const size_t s = 3 + 6 * (j - 1), h = s + 3;
            cplx R = w.source(j, g.data(), d.data());
            if (j == k) R *= top_scale;
            cplx s3 = gk_third_derivative(j, z, y[0], d[0], y[s], y[s + 1], R);
            cplx h3 = closure_linear(j, z, y[0], d[0], y[h], y[h + 1]);
            dy[s] = y[s + 1];
            dy[s + 1] = y[s + 2];
            dy[s + 2] = s3;
            dy[h] = y[h + 1];
            dy[h + 1] = y[h + 2];
            dy[h + 2] = h3;
            if (j < k) {
                g[j] = y[s] - gamma[j] * y[h];
                d[j] = s3 - gamma[j] * h3;
            }
        }
    }
};

inline Jet3 anchor_jet(int k, cplx eta, int mmax) {
    try {
        return gk_farfield_eval(k, eta, mmax, default_table());
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SeriesNotAsymptotic) throw;
        throw Error(ErrorKind::AnchorSeriesNotAsymptotic, std::string("anchor for order ") + std::to_string(k) +
                                                               ": " + e.what());
    }
}

// Leading WKB jet of the homogeneous mode exp(-icη^{9/4})·η^a, a = -15/8 - 9β_k/4, scaled to 1 at η.
inline Jet3 decaying_mode_jet(int k, cplx eta) {
    const double a = -15.0 / 8 - 2.25 * beta_k(k);
    cplx phi = a / eta - I * 2.25 * kWkbRate * std::pow(eta, 1.25);
    cplx dphi = -a / (eta * eta) - I * (45.0 / 16) * kWkbRate * std::pow(eta, 0.25);
    return {1.0, phi, phi * phi + dphi};
}

inline void require_path_end(const Trajectory& t, const char* what) {
    if (t.termination != Termination::PathEnd)
        throw Error(ErrorKind::StudyFailed, std::string(what) + " ended early (" + to_string(t.termination) +
                                                "): " + t.note);
}

inline CV stack_jets(const std::vector<Jet3>& jets) {
    CV y;
    for (const auto& j : jets) y.insert(y.end(), j.begin(), j.end());
    return y;
}

}  // namespace detail

// Co-integrates orders 0..K along `path` from jets at its start; top_scale multiplies R_K.
inline Trajectory cointegrate_hierarchy(const std::vector<Jet3>& start, const PathSpec& path,
                                        const IntegratorConfig& cfg, Record record = Record::NodesOnly,
                                        double top_scale = 1.0) {
    if (start.empty()) throw Error(ErrorKind::MissingLowerOrder, "no start jets");
    detail::CoSystem sys(static_cast<int>(start.size()) - 1, top_scale);
    return integrate_path(sys, path, detail::stack_jets(start), cfg, record);
}

inline std::vector<Jet3> farfield_jets(int K, cplx eta, int mmax, double top_scale = 1.0) {
    std::vector<Jet3> out;
    for (int j = 0; j <= K; ++j) {
        Jet3 a = detail::anchor_jet(j, eta, mmax);
        if (j == K && j > 0)
            for (auto& v : a) v *= top_scale;
        out.push_back(a);
    }
    return out;
}

// Jets of orders 0..K at a node.
inline std::vector<Jet3> node_jets(const HierarchyStore& st, size_t node, int K) {
    if (node >= st.nodes.size()) throw Error(ErrorKind::InvalidPath, "node index outside the grid");
    if (K > st.orders()) throw Error(ErrorKind::MissingLowerOrder, "order not stored");
    std::vector<Jet3> out;
    for (int j = 0; j <= K; ++j) out.push_back(st.members[j].jet[node]);
    return out;
}

// G_0'''..G_K''' at a node from the stored jets and the algebraic closure.
inline std::vector<cplx> node_thirds(const HierarchyStore& st, size_t node, int K) {
    auto jets = node_jets(st, node, K);
    std::vector<cplx> g(K + 1), g1(K + 1), d(K + 1), R(K + 1);
    for (int j = 0; j <= K; ++j) {
        g[j] = jets[j][0];
        g1[j] = jets[j][1];
    }
    SourceWork w(K);
    hierarchy_thirds(st.nodes[node].eta, K, g.data(), g1.data(), d.data(), R.data(), w);
    return d;
}

inline cplx gk_third_derivative(int k, const HierarchyStore& st, size_t node) { return node_thirds(st, node, k)[k]; }

inline cplx compute_Rk(int k, const HierarchyStore& st, size_t node) {
    if (k < 1) throw Error(ErrorKind::MissingLowerOrder, "R_k is defined for k >= 1");
    if (k - 1 > st.orders()) throw Error(ErrorKind::MissingLowerOrder, "lower orders not stored");
    auto d = node_thirds(st, node, k - 1);
    std::vector<cplx> g(k);
    for (int j = 0; j < k; ++j) g[j] = st.members[j].jet[node][0];
    return compute_Rk(k, g, d);
}

inline std::vector<NormRow> compute_norms(const HierarchyStore& st, const std::vector<Leg>& legs = {}) {
    const int K = st.orders();
    std::vector<NormRow> rows(K + 1);
    for (int k = 0; k <= K; ++k) rows[k].k = k;
    for (size_t i = 0; i < st.nodes.size(); ++i) {
        if (!legs.empty() && std::find(legs.begin(), legs.end(), st.nodes[i].leg) == legs.end()) continue;
        auto d = node_thirds(st, i, K);
        double r = std::abs(st.nodes[i].eta);
        for (int k = 0; k <= K; ++k) {
            const Jet3& j = st.members[k].jet[i];
            rows[k].eta32_g = std::max(rows[k].eta32_g, std::pow(r, 1.5) * std::abs(j[0]));
            rows[k].eta52_g1 = std::max(rows[k].eta52_g1, std::pow(r, 2.5) * std::abs(j[1]));
            rows[k].g3 = std::max(rows[k].g3, std::abs(d[k]));
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------------------------

namespace detail {

// Node layout of the annulus grid; returns per-segment legs.
inline std::vector<Leg> build_annulus_grid(HierarchyStore& st) {
    const auto& c = st.cfg;
    const auto& ac = c.approach;
    const double th = approach_ray_angle(c.target, ac);
    const double rt = std::abs(c.target), sc = singular_scale(c.target);
    const cplx ray_end = std::polar(rt, th);
    const cplx u = (ray_end - c.target) / std::abs(ray_end - c.target);
    const cplx p1 = c.target + c.residual_radius * sc * u, p2 = c.target + c.inner_radius * sc * u;

    const double LA = ac.r_far - ac.r0, LB = ac.r0 * std::abs(th), LC = rt - ac.r0;
    const int nD1 = std::max(8, static_cast<int>(0.15 * c.nodes)), nD2 = std::max(4, static_cast<int>(0.05 * c.nodes));
    const int rest = std::max(12, c.nodes - 1 - nD1 - nD2);
    const double Ltot = LA + LB + LC;
    const int nA = std::max(4, static_cast<int>(std::lround(rest * LA / Ltot)));
    const int nB = std::max(4, static_cast<int>(std::lround(rest * LB / Ltot)));
    const int nC = std::max(4, rest - nA - nB);

    st.grid = PathSpec{};
    st.grid.add(Segment::line(ac.r_far, ac.r0, nA));
    st.grid.add(Segment::arc(0.0, ac.r0, 0.0, th, nB));
    st.grid.line_to(ray_end, nC);
    st.grid.line_to(p1, nD1);
    st.grid.line_to(p2, nD2);

    // spur E from the ray end outward so that exp(-icη^{9/4}) decays by spur_gain e-folds
    const double sfac = kWkbRate * std::abs(std::sin(2.25 * th));
    const double s_rt = sfac * std::pow(rt, 2.25);
    const double R_big = std::max(std::pow((s_rt + c.spur_gain) / sfac, 4.0 / 9), ac.r_far);
    st.spur = PathSpec{};
    st.spur.add(Segment::line(ray_end, std::polar(R_big, th)));

    st.node_r0 = static_cast<size_t>(nA + nB);
    st.node_rt = st.node_r0 + nC;
    st.node_residual = st.node_rt + nD1;
    return {Leg::A, Leg::B, Leg::C, Leg::D, Leg::D};
}

}  // namespace detail

// Grid, G₀ on every node and (annulus) the G₀ jet at the spur end.
inline HierarchyStore init_hierarchy(const HierarchyConfig& cfg) {
    cfg.validate();
    HierarchyStore st;
    st.cfg = cfg;
    std::vector<Leg> legs;
    if (cfg.kind == GridKind::Ray) {
        st.grid.add(Segment::line(cfg.ray_start, cfg.ray_end, cfg.nodes - 1));
        legs = {Leg::Ray};
    } else {
        legs = detail::build_annulus_grid(st);
    }
    auto start = farfield_jets(0, st.grid.start(), cfg.approach.m_init);
    Trajectory t = cointegrate_hierarchy(start, st.grid, cfg.integrator);
    detail::require_path_end(t, "G0 trace along the grid");
    GridFunction g0;
    for (const Sample* s : t.nodes()) {
        st.nodes.push_back({s->z, s->s, legs[s->segment]});
        g0.jet.push_back({s->y[0], s->y[1], s->y[2]});
    }
    st.members.push_back(std::move(g0));
    st.gamma.push_back(0.0);
    st.junction_residual.push_back(0.0);
    st.junction_scale.push_back(0.0);
    if (cfg.kind == GridKind::Annulus) {
        if (st.node_residual >= st.nodes.size()) throw Error(ErrorKind::InternalInconsistency, "node layout mismatch");
        Trajectory e = cointegrate_hierarchy({st.members[0].jet[st.node_rt]}, st.spur, cfg.integrator, Record::EndOnly);
        detail::require_path_end(e, "G0 trace along the spur");
        st.g0_spur_end = {e.back().y[0], e.back().y[1], e.back().y[2]};
    }
    st.norms = compute_norms(st);
    return st;
}

// Adds order k = orders()+1 to the store. source_scale multiplies R_k (and its anchor).
inline const GridFunction& solve_gk(int k, HierarchyStore& st, double source_scale = 1.0) {
    if (k != st.orders() + 1) throw Error(ErrorKind::MissingLowerOrder, "orders must be added in sequence");
    const auto& cfg = st.cfg;
    GridFunction gk;
    gk.k = k;
    gk.jet.resize(st.nodes.size());
    auto take = [&](const Sample* s, size_t node) {
        gk.jet[node] = {s->y[3 * k], s->y[3 * k + 1], s->y[3 * k + 2]};
    };

    if (cfg.kind == GridKind::Ray) {
        auto start = farfield_jets(k, st.grid.start(), cfg.anchor_mmax, source_scale);
        start[0] = farfield_jets(0, st.grid.start(), cfg.approach.m_init)[0];
        Trajectory t = cointegrate_hierarchy(start, st.grid, cfg.integrator, Record::NodesOnly, source_scale);
        gk.tolerances_met = t.termination == Termination::PathEnd;
        detail::require_path_end(t, "hierarchy co-integration");
        auto ns = t.nodes();
        for (size_t i = 0; i < ns.size(); ++i) take(ns[i], i);
        st.gamma.push_back(0.0);
        st.junction_residual.push_back(0.0);
    } else {
        // legs A, B
        PathSpec ab;
        ab.add(st.grid.segments[0]).add(st.grid.segments[1]);
        auto start = farfield_jets(k, ab.start(), cfg.anchor_mmax, source_scale);
        start[0] = farfield_jets(0, ab.start(), cfg.approach.m_init)[0];
        Trajectory tab = cointegrate_hierarchy(start, ab, cfg.integrator, Record::NodesOnly, source_scale);
        detail::require_path_end(tab, "legs A/B");
        auto nab = tab.nodes();
        if (nab.size() != st.node_r0 + 1) throw Error(ErrorKind::InternalInconsistency, "A/B node count");
        for (size_t i = 0; i < nab.size(); ++i) take(nab[i], i);
        const Jet3 target = gk.jet[st.node_r0];

        // inward shot E ∪ C
        PathSpec shot = st.spur.reversed();
        Segment c_in = st.grid.segments[2];
        std::swap(c_in.start, c_in.end);
        shot.add(c_in);
        const cplx far = shot.start();
        std::vector<cplx> y(st.g0_spur_end.begin(), st.g0_spur_end.end());
        for (int j = 1; j <= k; ++j) {
            Jet3 s = detail::anchor_jet(j, far, cfg.anchor_mmax);
            if (j == k)
                for (auto& v : s) v *= source_scale;
            Jet3 h = detail::decaying_mode_jet(j, far);
            y.insert(y.end(), s.begin(), s.end());
            y.insert(y.end(), h.begin(), h.end());
        }
        detail::ShotSystem sys(k, st.gamma, source_scale);
        Trajectory ts = integrate_path(sys, shot, y, cfg.integrator, Record::NodesOnly);
        detail::require_path_end(ts, "inward shot");
        auto nc = ts.nodes();
        const size_t nC = st.node_rt - st.node_r0;
        if (nc.size() != nC + 1) throw Error(ErrorKind::InternalInconsistency, "C node count");
        const size_t off = 3 + 6 * (k - 1);
        const Sample& end = *nc.back();
        // γ_k from the three jet components, each weighted by its own magnitude
        cplx num = 0;
        double den = 0;
        for (int i = 0; i < 3; ++i) {
            cplx S = end.y[off + i], h = end.y[off + 3 + i];
            double w = 1.0 / std::max(std::abs(target[i]), 1e-300);
            num += w * w * std::conj(h) * (S - target[i]);
            den += w * w * std::norm(h);
        }
        if (!(den > 0)) throw Error(ErrorKind::IllConditionedFit, "homogeneous shot vanished at the junction");
        const cplx gam = num / den;
        double res = 0, canc = 0;
        for (int i = 0; i < 3; ++i) {
            cplx v = end.y[off + i] - gam * end.y[off + 3 + i];
            res = std::max(res, std::abs(v - target[i]) / std::abs(target[i]));
            canc = std::max(canc, std::abs(gam * end.y[off + 3 + i]) / std::abs(target[i]));
        }
        // nodes in the shot run from r_t down to r0
        for (size_t i = 0; i < nc.size(); ++i) {
            size_t node = st.node_rt - i;
            const auto& yy = nc[i]->y;
            if (node == st.node_r0) continue;  // keep the A/B value at the shared node
            for (int c = 0; c < 3; ++c) gk.jet[node][c] = yy[off + c] - gam * yy[off + 3 + c];
        }
        st.gamma.push_back(gam);
        st.junction_residual.push_back(res);
        st.junction_scale.push_back(canc);

        // leg D
        PathSpec dleg;
        dleg.add(st.grid.segments[3]).add(st.grid.segments[4]);
        std::vector<Jet3> dstart = node_jets(st, st.node_rt, k - 1);
        dstart.push_back(gk.jet[st.node_rt]);
        Trajectory td = cointegrate_hierarchy(dstart, dleg, cfg.integrator, Record::NodesOnly, source_scale);
        detail::require_path_end(td, "leg D");
        auto nd = td.nodes();
        if (st.node_rt + nd.size() != st.nodes.size()) throw Error(ErrorKind::InternalInconsistency, "D node count");
        for (size_t i = 1; i < nd.size(); ++i) take(nd[i], st.node_rt + i);
        // the mismatch cannot drop below rounding of the cancelled terms
        gk.tolerances_met = res <= 1e3 * cfg.integrator.rel_tol * std::max(1.0, canc);
    }
    st.members.push_back(std::move(gk));
    st.norms = compute_norms(st);
    return st.members.back();
}

inline HierarchyStore solve_hierarchy(const HierarchyConfig& cfg) {
    HierarchyStore st = init_hierarchy(cfg);
    for (int k = 1; k <= cfg.N; ++k) solve_gk(k, st);
    return st;
}

// Annulus configuration around the singularity located near lattice member n_hat.
inline HierarchyConfig annulus_config(cplx eta_hat, int N = 12, int nodes = 2000) {
    HierarchyConfig c;
    c.kind = GridKind::Annulus;
    c.target = eta_hat;
    c.N = N;
    c.nodes = nodes;
    return c;
}

// ---------------------------------------------------------------------------------------------

inline cplx partial_sum(const HierarchyStore& st, size_t node, cplx tau, int N) {
    auto jets = node_jets(st, node, N);
    cplx acc = 0, pw = 1;
    for (int k = 0; k <= N; ++k, pw *= tau) acc += pw * jets[k][0];
    return acc;
}

// |-G/9 - (2/9)ηG' + (7/9)τG_τ + (τ/2)G³ - G³G'''| for the truncated series at a node.
inline double pde_residual(const HierarchyStore& st, size_t node, cplx tau, int N) {
    auto jets = node_jets(st, node, N);
    auto d = node_thirds(st, node, N);
    const cplx eta = st.nodes[node].eta;
    cplx G = 0, G1 = 0, G3 = 0, tGt = 0, pw = 1;
    for (int k = 0; k <= N; ++k, pw *= tau) {
        G += pw * jets[k][0];
        G1 += pw * jets[k][1];
        G3 += pw * d[k];
        tGt += double(k) * pw * jets[k][0];
    }
    cplx G3c = G * G * G;
    return std::abs(-G / 9.0 - 2.0 / 9.0 * eta * G1 + 7.0 / 9.0 * tGt + tau / 2.0 * G3c - G3c * G3);
}

struct NormReport {
    std::vector<NormRow> rows;
    std::vector<double> root;  // (‖η^{3/2}G_k‖ k³)^{1/k}
    double A = 0, B = 0, fit_rms = 0;
    int k_min = 2, k_max = 0;
};

// Least squares of log(‖η^{3/2}G_k‖ k³) = log B + k log A over k in [k_min, k_max].
inline NormReport norm_report(const HierarchyStore& st, int k_min = 2, int k_max = -1,
                              const std::vector<Leg>& legs = {}) {
    NormReport r;
    r.rows = legs.empty() && !st.norms.empty() ? st.norms : compute_norms(st, legs);
    if (k_max < 0) k_max = st.orders();
    r.k_min = k_min;
    r.k_max = k_max;
    r.root.assign(r.rows.size(), 0.0);
    for (size_t k = 1; k < r.rows.size(); ++k)
        r.root[k] = std::pow(r.rows[k].eta32_g * std::pow(double(k), 3), 1.0 / k);
    if (k_max - k_min >= 1) {
        std::vector<double> x, y;
        for (int k = k_min; k <= k_max; ++k) {
            x.push_back(k);
            y.push_back(std::log(r.rows[k].eta32_g * std::pow(double(k), 3)));
        }
        auto f = fit_line(x, y);
        r.A = std::exp(f.slope);
        r.B = std::exp(f.intercept);
        r.fit_rms = f.rms;
    }
    return r;
}

// Re-integrates orders 0..K from a grid node along `path` (circles for winding checks etc.).
inline Trajectory continue_hierarchy(const HierarchyStore& st, size_t node, const PathSpec& path, int K,
                                     Record record = Record::NodesOnly) {
    if (std::abs(path.start() - st.nodes.at(node).eta) > 1e-12 * (1 + std::abs(path.start())))
        throw Error(ErrorKind::InvalidPath, "path does not start at the node");
    return cointegrate_hierarchy(node_jets(st, node, K), path, st.cfg.integrator, record);
}

}  // namespace singtrack
