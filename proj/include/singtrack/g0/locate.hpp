#pragma once

// Singularity refinement for G₀ and the constant-coefficient normal form check.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "singtrack/core/cubic.hpp"
#include "singtrack/core/linalg.hpp"
#include "singtrack/g0/g0.hpp"

namespace singtrack {

// Samples of a function near an algebraic branch point. `dir` fixes the branch of
// (z - η̂)^p: arguments are measured from dir, so samples must avoid the opposite ray.
struct BranchSamples {
    std::vector<cplx> z, g;
    cplx dir{1.0, 0.0};
};

struct BranchFit {
    cplx K{}, eta_s{}, b{}, p{};
    double rms = 0;        // RMS of |g - model| / |z - η̂|^{Re p}
    double p_stderr = 0;   // standard error of Re p (free-exponent fits only)
    int iterations = 0;
};

struct BranchFitConfig {
    bool free_exponent = false;
    bool correction = true;  // include the b·w² term
    int max_iter = 100;
    double tol = 1e-15;
};

namespace detail {

inline cplx branch_log(cplx x, cplx dir) {
    return cplx(std::log(std::abs(x)), std::arg(dir) + std::arg(x / dir));
}

struct BranchModel {
    cplx m, dK, deta, db, dp, w;
};

inline BranchModel branch_model(cplx z, cplx K, cplx eta_s, cplx b, cplx p, cplx dir) {
    cplx x = z - eta_s;
    cplx L = branch_log(x, dir);
    cplx w = std::exp(p * L);
    cplx dmdw = K * (1.0 + 2.0 * b * w);
    return {K * w * (1.0 + b * w), w * (1.0 + b * w), -dmdw * p * w / x, K * w * w, dmdw * L * w, w};
}

}  // namespace detail

// Gauss-Newton for g ≈ K w (1 + b w), w = (z - η̂)^p, weighted by 1/|w|.
inline BranchFit fit_branch_point(const BranchSamples& data, cplx eta_guess, double p0,
                                  const BranchFitConfig& cfg = {}) {
    const int n = static_cast<int>(data.z.size());
    const int np = 2 + (cfg.correction ? 1 : 0) + (cfg.free_exponent ? 1 : 0);
    if (n < 2 * np) throw Error(ErrorKind::IllConditionedFit, "too few samples for the branch fit");

    std::array<cplx, 4> th{0.0, eta_guess, 0.0, p0};  // K, η̂, b, p
    {
        cplx s = 0;
        for (int i = 0; i < n; ++i) s += data.g[i] / std::exp(p0 * detail::branch_log(data.z[i] - eta_guess, data.dir));
        th[0] = s / double(n);
    }
    auto residuals = [&](const std::array<cplx, 4>& t, std::vector<cplx>& r, CMatrix* J) {
        double cost = 0;
        for (int i = 0; i < n; ++i) {
            auto bm = detail::branch_model(data.z[i], t[0], t[1], t[2], t[3], data.dir);
            double wt = 1.0 / std::abs(bm.w);
            r[i] = wt * (data.g[i] - bm.m);
            cost += std::norm(r[i]);
            if (J) {
                int c = 0;
                (*J)(i, c++) = wt * bm.dK;
                (*J)(i, c++) = wt * bm.deta;
                if (cfg.correction) (*J)(i, c++) = wt * bm.db;
                if (cfg.free_exponent) (*J)(i, c++) = wt * bm.dp;
            }
        }
        return cost;
    };

    std::vector<cplx> r(n), rt(n);
    CMatrix J(n, np);
    BranchFit out;
    double cost = residuals(th, r, &J);
    for (int it = 0; it < cfg.max_iter; ++it) {
        out.iterations = it + 1;
        auto d = least_squares(J, r);
        auto apply = [&](double lam) {
            auto t = th;
            int c = 0;
            t[0] += lam * d[c++];
            t[1] += lam * d[c++];
            if (cfg.correction) t[2] += lam * d[c++];
            if (cfg.free_exponent) t[3] += lam * d[c++];
            return t;
        };
        double lam = 1.0;
        std::array<cplx, 4> trial;
        double tc = 0;
        for (;;) {
            trial = apply(lam);
            tc = residuals(trial, rt, nullptr);
            if (std::isfinite(tc) && tc <= cost) break;
            lam *= 0.5;
            if (lam < 1e-6) break;
        }
        if (!std::isfinite(tc)) throw Error(ErrorKind::FitDiverged, "branch fit produced non-finite residuals");
        double step = std::abs(lam * d[1]) / (1 + std::abs(th[1]));
        bool improved = tc <= cost;
        if (improved) {
            th = trial;
            cost = residuals(th, r, &J);
        }
        if (!improved || step < cfg.tol || cost == 0) break;
        if (it + 1 == cfg.max_iter) throw Error(ErrorKind::FitDiverged, "branch fit did not converge");
    }
    out.K = th[0];
    out.eta_s = th[1];
    out.b = th[2];
    out.p = th[3];
    out.rms = std::sqrt(cost / n);
    if (cfg.free_exponent && n > np) {
        // var(p) from (J^H J)^{-1} scaled by the residual variance
        CMatrix N(np, np);
        for (int a = 0; a < np; ++a)
            for (int c = 0; c < np; ++c) {
                cplx s = 0;
                for (int k = 0; k < n; ++k) s += std::conj(J(k, a)) * J(k, c);
                N(a, c) = s;
            }
        std::vector<cplx> e(np, 0.0);
        e[np - 1] = 1.0;
        try {
            auto col = solve_linear(N, e);
            out.p_stderr = std::sqrt(std::abs(col[np - 1].real()) * cost / (n - np));
        } catch (const Error&) {
            out.p_stderr = INFINITY;
        }
    }
    return out;
}

struct SingularityEstimate {
    cplx eta_hat_s{};
    cplx local_amplitude{};
    double branch_order = 0;
    double branch_order_stderr = 0;
    double fit_residual = 0;  // RMS |G₀ - model|/|η-η̂|^{2/3}
    cplx correction{};        // b in K w (1 + b w)
    cplx seed{};
    int refine_steps = 0;
    size_t n_samples = 0;
    RayTrace approach;        // trace from far field to the first refinement point
};

struct LocateConfig {
    ApproachConfig approach{};
    IntegratorConfig integrator{1e-12, 1e-14, 0.05, 1e-13, 5'000'000};
    // fit annulus radii in units of |η_s|^{-5/4}
    double rho_min = 0.002;
    double rho_max = 0.01;
    int nodes_per_piece = 16;
    int max_refine = 40;
    double basin_radius = 3.0;  // allowed |η̂ - seed| in units of |η_s|^{-5/4}
};

inline double singular_scale(cplx eta_s) { return std::pow(std::abs(eta_s), -1.25); }

// Branch-point estimate from a jet: for G ≈ K x^p, x = 1/(G'/G - G''/G').
inline cplx jet_offset(const Jet3& j) { return 1.0 / (j[1] / j[0] - j[2] / j[1]); }

// Samples of y[0] on a partial annulus around eta0 (ρ ∈ [r_min, r_max], |arg - arg u| ≤ 2π/3),
// continued from (z0, y0), which must lie within r_min of eta0.
template <class System>
BranchSamples sample_partial_annulus_with(const System& sys, cplx z0, std::vector<cplx> y, cplx eta0, cplx u,
                                          double r_min, double r_max, int nodes, const IntegratorConfig& cfg) {
    const double phi = std::arg(u), span = 2 * std::numbers::pi / 3;
    BranchSamples out;
    out.dir = u;
    auto collect = [&](const Trajectory& tr, bool skip_first) {
        bool first = true;
        for (const auto& s : tr.samples) {
            if (!s.node) continue;
            if (first && skip_first) {
                first = false;
                continue;
            }
            first = false;
            out.z.push_back(s.z);
            out.g.push_back(s.y[0]);
        }
    };
    auto run = [&](const PathSpec& p, const std::vector<cplx>& y0) {
        auto tr = integrate_path(sys, p, y0, cfg, Record::NodesOnly);
        if (tr.termination != Termination::PathEnd)
            throw Error(ErrorKind::FitDiverged, "sampling path hit " + std::string(to_string(tr.termination)));
        return tr;
    };
    cplx a0 = eta0 + r_min * u, a1 = eta0 + r_max * u;
    PathSpec lead;
    lead.add(Segment::line(z0, a0));
    if (std::abs(a0 - z0) > 0) y = run(lead, y).back().y;

    PathSpec radial;
    radial.add(Segment::line(a0, a1, nodes));
    auto tr_rad = run(radial, y);
    collect(tr_rad, false);
    for (double sgn : {1.0, -1.0}) {
        PathSpec outer, inner;
        outer.add(Segment::arc(eta0, r_max, phi, phi + sgn * span, nodes));
        inner.add(Segment::arc(eta0, r_min, phi, phi + sgn * span, nodes));
        collect(run(outer, tr_rad.back().y), true);
        collect(run(inner, y), true);
    }
    return out;
}

inline BranchSamples sample_partial_annulus(const G0State& from, cplx eta0, cplx u, double r_min, double r_max,
                                            int nodes, const IntegratorConfig& cfg) {
    return sample_partial_annulus_with(G0System{}, from.eta, {from.jet[0], from.jet[1], from.jet[2]}, eta0, u, r_min,
                                       r_max, nodes, cfg);
}

inline SingularityEstimate locate_singularity(cplx seed, const LocateConfig& cfg = {}) {
    cfg.integrator.validate();
    const double scale = singular_scale(seed);
    SingularityEstimate est;
    est.seed = seed;
    TraceOptions opt;
    opt.record = Record::EndOnly;
    est.approach = trace_g0(approach_path(seed, cfg.approach), cfg.approach.m_init, cfg.integrator, opt,
                            cfg.approach.r_far);
    G0State st = est.approach.back();

    cplx x = jet_offset(st.jet);
    for (int it = 0;; ++it) {
        if (!std::isfinite(std::abs(x))) throw Error(ErrorKind::FitDiverged, "non-finite branch offset estimate");
        if (std::abs(st.eta - x - seed) > cfg.basin_radius * scale)
            throw Error(ErrorKind::BasinEscape, "refinement left the basin of the seed");
        if (std::abs(x) < 0.5 * cfg.rho_min * scale) break;
        if (it == cfg.max_refine) throw Error(ErrorKind::FitDiverged, "jet refinement did not settle");
        PathSpec step;
        step.add(Segment::line(st.eta, st.eta - 0.9 * x));
        auto tr = continue_g0(st, step, cfg.integrator, opt);
        st = tr.back();
        x = jet_offset(st.jet);
        est.refine_steps = it + 1;
    }

    cplx eta0 = st.eta - x;
    cplx u = x / std::abs(x);
    auto data = sample_partial_annulus(st, eta0, u, cfg.rho_min * scale, cfg.rho_max * scale, cfg.nodes_per_piece,
                                       cfg.integrator);
    est.n_samples = data.z.size();
    auto fixed = fit_branch_point(data, eta0, 2.0 / 3);
    BranchFitConfig fc;
    fc.free_exponent = true;
    auto free = fit_branch_point(data, fixed.eta_s, 2.0 / 3, fc);
    est.eta_hat_s = fixed.eta_s;
    est.local_amplitude = fixed.K;
    est.correction = fixed.b;
    est.fit_residual = fixed.rms;
    est.branch_order = free.p.real();
    est.branch_order_stderr = free.p_stderr;
    if (std::abs(est.eta_hat_s - seed) > cfg.basin_radius * scale)
        throw Error(ErrorKind::BasinEscape, "fitted singularity outside the basin of the seed");
    return est;
}

// Eigenvalues of [[0, -32/729, 0], [1, 0, 0], [0, 1, 0]]: roots of λ³ + (32/729)λ, sorted by Im.
inline std::array<cplx, 3> normal_form_eigenvalues() {
    auto r = solve_depressed_cubic(32.0 / 729, 0.0);
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
    return r;
}

}  // namespace singtrack
