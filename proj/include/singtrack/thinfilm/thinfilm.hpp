#pragma once

// Thin-film leading-order profile F₀:
//   F³F''' − (6/η³)F⁴ − (η⁴/112)F + (6/η²)F³F' − (3/η)F³F'' + η⁴/112 = 0,
// F₀ → 1 in the far field, with movable zeros of type (η − η_s)^{3/4}.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "singtrack/g0/g0.hpp"
#include "singtrack/g0/locate.hpp"
#include "singtrack/series/rational.hpp"

namespace singtrack {

// Same layout as G0State: eta and the jet (F₀, F₀', F₀'').
using F0State = G0State;

inline constexpr const char* kThinFilmTag = "thinfilm";

// LHS of the ODE for a full jet (F, F', F'', F''').
inline cplx f0_residual(cplx eta, cplx F, cplx F1, cplx F2, cplx F3) {
    cplx e2 = eta * eta, e3 = e2 * eta, e4 = e2 * e2, c = F * F * F;
    return c * F3 - 6.0 * c * F / e3 - e4 / 112.0 * F + 6.0 / e2 * c * F1 - 3.0 / eta * c * F2 + e4 / 112.0;
}

inline cplx f0_third(cplx eta, cplx F, cplx F1, cplx F2, double floor = 0.0) {
    if (eta == cplx(0)) throw Error(ErrorKind::OriginSingular, "thin-film ODE is singular at eta = 0");
    if (!(std::abs(F) > floor)) throw Error(ErrorKind::SingularityFloor, "F0 at or below the singularity floor");
    cplx e2 = eta * eta, e4 = e2 * e2, c = F * F * F;
    return (6.0 * c * F / (e2 * eta) + e4 / 112.0 * (F - 1.0) - 6.0 / e2 * c * F1 + 3.0 / eta * c * F2) / c;
}

inline Jet3 f0_rhs(const F0State& st, double floor = 0.0) {
    return {st.jet[1], st.jet[2], f0_third(st.eta, st.jet[0], st.jet[1], st.jet[2], floor)};
}

struct F0System {
    void operator()(cplx z, const std::vector<cplx>& y, std::vector<cplx>& dy) const {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = f0_third(z, y[0], y[1], y[2]);
    }
};

// ---------------------------------------------------------------------------------------------
// Far field: F₀ = Σ a_n x^n, x = η^{-7}. Substituting gives
//   a_{n+1} = 112 [x^n](F³ Σ D(m) a_m x^m − 6F⁴),  D(m) = −7m(7m+1)(7m+2) − 42m − 21m(7m+1),
// so a_1 = −672. The series is asymptotic (a_n grows factorially).

inline std::vector<Rational> f0_farfield_coeffs(int M) {
    if (M < 0) throw Error(ErrorKind::ConfigInvalid, "negative far-field order");
    std::vector<Rational> a{Rational(1)};
    auto mul = [](const std::vector<Rational>& p, const std::vector<Rational>& q, size_t n) {
        std::vector<Rational> r(n + 1, Rational(0));
        for (size_t i = 0; i <= n && i < p.size(); ++i)
            for (size_t j = 0; i + j <= n && j < q.size(); ++j) r[i + j] += p[i] * q[j];
        return r;
    };
    for (int n = 0; n < M; ++n) {
        std::vector<Rational> S(n + 1);
        for (int m = 0; m <= n; ++m) {
            long long D = -7LL * m * (7 * m + 1) * (7 * m + 2) - 42LL * m - 21LL * m * (7 * m + 1);
            S[m] = Rational(D) * a[m];
        }
        auto F2 = mul(a, a, n), F3 = mul(F2, a, n), F4 = mul(F3, a, n), T = mul(F3, S, n);
        a.push_back(112 * (T[n] - 6 * F4[n]));
    }
    return a;
}

inline const std::vector<double>& f0_farfield_table() {
    static const std::vector<double> t = [] {
        std::vector<double> d;
        for (const auto& r : f0_farfield_coeffs(16)) d.push_back(to_double(r));
        return d;
    }();
    return t;
}

// m_terms = 0 truncates at the smallest term (optimal truncation, capped at 16).
inline F0State farfield_f0_state(cplx eta, int m_terms = 0) {
    const auto& a = f0_farfield_table();
    if (m_terms < 0 || m_terms >= int(a.size())) throw Error(ErrorKind::ConfigInvalid, "far-field order out of range");
    if (eta == cplx(0)) throw Error(ErrorKind::OriginSingular, "far-field series at eta = 0");
    const cplx x = std::pow(eta, -7.0);
    Jet3 j{0.0, 0.0, 0.0};
    cplx xn = 1;
    double last = INFINITY;
    const int top = m_terms == 0 ? int(a.size()) - 1 : m_terms;
    for (int n = 0; n <= top; ++n, xn *= x) {
        double mag = std::abs(a[n] * xn);
        if (m_terms == 0 && n > 1 && mag > last) break;
        last = mag;
        j[0] += a[n] * xn;
        j[1] += a[n] * (-7.0 * n) * xn / eta;
        j[2] += a[n] * (7.0 * n) * (7.0 * n + 1) * xn / (eta * eta);
    }
    return {eta, j};
}

// Linear modes of F = 1 + f: f''' ≈ (η⁴/112) f, f ~ exp(λ ω^k η^{7/3}), λ = (3/7)·112^{-1/3}.
inline double f0_mode_rate() { return 3.0 / 7.0 * std::cbrt(1.0 / 112.0); }

// Worst-case growth of a perturbation carried from a to b (principal η^{7/3}).
inline double f0_amplification(cplx a, cplx b) {
    const cplx d = std::pow(b, 7.0 / 3) - std::pow(a, 7.0 / 3);
    double g = -INFINITY;
    for (int k = 0; k < 3; ++k) g = std::max(g, (f0_mode_rate() * std::polar(1.0, 2 * std::numbers::pi * k / 3) * d).real());
    return std::exp(g);
}

// Leading WKB jet (f, f', f'') of mode ω^k at η with f(η) = 1.
inline Jet3 f0_mode_jet(cplx eta, int k) {
    cplx mu = std::cbrt(1.0 / 112.0) * std::pow(eta, 4.0 / 3) * std::polar(1.0, 2 * std::numbers::pi * k / 3);
    return {1.0, mu, mu * mu + 4.0 / 3 * mu / eta};
}

// ---------------------------------------------------------------------------------------------

// Start on the positive real axis. Modes k = 1, 2 decay outward there and are not fixed by the
// far-field condition; family_amp puts A on mode 1 and conj(A) on mode 2 (real data for real A).
struct F0Start {
    double r_far = 12.0;
    int m_terms = 0;
    cplx family_amp{};

    void validate() const {
        if (!(r_far >= 8.0)) throw Error(ErrorKind::ConfigInvalid, "thin-film far-field start needs r_far >= 8");
    }
};

inline F0State f0_start_state(const F0Start& s) {
    s.validate();
    F0State st = farfield_f0_state(s.r_far, s.m_terms);
    Jet3 v1 = f0_mode_jet(s.r_far, 1), v2 = f0_mode_jet(s.r_far, 2);
    for (int i = 0; i < 3; ++i) st.jet[i] += s.family_amp * v1[i] + std::conj(s.family_amp) * v2[i];
    return st;
}

struct F0TraceConfig {
    IntegratorConfig integrator{};
    double floor = 1e-3;  // stop when |F₀| < floor
    Record record = Record::All;
};

inline RayTrace continue_f0(const F0State& start, const PathSpec& path, const F0TraceConfig& cfg = {}) {
    path.validate();
    cfg.integrator.validate();
    if (std::abs(path.start() - start.eta) > 1e-12 * (1 + std::abs(start.eta)))
        throw Error(ErrorKind::InvalidPath, "path does not start at the initial state");
    const double floor = cfg.floor;
    auto stop = [floor](cplx, const std::vector<cplx>& y) { return std::abs(y[0]) < floor; };
    Trajectory tr = integrate_path(F0System{}, path, {start.jet[0], start.jet[1], start.jet[2]}, cfg.integrator,
                                   stop, cfg.record);
    RayTrace out;
    out.path = path;
    for (const auto& smp : tr.samples) {
        out.s.push_back(smp.s);
        out.samples.push_back({smp.z, {smp.y[0], smp.y[1], smp.y[2]}});
    }
    switch (tr.termination) {
    case Termination::PathEnd: out.terminated_by = TraceEnd::PathEnd; break;
    case Termination::Stopped: out.terminated_by = TraceEnd::SingularityFloor; break;
    case Termination::StepUnderflow: out.terminated_by = TraceEnd::StepUnderflow; break;
    case Termination::MaxSteps: out.terminated_by = TraceEnd::MaxSteps; break;
    }
    out.note = tr.note;
    return out;
}

// Trace from far-field data at the path start; |start| must be at least r_far.
inline RayTrace trace_f0(const PathSpec& path, const F0TraceConfig& cfg = {}, double r_far = 12.0, int m_terms = 0) {
    path.validate();
    if (std::abs(path.start()) < r_far * (1 - 1e-12))
        throw Error(ErrorKind::ConfigInvalid, "thin-film trace must start at |eta| >= r_far");
    return continue_f0(farfield_f0_state(path.start(), m_terms), path, cfg);
}

// Integrated-form ODE residual per step: F_b − F_a against the two-point quintic Hermite rule
// for ∫F' with F'' and the ODE's F''' at both ends (rule error O(h⁷)), relative to max(1, |F|).
inline double max_f0_defect(const RayTrace& tr) {
    double worst = 0;
    for (size_t i = 0; i + 1 < tr.samples.size(); ++i) {
        const auto &a = tr.samples[i], &b = tr.samples[i + 1];
        cplx h = b.eta - a.eta;
        if (h == cplx(0)) continue;
        cplx ta = f0_third(a.eta, a.jet[0], a.jet[1], a.jet[2]), tb = f0_third(b.eta, b.jet[0], b.jet[1], b.jet[2]);
        cplx q = h / 2.0 * (a.jet[1] + b.jet[1]) + h * h / 10.0 * (a.jet[2] - b.jet[2]) + h * h * h / 120.0 * (ta + tb);
        double d = std::abs(b.jet[0] - a.jet[0] - q) / std::max({1.0, std::abs(a.jet[0]), std::abs(b.jet[0])});
        worst = std::max(worst, d);
    }
    return worst;
}

// ---------------------------------------------------------------------------------------------

struct F0LocateConfig {
    F0Start start{};
    IntegratorConfig integrator{1e-12, 1e-14, 0.05, 1e-13, 5'000'000};
    double rho_min = 2e-5;  // fit annulus, absolute radii
    double rho_max = 1e-4;
    int nodes_per_piece = 16;
    int max_refine = 40;
    double basin_radius = 0.5;
    double p0 = 0.75;  // initial exponent for the free fit
};

// Inward along the real axis to Re(seed), then straight to the seed, jet refinement, and
// a branch fit with free exponent. The location comes from the free-exponent fit.
inline SingularityEstimate locate_f0_singularity(cplx seed, const F0LocateConfig& cfg = {}) {
    cfg.integrator.validate();
    if (!(cfg.rho_min > 0 && cfg.rho_max > cfg.rho_min))
        throw Error(ErrorKind::ConfigInvalid, "need 0 < rho_min < rho_max");
    SingularityEstimate est;
    est.seed = seed;
    F0State st = f0_start_state(cfg.start);
    F0TraceConfig tc{cfg.integrator, 0.0, Record::EndOnly};
    PathSpec lead;
    const double xr = std::clamp(seed.real(), 0.5, cfg.start.r_far);
    if (xr < cfg.start.r_far) lead.add(Segment::line(cplx(cfg.start.r_far), cplx(xr)));
    if (std::abs(seed - xr) > 0) lead.add(Segment::line(cplx(xr), seed));
    if (!lead.segments.empty()) {
        est.approach = continue_f0(st, lead, tc);
        if (est.approach.terminated_by != TraceEnd::PathEnd)
            throw Error(ErrorKind::FitDiverged, "approach to the seed ended by " +
                                                    std::string(to_string(est.approach.terminated_by)));
        st = est.approach.back();
    } else {
        est.approach.samples.push_back(st);
    }

    cplx x = jet_offset(st.jet);
    for (int it = 0;; ++it) {
        if (!std::isfinite(std::abs(x))) throw Error(ErrorKind::FitDiverged, "non-finite branch offset estimate");
        if (std::abs(st.eta - x - seed) > cfg.basin_radius)
            throw Error(ErrorKind::BasinEscape, "refinement left the basin of the seed");
        if (std::abs(x) < 0.5 * cfg.rho_min) break;
        if (it == cfg.max_refine) throw Error(ErrorKind::FitDiverged, "jet refinement did not settle");
        PathSpec step;
        step.add(Segment::line(st.eta, st.eta - 0.9 * x));
        st = continue_f0(st, step, tc).back();
        x = jet_offset(st.jet);
        est.refine_steps = it + 1;
    }

    cplx eta0 = st.eta - x;
    cplx u = x / std::abs(x);
    auto data = sample_partial_annulus_with(F0System{}, st.eta, {st.jet[0], st.jet[1], st.jet[2]}, eta0, u,
                                            cfg.rho_min, cfg.rho_max, cfg.nodes_per_piece, cfg.integrator);
    est.n_samples = data.z.size();
    BranchFitConfig fc;
    fc.free_exponent = true;
    auto fit = fit_branch_point(data, eta0, cfg.p0, fc);
    est.eta_hat_s = fit.eta_s;
    est.local_amplitude = fit.K;
    est.correction = fit.b;
    est.fit_residual = fit.rms;
    est.branch_order = fit.p.real();
    est.branch_order_stderr = fit.p_stderr;
    if (std::abs(est.eta_hat_s - seed) > cfg.basin_radius)
        throw Error(ErrorKind::BasinEscape, "fitted singularity outside the basin of the seed");
    return est;
}

}  // namespace singtrack
