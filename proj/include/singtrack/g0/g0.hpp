#pragma once

// Leading-order solution G₀: (1/9)G₀ + (2/9)ηG₀' + G₀³G₀''' = 0, G₀ ~ η^{-1/2} in the sector.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "singtrack/core/ode.hpp"
#include "singtrack/series/farfield.hpp"

namespace singtrack {

inline constexpr double kSectorHalfAngle = 4 * std::numbers::pi / 9;

// Far-field table shared by the solvers; immutable after first use.
inline const CoeffTable& default_table() {
    static const CoeffTable t = compute_farfield_table(16, 10);
    return t;
}

struct G0State {
    cplx eta{};
    Jet3 jet{};  // G₀, G₀', G₀''
};

inline cplx g0_third(cplx eta, cplx g, cplx g1, double floor = 0.0) {
    if (!(std::abs(g) > floor)) throw Error(ErrorKind::SingularityFloor, "G0 at or below the singularity floor");
    return -(g / 9.0 + 2.0 * eta * g1 / 9.0) / (g * g * g);
}

inline Jet3 g0_rhs(const G0State& st, double floor = 0.0) {
    return {st.jet[1], st.jet[2], g0_third(st.eta, st.jet[0], st.jet[1], floor)};
}

struct G0System {
    void operator()(cplx z, const std::vector<cplx>& y, std::vector<cplx>& dy) const {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = g0_third(z, y[0], y[1]);
    }
};

enum class TraceEnd { PathEnd, SingularityFloor, StepUnderflow, MaxSteps };

inline const char* to_string(TraceEnd t) {
    switch (t) {
    case TraceEnd::PathEnd: return "path-end";
    case TraceEnd::SingularityFloor: return "singularity-floor";
    case TraceEnd::StepUnderflow: return "step-underflow";
    case TraceEnd::MaxSteps: return "max-steps";
    }
    return "?";
}

struct RayTrace {
    PathSpec path;
    std::vector<double> s;
    std::vector<G0State> samples;
    TraceEnd terminated_by = TraceEnd::PathEnd;
    bool sector_violation = false;
    std::string note;

    const G0State& back() const { return samples.back(); }
};

struct TraceOptions {
    double floor_rel = 1e-3;  // stop when |G₀| < floor_rel·|η|^{-1/2}
    Record record = Record::All;
};

inline bool in_sector(cplx eta) { return std::abs(std::arg(eta)) < kSectorHalfAngle; }

template <class System>
RayTrace trace_system(const System& sys, const G0State& start, const PathSpec& path, const IntegratorConfig& cfg,
                      const TraceOptions& opt) {
    if (std::abs(path.start() - start.eta) > 1e-12 * (1 + std::abs(start.eta)))
        throw Error(ErrorKind::InvalidPath, "path does not start at the initial state");
    auto stop = [&](cplx z, const std::vector<cplx>& y) {
        return std::abs(y[0]) < opt.floor_rel / std::sqrt(std::abs(z));
    };
    Trajectory tr = integrate_path(sys, path, {start.jet[0], start.jet[1], start.jet[2]}, cfg, stop, opt.record);
    RayTrace out;
    out.path = path;
    for (const auto& smp : tr.samples) {
        out.s.push_back(smp.s);
        out.samples.push_back({smp.z, {smp.y[0], smp.y[1], smp.y[2]}});
        if (!in_sector(smp.z)) out.sector_violation = true;
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

// Continue G₀ from a known jet along a path starting at start.eta.
inline RayTrace continue_g0(const G0State& start, const PathSpec& path, const IntegratorConfig& cfg,
                            const TraceOptions& opt = {}) {
    return trace_system(G0System{}, start, path, cfg, opt);
}

inline G0State farfield_g0_state(cplx eta, int m_init) {
    return {eta, gk_farfield_eval(0, eta, m_init, default_table())};
}

// Trace from far-field data at the path start (|η| >= r_far).
inline RayTrace trace_g0(const PathSpec& path, int m_init, const IntegratorConfig& cfg, const TraceOptions& opt = {},
                         double r_far = 20.0) {
    path.validate();
    cplx a = path.start();
    if (std::abs(a) < r_far * (1 - 1e-12))
        throw Error(ErrorKind::ConfigInvalid, "trace must start at |eta| >= R_far");
    if (!in_sector(a)) throw Error(ErrorKind::ConfigInvalid, "trace must start inside the sector");
    return continue_g0(farfield_g0_state(a, m_init), path, cfg, opt);
}

// Detour used to reach points near the lower anti-Stokes line: inward along the real
// axis, across the Stokes line on a small arc, then outward along a ray just inside the sector.
struct ApproachConfig {
    double r_far = 20.0;
    double r0 = 5.0;
    double delta = 0.01;  // ray angle offset from the sector boundary
    int m_init = 8;
};

inline double approach_ray_angle(cplx target, const ApproachConfig& ac) {
    double lim = kSectorHalfAngle - ac.delta;
    return std::clamp(std::arg(target), -lim, lim);
}

inline PathSpec approach_path(cplx target, const ApproachConfig& ac = {}) {
    double th = approach_ray_angle(target, ac);
    double rt = std::abs(target);
    PathSpec p;
    p.add(Segment::line(ac.r_far, ac.r0));
    p.add(Segment::arc(0.0, ac.r0, 0.0, th));
    cplx ray_end = std::polar(rt, th);
    if (rt > ac.r0) p.line_to(ray_end);
    if (std::abs(target - p.end()) > 0) p.line_to(target);
    return p;
}

struct G0NormBounds {
    double sup_eta_half_g0 = 0;     // sup |η^{1/2} G₀|
    double sup_eta_7half_g0pp = 0;  // sup |η^{7/2} G₀'''|
};

inline G0NormBounds g0_norms(const RayTrace& tr) {
    G0NormBounds b;
    for (const auto& st : tr.samples) {
        b.sup_eta_half_g0 = std::max(b.sup_eta_half_g0, std::abs(std::sqrt(st.eta) * st.jet[0]));
        cplx g3 = g0_third(st.eta, st.jet[0], st.jet[1]);
        b.sup_eta_7half_g0pp = std::max(b.sup_eta_7half_g0pp, std::pow(std::abs(st.eta), 3.5) * std::abs(g3));
    }
    return b;
}

}  // namespace singtrack
