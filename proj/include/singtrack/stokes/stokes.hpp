#pragma once

// Characteristic cubic α³ + (2/9)χ^{5/2}α − χ^{3/2} = 0 of the scaled WKB problem, its labelled roots
// P_j', ascent flows in the χ and η planes, phase/amplitude quadratures, and sampled monotonicity
// certificates along the boundary of the WKB domain.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "singtrack/core/cubic.hpp"
#include "singtrack/core/ode.hpp"
#include "singtrack/g0/g0.hpp"

namespace singtrack {

namespace stokes_detail {
inline constexpr double pi = std::numbers::pi;
inline const double s29 = std::sqrt(2.0 / 9.0);
}  // namespace stokes_detail

// Cube roots of unity in mode order: ω₁ = e^{2πi/3}, ω₂ = e^{-2πi/3}, ω₃ = 1.
inline cplx omega(int j) {
    switch (j) {
    case 1: return std::polar(1.0, 2 * stokes_detail::pi / 3);
    case 2: return std::polar(1.0, -2 * stokes_detail::pi / 3);
    case 3: return 1.0;
    }
    throw Error(ErrorKind::ConfigInvalid, "mode index must be 1, 2 or 3");
}

inline void check_mode(int j) {
    if (j < 1 || j > 3) throw Error(ErrorKind::ConfigInvalid, "mode index must be 1, 2 or 3");
}

// Turning points: double roots at |χ| = (81√3/(4√2))^{4/9}, arg χ = ±2π/9.
inline double turning_modulus() { return std::pow(81 * std::sqrt(3.0) / (4 * std::sqrt(2.0)), 4.0 / 9); }
inline cplx turning_point(int sign = -1) {
    return std::polar(turning_modulus(), sign * 2 * stokes_detail::pi / 9);
}

// Independent oracle: on arg χ = -2π/9 the discriminant 4p³ + 27q² is e^{-2πi/3}(27r³ − (32/729)r^{15/2}).
inline double turning_modulus_bisect(double tol = 1e-15) {
    auto g = [](double r) { return 27.0 - 32.0 / 729.0 * std::pow(r, 4.5); };
    double a = 1, b = 10;
    while (b - a > tol * b) {
        double m = 0.5 * (a + b);
        (g(m) > 0 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

struct CharRoots {
    cplx chi{};
    std::array<cplx, 3> roots{};  // P₁', P₂', P₃'
    bool collision = false;       // two roots within the collision tolerance; labels frozen

    cplx operator[](int j) const { return roots[j - 1]; }
    double min_gap() const {
        return std::min({std::abs(roots[0] - roots[1]), std::abs(roots[0] - roots[2]), std::abs(roots[1] - roots[2])});
    }
    double scale() const { return std::max({std::abs(roots[0]), std::abs(roots[1]), std::abs(roots[2])}); }
};

struct RootConfig {
    double collision_rel = 1e-8;
    double large_radius = 30;  // asymptotic labels for |χ| >= this
    double small_radius = 1;   // P_j' ≈ ω_j χ^{1/2} for |χ| <= this
    bool allow_collision = false;
};

inline std::array<cplx, 3> raw_char_roots(cplx chi) {
    return solve_depressed_cubic(2.0 / 9.0 * std::pow(chi, 2.5), -std::pow(chi, 1.5));
}

namespace stokes_detail {

inline const std::array<std::array<int, 3>, 6> perms{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

// Assignment of raw roots to targets minimising the largest displacement.
inline std::array<cplx, 3> assign(const std::array<cplx, 3>& raw, const std::array<cplx, 3>& target, double* worst,
                                  double* runner_up) {
    double best = std::numeric_limits<double>::infinity(), second = best;
    std::array<cplx, 3> out{};
    for (const auto& p : perms) {
        double m = 0;
        for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(raw[p[i]] - target[i]));
        if (m < best) {
            second = best;
            best = m;
            for (int i = 0; i < 3; ++i) out[i] = raw[p[i]];
        } else if (m < second) {
            second = m;
        }
    }
    if (worst) *worst = best;
    if (runner_up) *runner_up = second;
    return out;
}

inline std::array<cplx, 3> large_pattern(cplx chi) {
    cplx c54 = std::pow(chi, 1.25);
    return {I * s29 * c54, -I * s29 * c54, 4.5 / chi};
}

inline std::array<cplx, 3> small_pattern(cplx chi) {
    cplx h = std::sqrt(chi);
    return {omega(1) * h, omega(2) * h, h};
}

inline CharRoots make(cplx chi, const std::array<cplx, 3>& r, const RootConfig& cfg) {
    CharRoots c{chi, r, false};
    c.collision = c.min_gap() <= cfg.collision_rel * c.scale();
    if (c.collision && !cfg.allow_collision)
        throw Error(ErrorKind::TurningPointCollision,
                    "roots coincide near chi = (" + std::to_string(chi.real()) + ", " + std::to_string(chi.imag()) + ")");
    return c;
}

// One matching step is accepted when every root moved less than a third of the smallest gap.
inline bool step_ok(const std::array<cplx, 3>& prev, const std::array<cplx, 3>& next) {
    double gap = std::min({std::abs(next[0] - next[1]), std::abs(next[0] - next[2]), std::abs(next[1] - next[2])});
    double mv = 0;
    for (int i = 0; i < 3; ++i) mv = std::max(mv, std::abs(next[i] - prev[i]));
    return mv < gap / 3;
}

// Carry labels along the segment a → b, halving steps until matching is unambiguous.
inline std::optional<std::array<cplx, 3>> carry(std::array<cplx, 3> labels, cplx a, cplx b, const RootConfig& cfg) {
    const int max_depth = 40;
    struct Item { cplx from, to; int depth; };
    std::vector<Item> stack{{a, b, 0}};
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        auto raw = raw_char_roots(it.to);
        auto next = assign(raw, labels, nullptr, nullptr);
        CharRoots probe{it.to, next, false};
        if (probe.min_gap() <= cfg.collision_rel * probe.scale()) return std::nullopt;
        if (step_ok(labels, next)) {
            labels = next;
            continue;
        }
        if (it.depth >= max_depth) return std::nullopt;
        cplx mid = 0.5 * (it.from + it.to);
        stack.push_back({mid, it.to, it.depth + 1});
        stack.push_back({it.from, mid, it.depth + 1});
    }
    return labels;
}

}  // namespace stokes_detail

// Labelled roots. With `prev` the labels are carried from prev->chi along the chord; without it,
// they come from the large-χ pattern (P₁' ~ i√(2/9)χ^{5/4}, P₂' ~ −i√(2/9)χ^{5/4}, P₃' ~ 9/(2χ)),
// the small-χ pattern (P_j' ~ ω_jχ^{1/2}), or radial continuation from one of them. Radial
// continuation from the large side is tried first; the small side is used when that ray runs
// into a turning point.
inline CharRoots char_roots(cplx chi, const CharRoots* prev = nullptr, const RootConfig& cfg = {}) {
    using namespace stokes_detail;
    if (chi == cplx(0)) throw Error(ErrorKind::OriginSingular, "characteristic roots need chi != 0");
    auto raw = raw_char_roots(chi);
    if (prev) {
        auto got = carry(prev->roots, prev->chi, chi, cfg);
        if (!got) {
            if (!cfg.allow_collision)
                throw Error(ErrorKind::TurningPointCollision, "label continuation crosses a turning point");
            return make(chi, assign(raw, prev->roots, nullptr, nullptr), cfg);
        }
        return make(chi, *got, cfg);
    }
    const double r = std::abs(chi);
    if (r >= cfg.large_radius) return make(chi, assign(raw, large_pattern(chi), nullptr, nullptr), cfg);
    if (r <= cfg.small_radius) return make(chi, assign(raw, small_pattern(chi), nullptr, nullptr), cfg);
    const cplx u = chi / r;
    cplx big = cfg.large_radius * u;
    if (auto got = carry(assign(raw_char_roots(big), large_pattern(big), nullptr, nullptr), big, chi, cfg))
        return make(chi, *got, cfg);
    cplx small = cfg.small_radius * u;
    if (auto got = carry(assign(raw_char_roots(small), small_pattern(small), nullptr, nullptr), small, chi, cfg))
        return make(chi, *got, cfg);
    return make(chi, assign(raw, large_pattern(chi), nullptr, nullptr), cfg);
}

// P'' from implicit differentiation of the cubic.
inline cplx char_root_derivative(cplx chi, cplx alpha) {
    cplx d = 3.0 * alpha * alpha + 2.0 / 9.0 * std::pow(chi, 2.5);
    return (1.5 * std::sqrt(chi) - 5.0 / 9.0 * std::pow(chi, 1.5) * alpha) / d;
}

// W' = −3P'P''/(3P'² + (2/9)χ^{5/2})
inline cplx amplitude_rate(cplx chi, cplx alpha) {
    cplx d = 3.0 * alpha * alpha + 2.0 / 9.0 * std::pow(chi, 2.5);
    return -3.0 * alpha * char_root_derivative(chi, alpha) / d;
}

// Closed-form roots of Ψ³ − (2/9)Ψ + 1/q = 0 (principal branches). The formula's k-th term tends
// to −ω_k q^{-1/3} as q → 0; mode j is the term whose limit matches that mode's small-r law
// (Ψ₁ ~ e^{iπ/3}r^{-3/4}, Ψ₂ ~ −r^{-3/4}, Ψ₃ ~ e^{-iπ/3}r^{-3/4}), i.e. k = 2, 3, 1.
inline cplx psi_of_q(double q, int j) {
    check_mode(j);
    if (!(q > 0)) throw Error(ErrorKind::ConfigInvalid, "psi_of_q needs q > 0");
    static constexpr int index[3] = {2, 3, 1};
    const cplx w = omega(index[j - 1]);
    // J = 1 − √(1 − x) written as x/(1 + √(1 − x)) to avoid cancellation at small q
    const double x = 96.0 * q * q / 59049.0;
    const cplx J = x / (1.0 + std::sqrt(cplx(1.0 - x)));
    const cplx J3 = std::pow(J, 1.0 / 3);
    const double c = std::cbrt(2916.0), q3 = std::cbrt(q);
    return -c / (18 * q3) * J3 / w - 4 * q3 / (3 * c * J3) * w;
}

// -------------------------------------------------------------------------------------------
// Traces

struct TraceSample {
    double t = 0;
    cplx z{};          // χ or η
    cplx P{};          // accumulated phase (ω_jP for η flows)
    double s = 0;      // arclength
    double rate = 0;   // d/ds Re P
    double rate_t = 0; // d/dt Re P
    cplx deriv{};      // P' at z
};

struct PathTrace {
    int j = 1;
    std::string plane = "chi";
    std::vector<TraceSample> samples;
    std::string note;
};

// Same path walked backwards: arclength runs the other way and every rate flips sign.
inline PathTrace reversed(const PathTrace& tr) {
    PathTrace out = tr;
    std::reverse(out.samples.begin(), out.samples.end());
    double smax = tr.samples.empty() ? 0 : tr.samples.back().s, tmax = tr.samples.empty() ? 0 : tr.samples.back().t;
    for (auto& s : out.samples) {
        s.s = smax - s.s;
        s.t = tmax - s.t;
        s.rate = -s.rate;
        s.rate_t = -s.rate_t;
    }
    return out;
}

struct FlowConfig {
    IntegratorConfig integrator{1e-12, 1e-14, 0.05, 1e-13, 5'000'000};
    int nodes = 0;             // forced equally spaced t nodes (0: every accepted step is recorded)
    double origin_radius = 1e-6;
    double escape_radius = 1e8;
    RootConfig roots{};
};

namespace stokes_detail {

// Keeps the label of one root while an integrator walks a path; the stop predicate commits.
struct RootTracker {
    int j;
    cplx ref;
    RootConfig cfg;

    cplx pick(cplx chi) const {
        auto raw = raw_char_roots(chi);
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(raw[i] - ref) < std::abs(raw[best] - ref)) best = i;
        return raw[best];
    }
    // Commit at an accepted point; collisions and ambiguous jumps are reported.
    void commit(cplx chi) {
        auto raw = raw_char_roots(chi);
        CharRoots c{chi, raw, false};
        if (c.min_gap() <= cfg.collision_rel * c.scale())
            throw Error(ErrorKind::TurningPointCollision, "trace reached a turning point near chi = (" +
                                                              std::to_string(chi.real()) + ", " +
                                                              std::to_string(chi.imag()) + ")");
        cplx a = pick(chi);
        double mv = std::abs(a - ref), gap = std::numeric_limits<double>::infinity();
        for (auto& x : raw)
            if (x != a) gap = std::min(gap, std::abs(x - a));
        if (mv >= gap / 2)
            throw Error(ErrorKind::TurningPointCollision, "root label ambiguous along the trace");
        ref = a;
    }
};

}  // namespace stokes_detail

// Ascent flow dχ/dt = 1/P_j'(χ). Along it dP/dt = 1 and d/ds Re P_j = |P_j'|.
inline PathTrace trace_flow_chi(int j, cplx chi0, double tmax, const FlowConfig& cfg = {}) {
    check_mode(j);
    if (!(tmax > 0)) throw Error(ErrorKind::ConfigInvalid, "tmax must be positive");
    stokes_detail::RootTracker tk{j, char_roots(chi0, nullptr, cfg.roots)[j], cfg.roots};
    auto rhs = [&](cplx, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        cplx a = tk.pick(y[0]);
        dy[0] = 1.0 / a;
        dy[1] = a * dy[0];
        dy[2] = 1.0 / std::abs(a);
    };
    std::string why;
    auto stop = [&](cplx, const std::vector<cplx>& y) {
        double r = std::abs(y[0]);
        if (r < cfg.origin_radius) return why = "reached the origin", true;
        if (r > cfg.escape_radius) return why = "escaped to infinity", true;
        tk.commit(y[0]);
        return false;
    };
    PathSpec p;
    p.add(Segment::line(0.0, tmax, cfg.nodes));
    Trajectory tr = integrate_path(rhs, p, {chi0, 0.0, 0.0}, cfg.integrator, stop,
                                   cfg.nodes > 0 ? Record::NodesOnly : Record::All);
    if (tr.termination == Termination::StepUnderflow || tr.termination == Termination::MaxSteps)
        throw Error(tr.termination == Termination::MaxSteps ? ErrorKind::MaxStepsExceeded : ErrorKind::StepUnderflow,
                    "chi flow: " + tr.note);
    PathTrace out;
    out.j = j;
    out.note = why;
    stokes_detail::RootTracker lab{j, char_roots(chi0, nullptr, cfg.roots)[j], cfg.roots};
    for (const auto& s : tr.samples) {
        TraceSample ts;
        ts.t = s.z.real();
        ts.z = s.y[0];
        ts.P = s.y[1];
        ts.s = s.y[2].real();
        lab.ref = lab.pick(ts.z);
        ts.deriv = lab.ref;
        ts.rate = std::abs(ts.deriv);
        ts.rate_t = 1.0;
        out.samples.push_back(ts);
    }
    return out;
}

// ψ-flow dψ/dt = −ψ(2+9ψ²)²/(4(2+27ψ²)) followed by P_j' = χ^{5/4}ψ along the χ flow.
inline cplx psi_rate(cplx psi) {
    cplx p2 = psi * psi;
    cplx a = 2.0 + 9.0 * p2;
    return -psi * a * a / (4.0 * (2.0 + 27.0 * p2));
}

inline std::vector<std::pair<double, cplx>> psi_flow(cplx psi0, double tmax, int nodes = 100,
                                                     const IntegratorConfig& ic = {}) {
    PathSpec p;
    p.add(Segment::line(0.0, tmax, nodes));
    auto tr = integrate_ode([](cplx, const std::vector<cplx>& y, std::vector<cplx>& dy) { dy[0] = psi_rate(y[0]); },
                            p, {psi0}, ic, Record::NodesOnly);
    std::vector<std::pair<double, cplx>> out;
    for (const auto& s : tr.samples) out.push_back({s.z.real(), s.y[0]});
    return out;
}

struct PhaseIncrement {
    cplx dP{};
    cplx dW{};
};

// Quadrature of P_j' and W_j' along a χ path; labels carried from the path start.
inline PhaseIncrement wkb_phase(int j, const PathSpec& path, const IntegratorConfig& ic = {},
                                const RootConfig& rc = {}) {
    check_mode(j);
    path.validate();
    stokes_detail::RootTracker tk{j, char_roots(path.start(), nullptr, rc)[j], rc};
    auto rhs = [&](cplx chi, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        (void)y;
        cplx a = tk.pick(chi);
        dy[0] = a;
        dy[1] = amplitude_rate(chi, a);
    };
    auto stop = [&](cplx chi, const std::vector<cplx>&) {
        tk.commit(chi);
        return false;
    };
    Trajectory tr = integrate_path(rhs, path, {0.0, 0.0}, ic, stop, Record::EndOnly);
    if (tr.termination != Termination::PathEnd) throw Error(ErrorKind::StepUnderflow, "wkb_phase: " + tr.note);
    return {tr.back().y[0], tr.back().y[1]};
}

// -------------------------------------------------------------------------------------------
// η-plane flows η̇ = ν_jG₀(η), ν_j = i e^{-iφ_j} ω_j^{-1}

struct FlowParams {
    std::array<double, 3> phi{std::numbers::pi / 3, 6 * std::numbers::pi / 7, 2 * std::numbers::pi / 3};

    cplx omega_of(int j) const { return omega(j); }
    cplx nu(int j) const {
        check_mode(j);
        return I * std::polar(1.0, -phi[j - 1]) / omega(j);
    }
    void validate() const {
        for (double p : phi)
            if (!(p > 0 && p < std::numbers::pi)) throw Error(ErrorKind::ConfigInvalid, "flow angles must lie in (0, pi)");
    }
};

struct EtaFlowConfig {
    IntegratorConfig integrator{1e-12, 1e-14, 0.05, 1e-13, 5'000'000};
    int nodes = 0;
    double floor_rel = 1e-3;
};

// Co-integrates η, the G₀ jet and P = ∫dη/G₀ from a G₀ state; samples carry d/dt Re(ω_jP) and
// d/ds Re(ω_jP). The stored P is ω_jP.
inline PathTrace trace_flow_eta(int j, const G0State& start, const FlowParams& fp, double tmax,
                                const EtaFlowConfig& cfg = {}) {
    check_mode(j);
    fp.validate();
    if (!(tmax > 0)) throw Error(ErrorKind::ConfigInvalid, "tmax must be positive");
    const cplx nu = fp.nu(j), w = omega(j);
    auto rhs = [&](cplx, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        cplx v = nu * y[1];
        dy[0] = v;
        dy[1] = y[2] * v;
        dy[2] = y[3] * v;
        dy[3] = g0_third(y[0], y[1], y[2]) * v;
        dy[4] = v / y[1];
    };
    auto stop = [&](cplx, const std::vector<cplx>& y) {
        return std::abs(y[1]) < cfg.floor_rel / std::sqrt(std::abs(y[0]));
    };
    PathSpec p;
    p.add(Segment::line(0.0, tmax, cfg.nodes));
    Trajectory tr = integrate_path(rhs, p, {start.eta, start.jet[0], start.jet[1], start.jet[2], 0.0},
                                   cfg.integrator, stop, cfg.nodes > 0 ? Record::NodesOnly : Record::All);
    if (tr.termination == Termination::Stopped)
        throw Error(ErrorKind::SingularityFloor, "eta flow reached the G0 floor near eta = (" +
                                                     std::to_string(tr.back().y[0].real()) + ", " +
                                                     std::to_string(tr.back().y[0].imag()) + ")");
    if (tr.termination != Termination::PathEnd) throw Error(ErrorKind::StepUnderflow, "eta flow: " + tr.note);
    PathTrace out;
    out.j = j;
    out.plane = "eta";
    double s = 0;
    cplx last = start.eta;
    for (const auto& smp : tr.samples) {
        TraceSample ts;
        ts.t = smp.z.real();
        ts.z = smp.y[0];
        ts.P = w * smp.y[4];
        s += std::abs(ts.z - last);  // chord length; samples are dense
        last = ts.z;
        ts.s = s;
        cplx v = smp.dy[0];
        ts.deriv = 1.0 / smp.y[1];
        ts.rate_t = std::real(w * smp.dy[4]);
        ts.rate = std::real(w * v / smp.y[1]) / std::abs(v);
        out.samples.push_back(ts);
    }
    return out;
}

// -------------------------------------------------------------------------------------------
// Monotonicity certificates

enum class GrowthLaw { Power54, PowerMinus1, PowerHalf, Constant };

inline const char* to_string(GrowthLaw l) {
    switch (l) {
    case GrowthLaw::Power54: return "power-5/4";
    case GrowthLaw::PowerMinus1: return "power-(-1)";
    case GrowthLaw::PowerHalf: return "power-1/2";
    case GrowthLaw::Constant: return "constant";
    }
    return "?";
}

inline double law_weight(GrowthLaw l, double r) {
    switch (l) {
    case GrowthLaw::Power54: return std::pow(r, 1.25);
    case GrowthLaw::PowerMinus1: return 1.0 / r;
    case GrowthLaw::PowerHalf: return std::sqrt(r);
    case GrowthLaw::Constant: return 1.0;
    }
    return 1.0;
}

struct Violation {
    size_t index;
    cplx z;
    double rate;
};

struct MonotonicityCertificate {
    GrowthLaw law = GrowthLaw::Constant;
    double C_emp = 0;  // min over samples of rate/weight
    std::vector<Violation> violations;
    size_t samples = 0;

    bool ok() const { return violations.empty() && C_emp > 0; }
};

inline MonotonicityCertificate monotonicity_check(const PathTrace& tr, GrowthLaw law) {
    MonotonicityCertificate c;
    c.law = law;
    c.samples = tr.samples.size();
    c.C_emp = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < tr.samples.size(); ++i) {
        const auto& s = tr.samples[i];
        c.C_emp = std::min(c.C_emp, s.rate / law_weight(law, std::abs(s.z)));
        if (!(s.rate > 0)) c.violations.push_back({i, s.z, s.rate});
    }
    if (tr.samples.empty()) c.C_emp = 0;
    return c;
}

// Rates d/dr Re P_j along the segment a + r·u, r ∈ [0, L], at n+1 equally spaced points.
// Labels are carried from the pattern labels at the start point.
inline PathTrace sample_segment(int j, cplx a, cplx b, int n, const RootConfig& rc = {}) {
    check_mode(j);
    if (n < 1) throw Error(ErrorKind::ConfigInvalid, "need at least one interval");
    PathTrace out;
    out.j = j;
    out.note = "segment";
    const double L = std::abs(b - a);
    const cplx u = (b - a) / L;
    CharRoots cur = char_roots(a, nullptr, rc);
    for (int i = 0; i <= n; ++i) {
        double r = L * i / n;
        cplx z = a + r * u;
        if (i > 0) cur = char_roots(z, &cur, rc);
        TraceSample ts;
        ts.t = r;
        ts.s = r;
        ts.z = z;
        ts.deriv = cur[j];
        ts.rate = std::real(u * cur[j]);
        ts.rate_t = ts.rate;
        out.samples.push_back(ts);
    }
    return out;
}

// Doubles the sampling until the empirical constant settles to the relative tolerance.
inline MonotonicityCertificate certify_segment(int j, cplx a, cplx b, GrowthLaw law, int sign = +1, int n0 = 32,
                                               double settle = 0.05, int max_doublings = 8,
                                               const RootConfig& rc = {}) {
    MonotonicityCertificate prev;
    for (int d = 0, n = n0; d <= max_doublings; ++d, n *= 2) {
        PathTrace tr = sample_segment(j, a, b, n, rc);
        if (sign < 0) tr = reversed(tr);
        auto c = monotonicity_check(tr, law);
        if (d > 0 && std::abs(c.C_emp - prev.C_emp) <= settle * std::abs(prev.C_emp)) return c;
        prev = c;
    }
    return prev;
}

// -------------------------------------------------------------------------------------------
// The WKB domain: corners χ₃ = ε, χ_{2,1} = ε + ρ̃e^{±2πi/3}, with ρ̃ fixed by arg χ₁ = −2π/9 + δ.

struct DomainE {
    double eps = 0.3;
    double delta = std::numbers::pi / 80;

    void validate() const {
        if (!(eps > 0)) throw Error(ErrorKind::ConfigInvalid, "eps must be positive");
        if (!(delta > 0 && delta < std::numbers::pi / 63)) throw Error(ErrorKind::ConfigInvalid, "need 0 < delta < pi/63");
    }
    double edge_angle() const { return 2 * std::numbers::pi / 9 - delta; }
    double rho() const {
        double t = std::tan(edge_angle());
        return t * eps / (std::sqrt(3.0) / 2 + t / 2);
    }
    cplx chi3() const { return eps; }
    cplx chi2() const { return eps + std::polar(rho(), 2 * std::numbers::pi / 3); }
    cplx chi1() const { return eps + std::polar(rho(), -2 * std::numbers::pi / 3); }

    // Boundary from R e^{i(2π/9−δ)} through χ₂, χ₃, χ₁ to R e^{−i(2π/9−δ)}.
    std::vector<cplx> boundary(double R, int per_edge = 64) const {
        validate();
        std::vector<cplx> pts;
        auto edge = [&](cplx a, cplx b, bool last) {
            for (int i = 0; i < per_edge + (last ? 1 : 0); ++i) pts.push_back(a + (b - a) * (double(i) / per_edge));
        };
        cplx top = std::polar(R, edge_angle()), bot = std::polar(R, -edge_angle());
        edge(top, chi2(), false);
        edge(chi2(), chi3(), false);
        edge(chi3(), chi1(), false);
        edge(chi1(), bot, true);
        return pts;
    }
};

// Sign of d/dr Re P_j on ∂E_L^± (r measured from χ₃). Rows are modes, columns (+, −).
struct SignTable {
    std::array<std::array<int, 2>, 3> sign{};
    std::array<std::array<double, 2>, 3> min_abs_rate{};
};

// Reference pattern: Re P₃ falls away from χ₃ on both edges, Re P₁ falls on the upper edge and
// rises on the lower one, Re P₂ the reverse.
inline SignTable expected_left_boundary_signs() {
    SignTable t;
    t.sign = {{{-1, +1}, {+1, -1}, {-1, -1}}};
    return t;
}

inline SignTable left_boundary_signs(const DomainE& d, int n = 256, const RootConfig& rc = {}) {
    d.validate();
    SignTable t;
    const cplx ends[2] = {d.chi2(), d.chi1()};
    for (int j = 1; j <= 3; ++j)
        for (int side = 0; side < 2; ++side) {
            PathTrace tr = sample_segment(j, d.chi3(), ends[side], n, rc);
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto& s : tr.samples) {
                lo = std::min(lo, s.rate);
                hi = std::max(hi, s.rate);
            }
            t.sign[j - 1][side] = lo > 0 ? +1 : (hi < 0 ? -1 : 0);
            t.min_abs_rate[j - 1][side] = lo > 0 ? lo : (hi < 0 ? -hi : 0.0);
        }
    return t;
}

// Local power of d/dr Re P_j along the ray arg χ = θ from log-log differences at radius r.
inline double rate_exponent(int j, double theta, double r, double h = 1e-3, const RootConfig& rc = {}) {
    auto rate = [&](double rr) {
        cplx z = std::polar(rr, theta);
        return std::real(std::polar(1.0, theta) * char_roots(z, nullptr, rc)[j]);
    };
    double a = rate(r * (1 - h)), b = rate(r * (1 + h));
    return (std::log(std::abs(b)) - std::log(std::abs(a))) / (std::log1p(h) - std::log1p(-h));
}

}  // namespace singtrack
