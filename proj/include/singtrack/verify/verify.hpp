#pragma once

// Winding numbers, branch-order fits, lattice gaps and τ-series convergence probes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "singtrack/core/contour.hpp"
#include "singtrack/core/linalg.hpp"
#include "singtrack/g0/locate.hpp"
#include "singtrack/hierarchy/hierarchy.hpp"

namespace singtrack {

// f and f' at a point of a closed contour; s is arclength from the contour start.
struct CircleSample {
    double s = 0;
    cplx z{}, f{}, fp{};
};

// Supplies n+1 equally spaced samples on the circle |z - center| = radius, first and last
// at the same point, f continued along the circle.
using CircleProvider = std::function<std::vector<CircleSample>(cplx center, double radius, int n)>;

struct WindingResult {
    cplx center{};
    double radius = 0;
    int n_samples = 0;
    cplx value{};
    double error_estimate = 0;
};

struct WindingConfig {
    double zero_floor = 1e-12;  // relative to max |f| on the circle
    double theta0 = 0;          // contour start angle
};

inline PathSpec winding_circle(cplx center, double radius, double theta0, int n = 0) {
    return PathSpec::circle(center, radius, theta0, n);
}

namespace detail {

inline ContourResult winding_pass(const std::vector<CircleSample>& smp, cplx center, double radius, double theta0,
                                  double zero_floor) {
    double fmax = 0;
    for (const auto& s : smp) fmax = std::max(fmax, std::abs(s.f));
    std::vector<ContourSample> cs;
    cs.reserve(smp.size());
    for (const auto& s : smp) {
        if (!(std::abs(s.f) > zero_floor * fmax))
            throw Error(ErrorKind::ZeroOnContour, "f vanishes on the contour near z = (" + std::to_string(s.z.real()) +
                                                      ", " + std::to_string(s.z.imag()) + ")");
        cs.push_back({s.s, s.z, s.fp / s.f});
    }
    return contour_integral(winding_circle(center, radius, theta0), cs);
}

}  // namespace detail

// (1/2πi)∮ f'/f on a circle. The error estimate is the change from n to 2n samples plus
// the quadrature's own halving estimate at 2n.
inline WindingResult winding_number(const CircleProvider& provider, cplx center, double radius, int n,
                                    const WindingConfig& cfg = {}) {
    if (!(radius > 0)) throw Error(ErrorKind::ConfigInvalid, "winding radius must be positive");
    if (n < 8 || n % 2) throw Error(ErrorKind::ConfigInvalid, "winding needs an even sample count >= 8");
    auto coarse = detail::winding_pass(provider(center, radius, n), center, radius, cfg.theta0, cfg.zero_floor);
    auto fine = detail::winding_pass(provider(center, radius, 2 * n), center, radius, cfg.theta0, cfg.zero_floor);
    WindingResult w;
    w.center = center;
    w.radius = radius;
    w.n_samples = 2 * n;
    w.value = fine.value;
    w.error_estimate = std::abs(fine.value - coarse.value) + fine.error_estimate;
    return w;
}

// Provider for closed-form f, f'.
inline CircleProvider analytic_provider(std::function<cplx(cplx)> f, std::function<cplx(cplx)> fp,
                                        double theta0 = 0) {
    return [f, fp, theta0](cplx c, double r, int n) {
        std::vector<CircleSample> out;
        for (int i = 0; i <= n; ++i) {
            double th = theta0 + 2 * std::numbers::pi * i / n;
            cplx z = i == n ? c + std::polar(r, theta0) : c + std::polar(r, th);
            out.push_back({r * 2 * std::numbers::pi * i / n, z, f(z), fp(z)});
        }
        return out;
    };
}

// G₀ re-integrated around the circle from `start` (a radial lead-in, then the arc).
inline CircleProvider g0_circle_provider(G0State start, const IntegratorConfig& ic = {}, double theta0 = 0) {
    return [start, ic, theta0](cplx c, double r, int n) {
        cplx a = c + std::polar(r, theta0);
        std::vector<cplx> y{start.jet[0], start.jet[1], start.jet[2]};
        if (std::abs(a - start.eta) > 0) {
            PathSpec lead;
            lead.add(Segment::line(start.eta, a));
            auto t = integrate_ode(G0System{}, lead, y, ic, Record::EndOnly);
            y = t.back().y;
        }
        auto tr = integrate_ode(G0System{}, winding_circle(c, r, theta0, n), y, ic, Record::NodesOnly);
        std::vector<CircleSample> out;
        for (const auto& s : tr.samples)
            if (s.node) out.push_back({s.s, s.z, s.y[0], s.y[1]});
        return out;
    };
}

// Partial sum Σ_{k≤N} τ^k G_k re-integrated around the circle from a hierarchy grid node.
inline CircleProvider partial_sum_provider(const HierarchyStore& st, size_t node, cplx tau, int N,
                                           double theta0 = 0) {
    if (N > st.orders()) throw Error(ErrorKind::MissingLowerOrder, "partial sum needs the first N orders");
    return [&st, node, tau, N, theta0](cplx c, double r, int n) {
        cplx a = c + std::polar(r, theta0);
        PathSpec p;
        p.add(Segment::line(st.nodes.at(node).eta, a));
        p.add(Segment::arc(c, r, theta0, theta0 + 2 * std::numbers::pi, n));
        auto tr = continue_hierarchy(st, node, p, N, Record::NodesOnly);
        if (tr.termination != Termination::PathEnd)
            throw Error(ErrorKind::StudyFailed, "partial-sum circle: " + tr.note);
        std::vector<CircleSample> out;
        double s0 = p.segments[0].length();
        for (const auto& s : tr.samples) {
            if (!s.node || s.s < s0 - 1e-12) continue;
            cplx f = 0, fp = 0, pw = 1;
            for (int k = 0; k <= N; ++k, pw *= tau) {
                f += pw * s.y[3 * k];
                fp += pw * s.y[3 * k + 1];
            }
            out.push_back({s.s - s0, s.z, f, fp});
        }
        return out;
    };
}

// Radius for the partial-sum winding check, in units of |η̂|^{-5/4}.
inline constexpr double kPartialSumWindingRadius = 0.25;

// ---------------------------------------------------------------------------------------------

struct BranchOrderFit {
    double order = 0;
    double stderr_ = 0;  // standard error of the slope
    double confidence = 0;  // 2σ half-width
    double rms = 0;
    size_t n = 0;
};

// Slope of log|f| against log|z − center|.
inline BranchOrderFit branch_order_fit(const std::vector<cplx>& z, const std::vector<cplx>& f, cplx center) {
    if (z.size() != f.size() || z.size() < 3) throw Error(ErrorKind::IllConditionedFit, "need >= 3 paired samples");
    std::vector<double> x, y;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (size_t i = 0; i < z.size(); ++i) {
        double d = std::abs(z[i] - center), a = std::abs(f[i]);
        if (!(d > 0 && a > 0)) throw Error(ErrorKind::IllConditionedFit, "sample at the center or a zero of f");
        x.push_back(std::log(d));
        y.push_back(std::log(a));
        lo = std::min(lo, x.back());
        hi = std::max(hi, x.back());
    }
    if (hi - lo < 1e-3) throw Error(ErrorKind::IllConditionedFit, "sample radii span too small a range");
    auto lf = fit_line(x, y);
    BranchOrderFit out;
    out.order = lf.slope;
    out.stderr_ = lf.slope_stderr;
    out.confidence = 2 * lf.slope_stderr;
    out.rms = lf.rms;
    out.n = z.size();
    return out;
}

// ---------------------------------------------------------------------------------------------

struct LatticeGapReport {
    std::vector<int> n_hat;
    std::vector<double> gap;  // |traced − lattice|
    bool monotone_decrease = true;
};

inline LatticeGapReport lattice_consistency(const std::vector<int>& n_hat, const std::vector<cplx>& traced,
                                            const std::vector<cplx>& lattice) {
    if (traced.size() != lattice.size() || n_hat.size() != traced.size())
        throw Error(ErrorKind::ConfigInvalid, "lattice lists must be index-matched");
    LatticeGapReport r;
    r.n_hat = n_hat;
    for (size_t i = 0; i < traced.size(); ++i) r.gap.push_back(std::abs(traced[i] - lattice[i]));
    for (size_t i = 1; i < r.gap.size(); ++i)
        if (!(r.gap[i] <= r.gap[i - 1])) r.monotone_decrease = false;
    return r;
}

// ---------------------------------------------------------------------------------------------

struct ProbeRow {
    double tau = 0;
    std::vector<double> term;  // |τ^k G_k|
    std::vector<double> root;  // |τ^k G_k|^{1/k}, k ≥ 1
    double ratio = 0;          // fitted |t_{k+1}/t_k| over the upper half of k
    bool geometric = false;
    bool diverging = false;
};

struct ConvergenceProbe {
    size_t node = 0;
    int N = 0;
    double A_node = 0;  // fitted growth |G_k| ~ A^k over the upper half of k
    double radius = 0;  // 1/A_node
    std::vector<ProbeRow> rows;
};

inline ConvergenceProbe convergence_probe(const HierarchyStore& st, size_t node, const std::vector<double>& taus,
                                          int N) {
    if (N > st.orders() || N < 2) throw Error(ErrorKind::MissingLowerOrder, "probe needs orders 0..N, N >= 2");
    auto jets = node_jets(st, node, N);
    ConvergenceProbe p;
    p.node = node;
    p.N = N;
    const int k0 = std::max(1, N / 2);
    std::vector<double> x, y;
    for (int k = k0; k <= N; ++k) {
        x.push_back(k);
        y.push_back(std::log(std::abs(jets[k][0])));
    }
    if (x.size() >= 3) p.A_node = std::exp(fit_line(x, y).slope);
    else p.A_node = std::abs(jets[N][0] / jets[N - 1][0]);
    p.radius = 1.0 / p.A_node;
    for (double tau : taus) {
        ProbeRow r;
        r.tau = tau;
        double pw = 1;
        for (int k = 0; k <= N; ++k, pw *= tau) {
            r.term.push_back(pw * std::abs(jets[k][0]));
            r.root.push_back(k == 0 ? 0.0 : std::pow(r.term.back(), 1.0 / k));
        }
        r.ratio = tau * p.A_node;
        if (tau == 0) {
            r.geometric = true;
            r.diverging = false;
        } else {
            double top = 0;
            for (int k = k0; k <= N; ++k) top = std::max(top, r.root[k]);
            r.geometric = r.ratio < 1 && top < 1;
            r.diverging = r.ratio > 1;
        }
        p.rows.push_back(r);
    }
    return p;
}

}  // namespace singtrack
