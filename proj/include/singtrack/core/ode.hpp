#pragma once

// Dormand-Prince 5(4) integration of complex ODE systems along complex paths.
// The system is y'(z) = f(z, y); each segment is pulled back to arclength s,
// so the integrator advances dy/ds = f(z(s), y) * z'(s).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "singtrack/core/errors.hpp"
#include "singtrack/core/path.hpp"

namespace singtrack {

struct IntegratorConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double max_step = 0.05;
    double min_step = 1e-13;
    long max_steps = 5'000'000;

    void validate() const {
        if (!(rel_tol > 0 && abs_tol > 0)) throw Error(ErrorKind::ConfigInvalid, "tolerances must be positive");
        if (!(min_step > 0 && min_step <= max_step))
            throw Error(ErrorKind::ConfigInvalid, "need 0 < min_step <= max_step");
        if (max_steps < 1) throw Error(ErrorKind::ConfigInvalid, "max_steps must be >= 1");
    }
};

enum class Termination { PathEnd, Stopped, StepUnderflow, MaxSteps };

inline const char* to_string(Termination t) {
    switch (t) {
    case Termination::PathEnd: return "path-end";
    case Termination::Stopped: return "stopped";
    case Termination::StepUnderflow: return "step-underflow";
    case Termination::MaxSteps: return "max-steps";
    }
    return "?";
}

enum class Record { All, NodesOnly, EndOnly };

struct Sample {
    double s = 0;        // cumulative arclength
    cplx z{};
    int segment = 0;
    bool node = false;   // lands on a forced sample_hint node
    std::vector<cplx> y;
    std::vector<cplx> dy;  // dy/dz
};

struct Trajectory {
    std::vector<Sample> samples;
    Termination termination = Termination::PathEnd;
    std::string note;
    long steps = 0;
    long rejected = 0;

    const Sample& back() const { return samples.back(); }

    std::vector<const Sample*> nodes() const {
        std::vector<const Sample*> out;
        for (const auto& s : samples)
            if (s.node) out.push_back(&s);
        return out;
    }

    // Cubic Hermite interpolation in arclength (uses dy/dz and the local chord direction).
    std::vector<cplx> interpolate(double s) const {
        if (samples.empty()) return {};
        if (s <= samples.front().s) return samples.front().y;
        if (s >= samples.back().s) return samples.back().y;
        auto it = std::upper_bound(samples.begin(), samples.end(), s,
                                   [](double v, const Sample& a) { return v < a.s; });
        const Sample& b = *it;
        const Sample& a = *(it - 1);
        double h = b.s - a.s;
        if (h <= 0) return a.y;
        double t = (s - a.s) / h;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        cplx dz = b.z - a.z;  // dz/ds * h along a line; adequate on arcs for small h
        std::vector<cplx> out(a.y.size());
        for (size_t i = 0; i < out.size(); ++i)
            out[i] = h00 * a.y[i] + h10 * a.dy[i] * dz + h01 * b.y[i] + h11 * b.dy[i] * dz;
        return out;
    }
};

namespace detail {

struct DP5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

// rhs signature: void(cplx z, const std::vector<cplx>& y, std::vector<cplx>& dydz)
// stop signature: bool(cplx z, const std::vector<cplx>& y) -> true terminates with Stopped.
template <class Rhs, class Stop>
Trajectory integrate_path(Rhs&& rhs, const PathSpec& path, std::vector<cplx> y0,
                          const IntegratorConfig& cfg, Stop&& stop, Record record = Record::All) {
    cfg.validate();
    path.validate();
    const size_t n = y0.size();
    using V = std::vector<cplx>;
    using C = detail::DP5;
    Trajectory tr;
    V y = std::move(y0), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);

    auto eval = [&](const Segment& seg, double sl, const V& yy, V& out) {
        cplx z = seg.point(sl);
        rhs(z, yy, out);
        cplx t = seg.tangent(sl);
        for (auto& v : out) v *= t;
    };
    auto push = [&](double s, const Segment& seg, double sl, int segi, bool node, const V& dyds) {
        if (!tr.samples.empty() && tr.samples.back().s == s) {
            tr.samples.back().node = tr.samples.back().node || node;
            return;
        }
        Sample smp;
        smp.s = s;
        smp.z = seg.point(sl);
        smp.segment = segi;
        smp.node = node;
        smp.y = y;
        smp.dy.resize(n);
        cplx t = seg.tangent(sl);
        for (size_t i = 0; i < n; ++i) smp.dy[i] = dyds[i] / t;
        tr.samples.push_back(std::move(smp));
    };
    auto finish = [&](Termination t, const std::string& note, double s, const Segment& seg, double sl, int segi,
                      const V& dyds) {
        tr.termination = t;
        tr.note = note;
        push(s, seg, sl, segi, false, dyds);
        return tr;
    };

    double s_base = 0;
    double h = std::min(cfg.max_step, 1e-3);
    for (size_t si = 0; si < path.segments.size(); ++si) {
        const Segment& seg = path.segments[si];
        const double L = seg.length();
        std::vector<double> node_s;
        if (seg.sample_hint > 0)
            for (int k = 0; k <= seg.sample_hint; ++k) node_s.push_back(k == seg.sample_hint ? L : L * k / seg.sample_hint);
        size_t next_node = 0;
        double sl = 0;
        try {
            eval(seg, sl, y, k1);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularityFloor && e.kind() != ErrorKind::OriginSingular) throw;
            return finish(Termination::Stopped, e.what(), s_base, seg, 0, (int)si, V(n));
        }
        bool start_node = !node_s.empty();
        if (start_node) next_node = 1;
        if (record == Record::All ? (si == 0 || start_node) : (record == Record::NodesOnly && start_node))
            push(s_base, seg, 0, (int)si, start_node, k1);
        while (sl < L) {
            double target = (next_node < node_s.size()) ? node_s[next_node] : L;
            double remain = target - sl;
            bool hits = false;
            double hh = std::min(h, cfg.max_step);
            if (hh >= remain * (1 - 1e-12)) {
                hh = remain;
                hits = true;
            }
            if (++tr.steps > cfg.max_steps)
                return finish(Termination::MaxSteps, "max_steps exceeded", s_base + sl, seg, sl, (int)si, k1);
            double err = 0;
            try {
                for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + hh * C::a21 * k1[i];
                eval(seg, sl + C::c2 * hh, tmp, k2);
                for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + hh * (C::a31 * k1[i] + C::a32 * k2[i]);
                eval(seg, sl + C::c3 * hh, tmp, k3);
                for (size_t i = 0; i < n; ++i)
                    tmp[i] = y[i] + hh * (C::a41 * k1[i] + C::a42 * k2[i] + C::a43 * k3[i]);
                eval(seg, sl + C::c4 * hh, tmp, k4);
                for (size_t i = 0; i < n; ++i)
                    tmp[i] = y[i] + hh * (C::a51 * k1[i] + C::a52 * k2[i] + C::a53 * k3[i] + C::a54 * k4[i]);
                eval(seg, sl + C::c5 * hh, tmp, k5);
                for (size_t i = 0; i < n; ++i)
                    tmp[i] = y[i] + hh * (C::a61 * k1[i] + C::a62 * k2[i] + C::a63 * k3[i] + C::a64 * k4[i] +
                                          C::a65 * k5[i]);
                double s_end = hits ? target : sl + hh;
                eval(seg, s_end, tmp, k6);
                for (size_t i = 0; i < n; ++i)
                    ynew[i] = y[i] + hh * (C::b1 * k1[i] + C::b3 * k3[i] + C::b4 * k4[i] + C::b5 * k5[i] +
                                           C::b6 * k6[i]);
                eval(seg, s_end, ynew, k7);
                for (size_t i = 0; i < n; ++i) {
                    cplx e = hh * (C::e1 * k1[i] + C::e3 * k3[i] + C::e4 * k4[i] + C::e5 * k5[i] +
                                   C::e6 * k6[i] + C::e7 * k7[i]);
                    double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                    double r = std::abs(e) / sc;
                    if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
                    err = std::max(err, r);
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::SingularityFloor && e.kind() != ErrorKind::OriginSingular) throw;
                err = std::numeric_limits<double>::infinity();
            }
            if (err <= 1.0) {
                sl = hits ? target : sl + hh;
                y.swap(ynew);
                k1.swap(k7);
                bool is_node = hits && next_node < node_s.size() && target == node_s[next_node];
                if (is_node) ++next_node;
                double fac = err > 0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
                if (!hits || hh >= h) h = hh * fac;
                if (record == Record::All || (record == Record::NodesOnly && is_node))
                    push(s_base + sl, seg, sl, (int)si, is_node, k1);
                if (stop(seg.point(sl), y))
                    return finish(Termination::Stopped, "stop predicate", s_base + sl, seg, sl, (int)si, k1);
            } else {
                tr.rejected++;
                double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.25;
                h = hh * fac;
                if (h < cfg.min_step)
                    return finish(Termination::StepUnderflow, "step size below min_step", s_base + sl, seg, sl,
                                  (int)si, k1);
            }
        }
        s_base += L;
    }
    const Segment& last = path.segments.back();
    if (record != Record::All) push(s_base, last, last.length(), (int)path.segments.size() - 1, false, k1);
    tr.termination = Termination::PathEnd;
    return tr;
}

template <class Rhs>
Trajectory integrate_path(Rhs&& rhs, const PathSpec& path, std::vector<cplx> y0, const IntegratorConfig& cfg,
                          Record record = Record::All) {
    return integrate_path(std::forward<Rhs>(rhs), path, std::move(y0), cfg,
                          [](cplx, const std::vector<cplx>&) { return false; }, record);
}

// Throwing variant: StepUnderflow carries the last accepted point.
template <class Rhs>
Trajectory integrate_ode(Rhs&& rhs, const PathSpec& path, std::vector<cplx> y0, const IntegratorConfig& cfg,
                         Record record = Record::All) {
    if (y0.empty()) throw Error(ErrorKind::InvalidPath, "empty initial state");
    Trajectory tr = integrate_path(std::forward<Rhs>(rhs), path, std::move(y0), cfg, record);
    if (tr.termination == Termination::StepUnderflow) {
        const Sample& b = tr.back();
        throw StepUnderflow("step underflow near z = (" + std::to_string(b.z.real()) + ", " +
                                std::to_string(b.z.imag()) + ")",
                            b.s, b.z, b.y);
    }
    if (tr.termination == Termination::MaxSteps) throw Error(ErrorKind::MaxStepsExceeded, tr.note);
    return tr;
}

}  // namespace singtrack
