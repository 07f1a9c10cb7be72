#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "singtrack/core/errors.hpp"
#include "singtrack/core/path.hpp"

namespace singtrack {

struct ContourSample {
    double s = 0;  // arclength along the closed path, 0..L inclusive
    cplx z{};
    cplx f{};
};

struct ContourResult {
    cplx value{};
    double error_estimate = 0;
    int n_intervals = 0;
};

// (1/2πi)∮ f dz by the trapezoid rule in arclength over equally spaced samples,
// first and last sample both at the path start. Error estimate: |I_n - I_{n/2}|/3
// plus a rounding floor.
inline ContourResult contour_integral(const PathSpec& path, const std::vector<ContourSample>& samples) {
    if (!path.closed()) throw Error(ErrorKind::PathNotClosed, "contour path is not closed");
    if (samples.size() < 3) throw Error(ErrorKind::PathNotClosed, "need at least 3 samples");
    if (std::abs(samples.front().z - samples.back().z) > 1e-9 * (1 + std::abs(samples.front().z)))
        throw Error(ErrorKind::PathNotClosed, "first and last samples must coincide");
    const size_t n = samples.size() - 1;

    auto tangent_at = [&](double s) {
        double acc = 0;
        for (const auto& seg : path.segments) {
            double L = seg.length();
            if (s <= acc + L || &seg == &path.segments.back()) return seg.tangent(std::min(s - acc, L));
            acc += L;
        }
        return path.segments.back().tangent(path.segments.back().length());
    };

    std::vector<cplx> g(n + 1);
    double mag = 0;
    for (size_t i = 0; i <= n; ++i) {
        g[i] = samples[i].f * tangent_at(samples[i].s);
        mag += std::abs(g[i]);
    }
    auto trap = [&](size_t stride) {
        cplx acc = 0;
        for (size_t i = 0; i + stride <= n; i += stride)
            acc += 0.5 * (g[i] + g[i + stride]) * (samples[i + stride].s - samples[i].s);
        return acc;
    };
    const cplx two_pi_i(0, 2 * std::numbers::pi);
    ContourResult out;
    out.n_intervals = static_cast<int>(n);
    cplx In = trap(1) / two_pi_i;
    double L = samples.back().s - samples.front().s;
    double floor = 32 * std::numeric_limits<double>::epsilon() * mag * (L / n) / (2 * std::numbers::pi);
    if (n % 2 == 0) {
        cplx Ih = trap(2) / two_pi_i;
        out.error_estimate = std::abs(In - Ih) / 3.0 + floor;
    } else {
        out.error_estimate = std::numeric_limits<double>::infinity();
    }
    out.value = In;
    return out;
}

// Samples a function at n+1 equally spaced arclength points of a closed path.
template <class F>
std::vector<ContourSample> sample_closed_path(const PathSpec& path, int n, F&& f) {
    std::vector<ContourSample> out;
    double L = path.length();
    for (int i = 0; i <= n; ++i) {
        double s = L * i / n;
        double acc = 0;
        cplx z = path.end();
        for (const auto& seg : path.segments) {
            double Ls = seg.length();
            if (s <= acc + Ls) {
                z = seg.point(s - acc);
                break;
            }
            acc += Ls;
        }
        if (i == n) z = path.start();
        out.push_back({s, z, f(z)});
    }
    return out;
}

}  // namespace singtrack
