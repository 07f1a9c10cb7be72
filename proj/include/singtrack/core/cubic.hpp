#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include "singtrack/core/path.hpp"

namespace singtrack {

inline cplx principal_cbrt(cplx w) {
    if (w == cplx(0)) return 0;
    return std::polar(std::cbrt(std::abs(w)), std::arg(w) / 3.0);
}

// Roots of a^3 + p a + q = 0 by Cardano, then one guarded Newton polish per root.
inline std::array<cplx, 3> solve_depressed_cubic(cplx p, cplx q) {
    const cplx w1 = std::polar(1.0, 2 * std::numbers::pi / 3), w2 = std::conj(w1);
    cplx half_q = q / 2.0, third_p = p / 3.0;
    cplx a = half_q * half_q, b = third_p * third_p * third_p;
    cplx disc = a + b;
    // Snap a rounding-level discriminant to zero so repeated roots come out repeated.
    if (std::abs(disc) <= 64 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b))) disc = 0;
    cplx sd = std::sqrt(disc);
    cplx t1 = -half_q + sd, t2 = -half_q - sd;
    cplx t = std::abs(t1) >= std::abs(t2) ? t1 : t2;
    std::array<cplx, 3> r;
    if (t == cplx(0)) {
        r = {cplx(0), cplx(0), cplx(0)};  // p = q = 0
        return r;
    }
    cplx u = principal_cbrt(t);
    cplx v = -third_p / u;
    r = {u + v, w1 * u + w2 * v, w2 * u + w1 * v};
    for (auto& x : r) {
        cplx f = x * x * x + p * x + q;
        cplx d = 3.0 * x * x + p;
        if (std::abs(d) == 0) continue;
        cplx xn = x - f / d;
        cplx fn = xn * xn * xn + p * xn + q;
        if (std::abs(fn) < std::abs(f)) x = xn;
    }
    return r;
}

}  // namespace singtrack
