#pragma once

// Independent routes used to cross-check the far-field table.
//
// outer_polynomial: small-t expansion of the outer problem in x = y - t,
//   h_t = h³ h_xxx - h³/2,  h(x, 0) = x^{-1/2},
// so (j+1) h_{j+1} = [h³ h_xxx - h³/2]_j and h_n = x^{-1/2} P_n(t x^{-9/2}, t x^{-1}) / t^n.
//
// pde_substitution_residual: plugs a truncated double series into the G equation
// with generic sparse products and returns every nonzero collected coefficient.

#include <map>
#include <utility>
#include <vector>

#include "singtrack/series/farfield.hpp"

namespace singtrack {

namespace detail {

// Laurent-type sum Σ c_e x^{e/2}, keyed by twice the exponent.
using HalfSeries = std::map<int, Rational>;

inline HalfSeries mul(const HalfSeries& a, const HalfSeries& b) {
    HalfSeries out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) out[ea + eb] += ca * cb;
    return out;
}

inline HalfSeries third_derivative(const HalfSeries& a) {
    HalfSeries out;
    for (const auto& [e2, c] : a) {
        Rational e(BigInt(e2), BigInt(2));
        Rational f = c * e * (e - 1) * (e - 2);
        if (f != 0) out[e2 - 6] += f;
    }
    return out;
}

inline void axpy(HalfSeries& y, const Rational& a, const HalfSeries& x) {
    for (const auto& [e, c] : x) y[e] += a * c;
}

}  // namespace detail

inline BivariatePoly outer_polynomial(int n) {
    using detail::HalfSeries;
    if (n < 0) throw Error(ErrorKind::ConfigInvalid, "negative degree");
    std::vector<HalfSeries> h(n + 1), d3(n + 1);
    h[0][-1] = 1;
    d3[0] = detail::third_derivative(h[0]);
    // cube[j] = [h³]_j, built incrementally.
    std::vector<HalfSeries> sq(n + 1), cube(n + 1);
    auto refresh = [&](int j) {
        HalfSeries s;
        for (int a = 0; a <= j; ++a) detail::axpy(s, 1, detail::mul(h[a], h[j - a]));
        sq[j] = s;
        HalfSeries c;
        for (int a = 0; a <= j; ++a) detail::axpy(c, 1, detail::mul(sq[a], h[j - a]));
        cube[j] = c;
    };
    refresh(0);
    for (int j = 0; j < n; ++j) {
        HalfSeries rhs;
        for (int a = 0; a <= j; ++a) detail::axpy(rhs, 1, detail::mul(cube[a], d3[j - a]));
        detail::axpy(rhs, rat(-1, 2), cube[j]);
        HalfSeries next;
        for (const auto& [e, c] : rhs)
            if (c != 0) next[e] = c / (j + 1);
        h[j + 1] = next;
        d3[j + 1] = detail::third_derivative(h[j + 1]);
        refresh(j + 1);
    }
    BivariatePoly P;
    P.degree = n;
    P.p.assign(n + 1, Rational(0));
    for (const auto& [e2, c] : h[n]) {
        if (c == 0) continue;
        // exponent -1/2 - n - 7m/2  <=>  e2 = -1 - 2n - 7m
        int r = -1 - 2 * n - e2;
        if (r < 0 || r % 7 != 0 || r / 7 > n)
            throw Error(ErrorKind::InternalInconsistency, "outer series produced an unexpected power");
        P.p[r / 7] = c;
    }
    return P;
}

struct ResidualTerm {
    int k;
    int twice_exponent;
    Rational value;
};

inline std::vector<ResidualTerm> pde_substitution_residual(const CoeffTable& t) {
    using detail::HalfSeries;
    const int K = t.kmax();
    std::vector<HalfSeries> g(K + 1), g3(K + 1);
    for (int k = 0; k <= K; ++k)
        for (int m = 0; m <= t.mmax(); ++m) g[k][-1 - 2 * k - 9 * m] = t(k, m);
    for (int k = 0; k <= K; ++k) g3[k] = detail::third_derivative(g[k]);

    // Products over all τ orders up to K+1 (beyond the frontier terms are incomplete but harmless).
    auto tau_mul = [&](const std::vector<HalfSeries>& a, const std::vector<HalfSeries>& b) {
        std::vector<HalfSeries> out(K + 1);
        for (int i = 0; i <= K; ++i)
            for (int j = 0; i + j <= K; ++j) detail::axpy(out[i + j], 1, detail::mul(a[i], b[j]));
        return out;
    };
    auto G2 = tau_mul(g, g);
    auto G3 = tau_mul(G2, g);
    auto G3D = tau_mul(G3, g3);

    std::map<std::pair<int, int>, Rational> res;
    for (int k = 0; k <= K; ++k) {
        for (const auto& [e2, c] : g[k]) {
            Rational e(BigInt(e2), BigInt(2));
            res[{k, e2}] += (rat(-1, 9) - rat(2, 9) * e + rat(7, 9) * k) * c;
        }
        if (k + 1 <= K)
            for (const auto& [e2, c] : G3[k]) res[{k + 1, e2}] += c / 2;
        for (const auto& [e2, c] : G3D[k]) res[{k, e2}] -= c;
    }
    std::vector<ResidualTerm> out;
    for (const auto& [key, v] : res)
        if (v != 0) out.push_back({key.first, key.second, v});
    return out;
}

// True when the monomial τ^k η^{e} lies inside the truncation frontier of the table.
inline bool inside_frontier(const CoeffTable& t, int k, int twice_exponent) {
    int r = -1 - 2 * k - twice_exponent;  // = 9m
    return k <= t.kmax() && r >= 0 && r % 9 == 0 && r / 9 <= t.mmax();
}

}  // namespace singtrack
