#pragma once

// τ-hierarchy algebra at a single point: sources R_k and the algebraic closure for G_k'''.
//
// With g = Σ_{j≥1} G_j z^j and d = Σ_{j≥1} G_j''' z^j the source splits as
//   R_k = ½[G³]_{k-1} - 3G₀G₀'''[g²]_k - G₀'''[g³]_k - 3G₀²[gd]_k - 3G₀[g²d]_k - [g³d]_k,
// where [G³]_0 = G₀³ and [G³]_{k-1} = 3G₀²G_{k-1} + 3G₀[g²]_{k-1} + [g³]_{k-1} for k ≥ 2.

#include <complex>
#include <vector>

#include "singtrack/core/errors.hpp"
#include "singtrack/core/path.hpp"
#include "singtrack/series/rational.hpp"

namespace singtrack {

inline double beta_k(int k) { return (7.0 * k - 1.0) / 9.0; }
inline Rational beta_k_exact(int k) { return rat(7 * k - 1, 9); }

// Convolution tables filled one order at a time; entry n only needs g_i, d_i with i < n.
class SourceWork {
public:
    explicit SourceWork(int kmax = 0) { resize(kmax); }

    void resize(int kmax) {
        for (auto* v : {&S2, &S3, &T2, &T3, &T4}) v->assign(kmax + 1, cplx(0));
    }

    // g[0..k-1], d[0..k-1] are values and third derivatives of G_0..G_{k-1};
    // entries 1..k-1 of the tables must already be filled by earlier calls.
    cplx source(int k, const cplx* g, const cplx* d) {
        if (k < 1) throw Error(ErrorKind::MissingLowerOrder, "R_k is defined for k >= 1");
        if (static_cast<int>(S2.size()) <= k) resize(k);
        cplx s2 = 0, s3 = 0, t2 = 0, t3 = 0, t4 = 0;
        for (int i = 1; i <= k - 1; ++i) {
            s2 += g[i] * g[k - i];
            t2 += g[k - i] * d[i];
        }
        for (int i = 1; i <= k - 2; ++i) {
            s3 += g[i] * S2[k - i];
            t3 += S2[k - i] * d[i];
        }
        for (int i = 1; i <= k - 3; ++i) t4 += S3[k - i] * d[i];
        S2[k] = s2;
        S3[k] = s3;
        T2[k] = t2;
        T3[k] = t3;
        T4[k] = t4;
        const cplx G0 = g[0], D0 = d[0];
        cplx cube = k == 1 ? G0 * G0 * G0 : 3.0 * G0 * G0 * g[k - 1] + 3.0 * G0 * S2[k - 1] + S3[k - 1];
        return 0.5 * cube - 3.0 * G0 * D0 * s2 - D0 * s3 - 3.0 * G0 * G0 * t2 - 3.0 * G0 * t3 - t4;
    }

private:
    std::vector<cplx> S2, S3, T2, T3, T4;
};

// R_k from complete lower-order data (convenience wrapper).
inline cplx compute_Rk(int k, const std::vector<cplx>& g, const std::vector<cplx>& d) {
    if (k < 1) throw Error(ErrorKind::MissingLowerOrder, "R_k is defined for k >= 1");
    if (static_cast<int>(g.size()) < k || static_cast<int>(d.size()) < k)
        throw Error(ErrorKind::MissingLowerOrder, "R_k needs G_j and G_j''' for all j < k");
    SourceWork w(k);
    for (int j = 1; j < k; ++j) w.source(j, g.data(), d.data());
    return w.source(k, g.data(), d.data());
}

// Homogeneous part of the closure: -(2η/(9G₀³))u' + (β_k/G₀³ - 3G₀'''/G₀)u.
inline cplx closure_linear(int k, cplx eta, cplx g0, cplx d0, cplx u, cplx u1) {
    cplx g03 = g0 * g0 * g0;
    return -(2.0 * eta / (9.0 * g03)) * u1 + (beta_k(k) / g03 - 3.0 * d0 / g0) * u;
}

// G_k''' = R_k/G₀³ + closure_linear(G_k)
inline cplx gk_third_derivative(int k, cplx eta, cplx g0, cplx d0, cplx gk, cplx gk1, cplx Rk) {
    return Rk / (g0 * g0 * g0) + closure_linear(k, eta, g0, d0, gk, gk1);
}

inline cplx g0_third_unchecked(cplx eta, cplx g, cplx g1) { return -(g / 9.0 + 2.0 * eta * g1 / 9.0) / (g * g * g); }

// Third derivatives (and sources) of orders 0..K at one point from values and first derivatives.
// `top_scale` multiplies the source of order K only.
inline void hierarchy_thirds(cplx eta, int K, const cplx* g, const cplx* g1, cplx* d, cplx* R, SourceWork& w,
                             double floor = 0.0, double top_scale = 1.0) {
    if (!(std::abs(g[0]) > floor)) throw Error(ErrorKind::SingularityFloor, "G0 at or below the singularity floor");
    d[0] = g0_third_unchecked(eta, g[0], g1[0]);
    R[0] = 0;
    for (int k = 1; k <= K; ++k) {
        R[k] = w.source(k, g, d);
        if (k == K) R[k] *= top_scale;
        d[k] = gk_third_derivative(k, eta, g[0], d[0], g[k], g1[k], R[k]);
    }
}

}  // namespace singtrack
