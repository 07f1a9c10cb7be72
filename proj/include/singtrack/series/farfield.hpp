#pragma once

// Far-field coefficients c_{k,m} of G_k(η) = η^{-1/2-k} Σ_m c_{k,m} η^{-9m/2}.
//
// Substituting G = Σ c_{k,m} τ^k η^{e(k,m)}, e(k,m) = -1/2 - k - 9m/2, into
//   -G/9 - (2/9)η G_η + (7/9)τ G_τ + (τ/2) G³ - G³ G_ηηη = 0
// and collecting τ^k η^{e(k,m)} gives
//   d(k,m) c_{k,m} + ½ [C³]_{k-1,m} - [C³·D]_{k,m-1} = 0,
// with d(k,m) = -1/9 - (2/9)e + (7/9)k = k + m and D_{k,m} = c_{k,m} e(e-1)(e-2).

#include <array>
#include <complex>
#include <vector>

#include "singtrack/core/errors.hpp"
#include "singtrack/core/path.hpp"
#include "singtrack/series/rational.hpp"

namespace singtrack {

inline Rational farfield_exponent(int k, int m) { return rat(-1, 2) - k - rat(9, 2) * m; }

// Coefficient multiplying c_{k,m} in its own collected equation.
inline Rational diagonal_factor(int k, int m) {
    Rational e = farfield_exponent(k, m);
    return rat(-1, 9) - rat(2, 9) * e + rat(7, 9) * k;
}

class CoeffTable {
public:
    CoeffTable() = default;
    CoeffTable(int kmax, int mmax) : kmax_(kmax), mmax_(mmax), c_((kmax + 1) * (mmax + 1)) {}

    int kmax() const { return kmax_; }
    int mmax() const { return mmax_; }
    bool has(int k, int m) const { return k >= 0 && m >= 0 && k <= kmax_ && m <= mmax_; }
    const Rational& operator()(int k, int m) const {
        if (!has(k, m)) throw Error(ErrorKind::TableTooSmall, "coefficient outside table");
        return c_[k * (mmax_ + 1) + m];
    }
    Rational& at(int k, int m) { return c_[k * (mmax_ + 1) + m]; }

private:
    int kmax_ = -1, mmax_ = -1;
    std::vector<Rational> c_;
};

inline CoeffTable compute_farfield_table(int kmax, int mmax) {
    if (kmax < 0 || mmax < 0) throw Error(ErrorKind::ConfigInvalid, "kmax, mmax must be >= 0");
    CoeffTable t(kmax, mmax);
    const int W = mmax + 1;
    std::vector<Rational> A2((kmax + 1) * W), A3((kmax + 1) * W), D((kmax + 1) * W);
    auto idx = [W](int k, int m) { return k * W + m; };

    for (int k = 0; k <= kmax; ++k) {
        for (int m = 0; m <= mmax; ++m) {
            Rational diag = diagonal_factor(k, m);
            if (diag != Rational(k + m))
                throw Error(ErrorKind::InternalInconsistency, "diagonal factor differs from k+m");
            if (k == 0 && m == 0) {
                t.at(0, 0) = 1;
            } else {
                Rational cubic = 0, quartic = 0;
                if (k >= 1) cubic = A3[idx(k - 1, m)];
                if (m >= 1)
                    for (int k1 = 0; k1 <= k; ++k1)
                        for (int m1 = 0; m1 <= m - 1; ++m1) quartic += A3[idx(k1, m1)] * D[idx(k - k1, m - 1 - m1)];
                if (diag == 0)
                    throw Error(ErrorKind::InternalInconsistency, "vanishing diagonal factor at k+m >= 1");
                t.at(k, m) = (quartic - cubic / 2) / diag;
            }
            Rational e = farfield_exponent(k, m);
            D[idx(k, m)] = t(k, m) * e * (e - 1) * (e - 2);
            Rational s2 = 0;
            for (int k1 = 0; k1 <= k; ++k1)
                for (int m1 = 0; m1 <= m; ++m1) s2 += t(k1, m1) * t(k - k1, m - m1);
            A2[idx(k, m)] = s2;
            Rational s3 = 0;
            for (int k1 = 0; k1 <= k; ++k1)
                for (int m1 = 0; m1 <= m; ++m1) s3 += A2[idx(k1, m1)] * t(k - k1, m - m1);
            A3[idx(k, m)] = s3;
        }
    }
    return t;
}

// Homogeneous polynomial Σ_m p_m a^m b^{n-m}.
struct BivariatePoly {
    int degree = 0;
    std::vector<Rational> p;  // p[m] multiplies a^m b^{n-m}

    bool operator==(const BivariatePoly& o) const { return degree == o.degree && p == o.p; }
};

// P_n(a, b) with a = t/(y-t)^{9/2}, b = t/(y-t): p_{n,m} = c_{n-m,m}.
inline BivariatePoly reconstruct_P(int n, const CoeffTable& table) {
    if (n < 0 || n > table.kmax() || n > table.mmax())
        throw Error(ErrorKind::TableTooSmall, "table too small for P_n");
    BivariatePoly P;
    P.degree = n;
    P.p.resize(n + 1);
    for (int m = 0; m <= n; ++m) P.p[m] = table(n - m, m);
    return P;
}

using Jet3 = std::array<cplx, 3>;

// Truncated far-field series for G_k and its first two derivatives (principal η^{-1/2}).
inline Jet3 gk_farfield_eval(int k, cplx eta, int mmax, const CoeffTable& table) {
    if (!table.has(k, mmax)) throw Error(ErrorKind::TableTooSmall, "table too small for requested (k, mmax)");
    const cplx rs = 1.0 / std::sqrt(eta);
    cplx base = rs * std::pow(eta, -k);  // η^{-1/2-k}
    const cplx step = std::pow(rs, 9);    // η^{-9/2}
    Jet3 out{0, 0, 0};
    cplx first = 0, last = 0;
    cplx pw = base;
    for (int m = 0; m <= mmax; ++m) {
        double c = to_double(table(k, m));
        double e = to_double(farfield_exponent(k, m));
        cplx term = c * pw;
        out[0] += term;
        out[1] += e * term / eta;
        out[2] += e * (e - 1) * term / (eta * eta);
        if (m == 0) first = term;
        last = term;
        pw *= step;
    }
    if (mmax >= 1 && !(std::abs(last) < 1e-3 * std::abs(first)))
        throw Error(ErrorKind::SeriesNotAsymptotic, "last retained term not below 1e-3 of the first");
    return out;
}

}  // namespace singtrack
