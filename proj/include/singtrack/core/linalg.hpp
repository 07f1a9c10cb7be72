#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "singtrack/core/errors.hpp"
#include "singtrack/core/path.hpp"

namespace singtrack {

// Dense row-major complex matrix, just enough for small normal-equation solves.
struct CMatrix {
    int rows = 0, cols = 0;
    std::vector<cplx> a;
    CMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
    cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    cplx operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

// Gaussian elimination with partial pivoting; throws IllConditionedFit on a singular pivot.
inline std::vector<cplx> solve_linear(CMatrix A, std::vector<cplx> b) {
    const int n = A.rows;
    double scale = 0;
    for (auto v : A.a) scale = std::max(scale, std::abs(v));
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A(r, c)) > std::abs(A(piv, c))) piv = r;
        if (!(std::abs(A(piv, c)) > 1e-14 * scale))
            throw Error(ErrorKind::IllConditionedFit, "singular linear system");
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(A(c, j), A(piv, j));
            std::swap(b[c], b[piv]);
        }
        for (int r = c + 1; r < n; ++r) {
            cplx f = A(r, c) / A(c, c);
            for (int j = c; j < n; ++j) A(r, j) -= f * A(c, j);
            b[r] -= f * b[c];
        }
    }
    std::vector<cplx> x(n);
    for (int r = n - 1; r >= 0; --r) {
        cplx s = b[r];
        for (int j = r + 1; j < n; ++j) s -= A(r, j) * x[j];
        x[r] = s / A(r, r);
    }
    return x;
}

// Least squares min |J x - r| through the normal equations (adequate for a handful of unknowns).
inline std::vector<cplx> least_squares(const CMatrix& J, const std::vector<cplx>& r) {
    CMatrix N(J.cols, J.cols);
    std::vector<cplx> rhs(J.cols);
    for (int i = 0; i < J.cols; ++i) {
        for (int j = 0; j < J.cols; ++j) {
            cplx s = 0;
            for (int k = 0; k < J.rows; ++k) s += std::conj(J(k, i)) * J(k, j);
            N(i, j) = s;
        }
        cplx s = 0;
        for (int k = 0; k < J.rows; ++k) s += std::conj(J(k, i)) * r[k];
        rhs[i] = s;
    }
    return solve_linear(N, rhs);
}

struct LineFit {
    double slope = 0, intercept = 0, slope_stderr = 0, rms = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 3) throw Error(ErrorKind::IllConditionedFit, "need at least 3 points");
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 1e-300)) throw Error(ErrorKind::IllConditionedFit, "abscissae do not vary");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - f.intercept - f.slope * x[i];
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    f.slope_stderr = std::sqrt(ss / (n - 2) / sxx);
    return f;
}

}  // namespace singtrack
