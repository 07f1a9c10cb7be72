#pragma once

// Inner map ζ(U) = ζ_s - 2√U - ln((1-√U)/(1+√U)), ζ_s = log 4 - 2 - iπ, its inverse,
// the η → ζ chart and the singularity lattice.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "singtrack/core/cubic.hpp"
#include "singtrack/core/newton.hpp"

namespace singtrack {

inline constexpr double kPi = std::numbers::pi;
inline const double kWkbRate = 4 * std::sqrt(2.0) / 27;  // 4√2/27
inline const cplx kZetaS = cplx(std::log(4.0) - 2.0, -kPi);

struct ZetaParams {
    cplx stokes_C{1.0, 0.0};
    int n_hat = 1;

    void validate() const {
        if (stokes_C == cplx(0)) throw Error(ErrorKind::ConfigInvalid, "Stokes constant must be nonzero");
        if (n_hat < 1) throw Error(ErrorKind::ConfigInvalid, "n_hat must be >= 1");
    }
};

inline cplx zeta_of_s(cplx s) { return kZetaS - 2.0 * s - std::log((1.0 - s) / (1.0 + s)); }

inline cplx zeta_of_U(cplx U) {
    if (U == cplx(1.0)) throw Error(ErrorKind::BranchPoint, "U = 1 is a logarithmic branch point");
    if (U.imag() == 0.0 && U.real() < 0.0) throw Error(ErrorKind::SqrtCut, "U on the negative real axis");
    return zeta_of_s(std::sqrt(U));
}

// dζ/dU = √U/(1-U)
inline cplx dzeta_dU(cplx U) {
    cplx s = std::sqrt(U);
    return s / (1.0 - U);
}

struct InverseConfig {
    NewtonConfig newton{1e-14, 60, 1.0 / 1024};
    double seed_switch = 1.0;  // |ζ-ζ_s| below which the local seed is tried first
};

// Principal-sheet inverse: √U has Re ≥ 0 and zeta_of_U(U) = ζ.
inline cplx U_of_zeta(cplx zeta, const InverseConfig& cfg = {}) {
    cplx d = zeta - kZetaS;
    if (d == cplx(0)) return 0.0;
    // Far out, √U = 1 + ε with ε = (2+ε) q e^{-2ε}, q = 4e^{-4}e^{-ζ}; Newton in s would lose ε to rounding.
    const cplx q = 4.0 * std::exp(-4.0 - zeta);
    if (std::abs(q) < 1e-3 && std::abs(zeta.imag() + kPi) <= kPi) {
        cplx eps = 2.0 * q;
        for (int i = 0; i < 30; ++i) {
            cplx next = (2.0 + eps) * q * std::exp(-2.0 * eps);
            if (std::abs(next - eps) <= 1e-17 * std::abs(next)) {
                eps = next;
                break;
            }
            eps = next;
        }
        return (1.0 + eps) * (1.0 + eps);
    }
    const cplx s_near = principal_cbrt(1.5 * d);
    const cplx s_far = 1.0 + 8.0 * std::exp(-4.0) * std::exp(-zeta);
    const cplx s_big = -0.5 * d;
    std::vector<cplx> seeds = std::abs(d) < cfg.seed_switch ? std::vector<cplx>{s_near, s_far, s_big}
                                                            : std::vector<cplx>{s_far, s_near, s_big};
    auto f = [&](cplx s) { return zeta_of_s(s) - zeta; };
    auto df = [](cplx s) { return 2.0 * s * s / (1.0 - s * s); };
    NewtonConfig nc = cfg.newton;
    nc.tol = cfg.newton.tol * (1 + std::abs(zeta));
    bool wrong_sheet = false;
    for (cplx s0 : seeds) {
        try {
            auto r = newton_solve(f, df, s0, nc);
            cplx s = r.root;
            if (s.real() < 0 || (s.real() == 0 && s.imag() < 0)) {
                wrong_sheet = true;
                continue;
            }
            return s * s;
        } catch (const Error&) {
        }
    }
    if (wrong_sheet) throw Error(ErrorKind::WrongSheet, "inverse converged off the principal sheet");
    throw Error(ErrorKind::NoConvergence, "inverse of the inner map did not converge");
}

// ζ = -log C + (9/8) log η + i(4√2/27) η^{9/4} + (2n̂-1)iπ, principal branches.
inline cplx eta_to_zeta(cplx eta, const ZetaParams& p) {
    cplx le = std::log(eta);
    return -std::log(p.stokes_C) + 1.125 * le + I * kWkbRate * std::exp(2.25 * le) +
           cplx(0, (2.0 * p.n_hat - 1) * kPi);
}

// Lattice equation residual: i c η^{9/4} + (9/8)log η + 2 - log 4 + 2n̂iπ - log C.
inline cplx lattice_residual(cplx eta, const ZetaParams& p) {
    cplx le = std::log(eta);
    return I * kWkbRate * std::exp(2.25 * le) + 1.125 * le + 2.0 - std::log(4.0) + cplx(0, 2.0 * p.n_hat * kPi) -
           std::log(p.stokes_C);
}

// Dominant balance seed with one log correction, on the branch arg η^{9/4} ≈ -π.
inline cplx lattice_seed(const ZetaParams& p) {
    auto invert = [&](cplx logs) {
        cplx w = (-2.0 + std::log(4.0) - cplx(0, 2.0 * p.n_hat * kPi) + std::log(p.stokes_C) - logs) /
                 (I * kWkbRate);
        double a = std::arg(w);
        if (a > 0) a -= 2 * kPi;  // keep arg near -π
        return std::exp((4.0 / 9) * cplx(std::log(std::abs(w)), a));
    };
    cplx eta = invert(0.0);
    for (int i = 0; i < 2; ++i) eta = invert(1.125 * std::log(eta));
    return eta;
}

struct LatticePoint {
    int n_hat = 0;
    cplx eta_s{};
    double residual = 0;
    int iterations = 0;
    bool converged = false;
    std::string error;
};

inline LatticePoint solve_lattice_point(const ZetaParams& p, const NewtonConfig& nc = {1e-13, 50, 1.0 / 64}) {
    p.validate();
    LatticePoint lp;
    lp.n_hat = p.n_hat;
    auto f = [&](cplx e) { return lattice_residual(e, p); };
    auto df = [&](cplx e) { return I * kWkbRate * 2.25 * std::exp(1.25 * std::log(e)) + 1.125 / e; };
    NewtonConfig c = nc;
    c.tol = nc.tol * (1 + 2 * kPi * p.n_hat);  // terms of size 2πn̂ cancel in the residual
    try {
        auto r = newton_solve(f, df, lattice_seed(p), c);
        lp.eta_s = r.root;
        lp.residual = r.residual;
        lp.iterations = r.iterations;
        lp.converged = true;
    } catch (const Error& e) {
        lp.error = e.what();
    }
    return lp;
}

inline std::vector<LatticePoint> singularity_lattice(cplx stokes_C, int n_min, int n_max) {
    std::vector<LatticePoint> out;
    for (int n = n_min; n <= n_max; ++n) out.push_back(solve_lattice_point({stokes_C, n}));
    return out;
}

// C = exp(i c η̂^{9/4} + (9/8) log η̂ + 2 - log 4 + 2n̂iπ)
inline cplx estimate_stokes_constant(cplx eta_hat, int n_hat) {
    cplx le = std::log(eta_hat);
    if (std::abs(le.imag()) > kPi - 1e-6)
        throw Error(ErrorKind::BranchAmbiguity, "arg of eta_hat is too close to the log branch cut");
    return std::exp(I * kWkbRate * std::exp(2.25 * le) + 1.125 * le + 2.0 - std::log(4.0) +
                    cplx(0, 2.0 * n_hat * kPi));
}

// Shift ζ by a multiple of 2πi into the principal strip Im(ζ - ζ_s) ∈ (-π, π].
inline cplx reduce_to_strip(cplx zeta) {
    double m = std::round((zeta - kZetaS).imag() / (2 * kPi));
    return zeta - cplx(0, 2 * kPi * m);
}

// G₀ ≈ η^{-1/2} U(ζ(η)) with the sheet of the nearest lattice copy of ζ_s.
inline cplx composite_g0(cplx eta, const ZetaParams& p, const InverseConfig& cfg = {}) {
    cplx z = reduce_to_strip(eta_to_zeta(eta, p));
    return U_of_zeta(z, cfg) / std::sqrt(eta);
}

// Prefactor of U ≈ A·(η-η_s)^{2/3}: A = e^{iπ/3} η_s^{5/6} 2^{-1/3} (1 - 27i/(8√2) η_s^{-9/4})^{2/3}.
inline cplx local_U_prefactor(cplx eta_s) {
    cplx le = std::log(eta_s);
    cplx corr = 1.0 - cplx(0, 27.0 / (8 * std::sqrt(2.0))) * std::exp(-2.25 * le);
    return std::polar(1.0, kPi / 3) * std::exp((5.0 / 6) * le) * std::pow(2.0, -1.0 / 3) *
           std::exp((2.0 / 3) * std::log(corr));
}

// Local amplitude of G₀ ≈ K (η-η̂)^{2/3}: K³ = -η̂/2 at leading order.
inline cplx local_g0_amplitude(cplx eta_s) {
    return std::polar(1.0, kPi / 3) * std::exp(std::log(eta_s / 2.0) / 3.0);
}

}  // namespace singtrack
