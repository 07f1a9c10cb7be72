#pragma once

#include <cmath>
#include <complex>

#include "singtrack/core/errors.hpp"
#include "singtrack/core/path.hpp"

namespace singtrack {

struct NewtonConfig {
    double tol = 1e-13;
    int max_iter = 50;
    double damping_floor = 1.0 / 64;

    void validate() const {
        if (!(tol > 0)) throw Error(ErrorKind::ConfigInvalid, "newton tol must be positive");
        if (max_iter < 1) throw Error(ErrorKind::ConfigInvalid, "newton max_iter must be >= 1");
        if (!(damping_floor > 0 && damping_floor <= 1))
            throw Error(ErrorKind::ConfigInvalid, "damping_floor must lie in (0,1]");
    }
};

struct NewtonResult {
    cplx root{};
    int iterations = 0;
    double residual = 0;
};

// Damped Newton iteration: halves the step while |f| does not decrease, down to damping_floor.
template <class F, class DF>
NewtonResult newton_solve(F&& f, DF&& df, cplx z0, const NewtonConfig& cfg = {}) {
    cfg.validate();
    cplx z = z0;
    cplx fz = f(z);
    for (int it = 0; it <= cfg.max_iter; ++it) {
        if (std::abs(fz) <= cfg.tol) return {z, it, std::abs(fz)};
        if (it == cfg.max_iter) break;
        cplx d = df(z);
        if (!(std::abs(d) > 1e-300) || !std::isfinite(std::abs(d)))
            throw Error(ErrorKind::DerivativeVanished, "derivative vanished during Newton iteration");
        cplx step = fz / d;
        double lambda = 1.0;
        cplx zn = z - step, fn = f(zn);
        while (!(std::abs(fn) < std::abs(fz)) && lambda > cfg.damping_floor) {
            lambda *= 0.5;
            zn = z - lambda * step;
            fn = f(zn);
        }
        z = zn;
        fz = fn;
    }
    throw Error(ErrorKind::NoConvergence, "Newton did not reach tolerance; residual " + std::to_string(std::abs(fz)));
}

}  // namespace singtrack
