#pragma once

// Stokes constant from a traced singularity: seed with a lattice point, locate, invert.

#include "singtrack/g0/locate.hpp"
#include "singtrack/inner/inner_map.hpp"

namespace singtrack {

// Starting guess only; the fit replaces it.
inline const cplx kStokesGuess{2.435, 2.421};

struct StokesFit {
    cplx C{};
    int n_hat = 0;
    SingularityEstimate estimate;
    int passes = 0;
};

inline StokesFit fit_stokes_constant(int n_hat, cplx C_guess = kStokesGuess, const LocateConfig& cfg = {},
                                     int passes = 2) {
    StokesFit out;
    out.n_hat = n_hat;
    cplx C = C_guess;
    for (int i = 0; i < passes; ++i) {
        auto lp = solve_lattice_point({C, n_hat});
        if (!lp.converged) throw Error(ErrorKind::NoConvergence, "lattice seed: " + lp.error);
        out.estimate = locate_singularity(lp.eta_s, cfg);
        C = estimate_stokes_constant(out.estimate.eta_hat_s, n_hat);
        out.passes = i + 1;
    }
    out.C = C;
    return out;
}

}  // namespace singtrack
