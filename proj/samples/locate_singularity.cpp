// Seeds the n_hat = 10 singularity from the lattice, then locates it by tracing G0.

#include <cstdio>

#include "singtrack/g0/stokes_fit.hpp"

using namespace singtrack;

int main() {
    auto lp = solve_lattice_point({kStokesGuess, 10});
    if (!lp.converged) {
        std::fprintf(stderr, "lattice seed failed: %s\n", lp.error.c_str());
        return 1;
    }
    std::printf("lattice seed   %.10f %+.10fi\n", lp.eta_s.real(), lp.eta_s.imag());
    auto est = locate_singularity(lp.eta_s);
    std::printf("located        %.10f %+.10fi\n", est.eta_hat_s.real(), est.eta_hat_s.imag());
    std::printf("branch order   %.4f +- %.4f\n", est.branch_order, est.branch_order_stderr);
    cplx C = estimate_stokes_constant(est.eta_hat_s, 10);
    std::printf("implied C      %.6f %+.6fi\n", C.real(), C.imag());
}
