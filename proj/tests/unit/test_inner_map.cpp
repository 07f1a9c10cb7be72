#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "singtrack/g0/stokes_fit.hpp"

using namespace singtrack;
using std::abs;

namespace {

double rel(cplx a, cplx b) { return abs(a - b) / abs(b); }

const cplx& fittedC() {
    static const cplx C = fit_stokes_constant(60).C;
    return C;
}

}  // namespace

TEST_CASE("zeta_of_U: fixed values") {
    CHECK(abs(zeta_of_U(0.0) - cplx(std::log(4.0) - 2, -kPi)) < 1e-15);
    CHECK(abs(kZetaS - cplx(-0.6137056388801094, -3.141592653589793)) < 1e-15);

    cplx d = zeta_of_U(0.01) - kZetaS;
    CHECK(abs(d / (2.0 / 3 * std::pow(0.01, 1.5)) - 1.0) < 0.02);

    // ζ - ζ_s = 2 Σ_{k≥1} s^{2k+1}/(2k+1) with s = √U, summed in long double
    long double s = 0.5L, acc = 0, pw = s * s * s;
    for (int k = 1; k < 200; ++k, pw *= s * s) acc += 2 * pw / (2 * k + 1);
    CHECK(abs(zeta_of_U(0.25) - kZetaS - cplx(double(acc), 0)) < 1e-12);

    CHECK_THROWS_AS(zeta_of_U(1.0), Error);
    CHECK_THROWS_AS(zeta_of_U(-0.3), Error);
}

TEST_CASE("U_of_zeta: inverse pair and far field") {
    CHECK(abs(U_of_zeta(kZetaS)) < 1e-10);

    // ζ - ζ_s ~ (2/3)U^{3/2} wraps the U disk 1.5 times around ζ_s, so the inverse is single
    // valued only on a region close to |arg U| < 2π/3 (bent by the U^{5/2} term, hence the
    // 0.3 margin); elsewhere ζ(U_of_zeta(ζ)) = ζ still holds.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    double worst = 0, worst_zeta = 0;
    int n = 0;
    while (n < 100) {
        cplx U(u(rng), u(rng));
        if (abs(U) >= 0.5 || (U.real() < 0 && abs(U.imag()) < 1e-3)) continue;
        cplx z = zeta_of_U(U);
        worst_zeta = std::max(worst_zeta, abs(zeta_of_U(U_of_zeta(z)) - z));
        if (abs(std::arg(U)) >= 2 * kPi / 3 - 0.3) continue;
        worst = std::max(worst, abs(U_of_zeta(z) - U));
        ++n;
    }
    CHECK(worst < 1e-10);
    CHECK(worst_zeta < 1e-10);

    double prev = 1e300;
    for (double re : {10.0, 12.0, 14.0, 20.0, 40.0}) {
        cplx U = U_of_zeta(kZetaS + re);
        CHECK(abs(U - 1.0) < 1e-3);
        CHECK(abs(U - 1.0) < prev);
        prev = abs(U - 1.0);
    }
    // the far seed 1 - √U ≈ -8e^{-4}e^{-ζ} is the leading term of the exact inverse
    cplx z = kZetaS + 6.0;
    cplx s = std::sqrt(U_of_zeta(z));
    CHECK(rel(1.0 - s, -8.0 * std::exp(-4.0) * std::exp(-z)) < 0.05);
}

TEST_CASE("local law near ζ_s") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> r(0.0, 0.05), a(-kPi + 1e-3, kPi - 1e-3);
    for (int i = 0; i < 200; ++i) {
        cplx U = std::polar(r(rng), a(rng));
        cplx dev = zeta_of_U(U) - kZetaS - 2.0 / 3 * std::pow(std::sqrt(U), 3);
        CHECK(abs(dev) <= std::pow(abs(U), 2.5));
    }
}

TEST_CASE("eta_to_zeta") {
    CHECK(abs(eta_to_zeta(1.0, {1.0, 1}) - cplx(0, kWkbRate + kPi)) < 1e-15);
    CHECK(abs(eta_to_zeta(1.0, {1.0, 1}).imag() - 3.3511) < 1e-4);
    cplx eta(3, -11);
    CHECK(abs(eta_to_zeta(eta, {1.0, 8}) - eta_to_zeta(eta, {1.0, 7}) - cplx(0, 2 * kPi)) < 1e-12);
    auto lp = solve_lattice_point({cplx(2, 1), 25});
    REQUIRE(lp.converged);
    CHECK(abs(eta_to_zeta(lp.eta_s, {cplx(2, 1), 25}) - kZetaS) < 1e-10);
}

TEST_CASE("singularity lattice") {
    NewtonConfig nc;
    auto f = [](cplx e) { return lattice_residual(e, {1.0, 40}); };
    auto df = [](cplx e) { return I * kWkbRate * 2.25 * std::exp(1.25 * std::log(e)) + 1.125 / e; };
    nc.tol = 1e-10;
    auto r = newton_solve(f, df, lattice_seed({1.0, 40}), nc);
    CHECK(r.iterations <= 12);

    for (cplx C : {cplx(1.0), fittedC()}) {
        auto lat = singularity_lattice(C, 10, 60);
        double prev = 1e300;
        for (const auto& p : lat) {
            REQUIRE(p.converged);
            CHECK(p.residual <= 1e-10);
            CHECK(p.iterations <= 12);
            double gap = abs(std::arg(p.eta_s) + kSectorHalfAngle);
            if (p.n_hat >= 20) {
                CHECK(gap < prev);
                prev = gap;
            }
        }
    }
    CHECK_THROWS_AS(solve_lattice_point({0.0, 10}), Error);
}

TEST_CASE("composite_g0: far field inside the sector") {
    ZetaParams p{fittedC(), 40};
    for (double th : {-kPi / 9, -kPi / 4, -0.3 * kPi}) {
        cplx eta = std::polar(30.0, th);
        cplx ser = gk_farfield_eval(0, eta, 4, default_table())[0];
        CHECK(rel(composite_g0(eta, p), ser) < 1e-6);
    }
}

TEST_CASE("composite_g0: local amplitude") {
    ZetaParams p{fittedC(), 40};
    auto lp = solve_lattice_point(p);
    cplx x = 1e-4 * singular_scale(lp.eta_s) * std::polar(1.0, 0.7);
    cplx U = composite_g0(lp.eta_s + x, p) * std::sqrt(lp.eta_s + x);
    CHECK(rel(U, local_U_prefactor(lp.eta_s) * std::pow(x, 2.0 / 3)) < 0.05);
}

TEST_CASE("composite_g0 against traced G0 on the annulus") {
    ZetaParams p{fittedC(), 40};
    auto lp = solve_lattice_point(p);
    const double sc = singular_scale(lp.eta_s);
    // reach the annulus from above, then sweep half circles at several radii
    auto tr = trace_g0(approach_path(lp.eta_s + 0.5 * sc * I), 8, IntegratorConfig{});
    REQUIRE(tr.terminated_by == TraceEnd::PathEnd);
    double worst = 0;
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
        PathSpec q;
        if (r > 0.5) q.add(Segment::line(tr.back().eta, lp.eta_s + r * sc * I));
        q.add(Segment::arc(lp.eta_s, r * sc, kPi / 2, kPi, 4));
        auto a = continue_g0(tr.back(), q, IntegratorConfig{});
        PathSpec q2;
        if (r > 0.5) q2.add(Segment::line(tr.back().eta, lp.eta_s + r * sc * I));
        q2.add(Segment::arc(lp.eta_s, r * sc, kPi / 2, 0.0, 4));
        auto b = continue_g0(tr.back(), q2, IntegratorConfig{});
        for (const auto* t : {&a, &b})
            for (const auto& st : t->samples) {
                if (abs(abs(st.eta - lp.eta_s) - r * sc) > 1e-9) continue;
                worst = std::max(worst, rel(composite_g0(st.eta, p), st.jet[0]));
            }
    }
    CHECK(worst < 0.15);
}
