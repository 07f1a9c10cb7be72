#include <catch2/catch_amalgamated.hpp>

#include "singtrack/g0/stokes_fit.hpp"
#include "singtrack/verify/verify.hpp"

using namespace singtrack;
using std::abs;

namespace {

const SingularityEstimate& located10() {
    static const SingularityEstimate e = locate_singularity(solve_lattice_point({kStokesGuess, 10}).eta_s);
    return e;
}

const HierarchyStore& store8() {
    static const HierarchyStore st = solve_hierarchy(annulus_config(located10().eta_hat_s, 8, 2000));
    return st;
}

}  // namespace

TEST_CASE("winding_number: manufactured functions") {
    const cplx c(0.3, -0.2);
    auto frac = analytic_provider([&](cplx z) { return std::pow(z - c, 2.0 / 3); },
                                  [&](cplx z) { return 2.0 / 3 * std::pow(z - c, -1.0 / 3); });
    auto w = winding_number(frac, c, 0.1, 256);
    CHECK(abs(w.value.real() - 2.0 / 3) < 1e-3);
    CHECK(abs(w.value.imag()) <= w.error_estimate + 1e-12);
    CHECK(w.n_samples == 512);

    // nonvanishing analytic function inside the circle: 0 at any radius
    auto shift = analytic_provider([](cplx z) { return 2.0 + z; }, [](cplx) { return cplx(1); });
    for (double r : {1.0, 0.5, 0.25}) {
        auto w0 = winding_number(shift, 0.0, r, 64);
        CHECK(abs(w0.value) <= w0.error_estimate + 1e-12);
    }
    // double zero and a pole inside: 2 − 1, stable under halving the radius
    auto mero = analytic_provider([](cplx z) { return z * z / (z - 0.1); },
                                  [](cplx z) { return (z * z - 0.2 * z) / ((z - 0.1) * (z - 0.1)); });
    auto a = winding_number(mero, 0.0, 0.8, 256), b = winding_number(mero, 0.0, 0.4, 256);
    CHECK(abs(a.value - 1.0) < 1e-8);
    CHECK(abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-12);

    auto zero = analytic_provider([](cplx z) { return z - 1.0; }, [](cplx) { return cplx(1); });
    try {
        winding_number(zero, 0.0, 1.0, 64);
        FAIL("expected ZeroOnContour");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroOnContour);
    }
    CHECK_THROWS_AS(winding_number(shift, 0.0, 1.0, 7), Error);
}

TEST_CASE("winding_number: traced G0 around its singularity") {
    const auto& e = located10();
    const double scale = singular_scale(e.eta_hat_s), radius = 2 * scale;
    const G0State a = e.approach.back();
    const double th = std::arg(a.eta - e.eta_hat_s);
    auto w = winding_number(g0_circle_provider(a, IntegratorConfig{}, th), e.eta_hat_s, radius, 512, {1e-12, th});
    // the O(ε^{1/3}) remainder as a 0.05 + ε^{1/3} band
    CHECK(abs(w.value.real() - 2.0 / 3) <= 0.05 + std::cbrt(radius));
    CHECK(w.error_estimate < 1e-4);
    // the deviation shrinks with the radius
    auto w2 = winding_number(g0_circle_provider(a, IntegratorConfig{}, th), e.eta_hat_s, 0.25 * scale, 512, {1e-12, th});
    CHECK(abs(w2.value.real() - 2.0 / 3) < abs(w.value.real() - 2.0 / 3));
    // a circle that does not enclose the singularity
    cplx off = e.eta_hat_s + 4.0 * scale * (a.eta - e.eta_hat_s) / abs(a.eta - e.eta_hat_s);
    auto prov = g0_circle_provider(a, IntegratorConfig{}, th + std::numbers::pi);
    auto w0 = winding_number(prov, off, 1.5 * scale, 256, {1e-12, th + std::numbers::pi});
    CHECK(abs(w0.value) < 1e-6);
}

TEST_CASE("winding_number: partial sum of the hierarchy") {
    const auto& st = store8();
    const auto& e = located10();
    const size_t end = st.nodes.size() - 1;
    const double th = std::arg(st.nodes[end].eta - e.eta_hat_s);
    auto w = winding_number(partial_sum_provider(st, end, 0.02, 8, th), e.eta_hat_s,
                            kPartialSumWindingRadius * st.scale(), 512, {1e-12, th});
    CHECK(abs(w.value.real() - 2.0 / 3) < 0.07);
    CHECK_THROWS_AS(partial_sum_provider(st, end, 0.02, 9), Error);
}

TEST_CASE("branch_order_fit") {
    const cplx c(1.0, -2.0);
    std::vector<cplx> z, f, g, h;
    for (double r : {1e-3, 2e-3, 4e-3, 8e-3})
        for (int k = 0; k < 8; ++k) {
            cplx x = std::polar(r, 0.3 + k * 0.7);
            z.push_back(c + x);
            f.push_back(std::pow(x, 2.0 / 3) * (1.0 + 0.1 * x));
            g.push_back(3.0 * x * (1.0 + 0.5 * x));
            h.push_back(cplx(-7.5, 2) * f.back());
        }
    auto a = branch_order_fit(z, f, c);
    CHECK(abs(a.order - 2.0 / 3) < 0.01);
    CHECK(a.confidence >= 0);
    CHECK(abs(branch_order_fit(z, g, c).order - 1.0) < 0.01);
    // scale invariance
    CHECK(abs(branch_order_fit(z, h, c).order - a.order) < 1e-12);

    std::vector<cplx> ring(z.begin(), z.begin() + 8), fr(f.begin(), f.begin() + 8);
    CHECK_THROWS_AS(branch_order_fit(ring, fr, c), Error);

    // traced G₀ on the fit annulus of the located singularity
    const auto& e = located10();
    const double scale = singular_scale(e.eta_hat_s);
    const G0State a0 = e.approach.back();
    cplx u = (a0.eta - e.eta_hat_s) / abs(a0.eta - e.eta_hat_s);
    auto data = sample_partial_annulus(a0, e.eta_hat_s, u, 0.002 * scale, 0.01 * scale, 16, IntegratorConfig{});
    CHECK(abs(branch_order_fit(data.z, data.g, e.eta_hat_s).order - 2.0 / 3) < 0.02);
}

TEST_CASE("lattice_consistency") {
    std::vector<cplx> l{cplx(1, 2), cplx(3, 4)};
    auto same = lattice_consistency({1, 2}, l, l);
    CHECK(same.gap == std::vector<double>{0.0, 0.0});

    const cplx C = fit_stokes_constant(60).C;
    std::vector<int> n;
    std::vector<cplx> traced, lattice;
    for (int k = 20; k <= 50; ++k) {
        auto lp = solve_lattice_point({C, k});
        REQUIRE(lp.converged);
        n.push_back(k);
        lattice.push_back(lp.eta_s);
        traced.push_back(locate_singularity(lp.eta_s).eta_hat_s);
    }
    auto r = lattice_consistency(n, traced, lattice);
    CHECK(r.monotone_decrease);
    CHECK(r.gap.back() < r.gap.front());
    CHECK_THROWS_AS(lattice_consistency({1}, l, l), Error);
}

TEST_CASE("convergence_probe") {
    const auto& st = store8();
    const size_t end = st.nodes.size() - 1;
    auto p = convergence_probe(st, end, {0.0, 0.02, 0.5 / 8.5, 0.5}, 8);
    REQUIRE(p.rows.size() == 4);
    for (int k = 1; k <= 8; ++k) CHECK(p.rows[0].term[k] == 0.0);
    CHECK(p.rows[0].term[0] > 0);
    CHECK(p.A_node > 1);
    CHECK(p.rows[1].tau < p.radius);
    CHECK(p.rows[1].geometric);
    CHECK_FALSE(p.rows[1].diverging);
    // terms shrink monotonically over the upper half below the radius, grow above it
    for (int k = 4; k < 8; ++k) {
        CHECK(p.rows[1].term[k + 1] < p.rows[1].term[k]);
        CHECK(p.rows[3].term[k + 1] > p.rows[3].term[k]);
    }
    CHECK(p.rows[3].tau > p.radius);
    CHECK(p.rows[3].diverging);
    CHECK_FALSE(p.rows[3].geometric);
}
