#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "singtrack/core/contour.hpp"
#include "singtrack/core/cubic.hpp"
#include "singtrack/core/newton.hpp"
#include "singtrack/core/ode.hpp"

using namespace singtrack;
using std::abs;

namespace {

auto exp_rhs = [](cplx, const std::vector<cplx>& y, std::vector<cplx>& dy) { dy[0] = y[0]; };

std::array<cplx, 3> companion_roots(cplx p, cplx q) {
    Eigen::Matrix3cd M;
    M << 0, -p, -q, 1, 0, 0, 0, 1, 0;
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(M);
    auto ev = es.eigenvalues();
    return {ev[0], ev[1], ev[2]};
}

double matched_distance(std::array<cplx, 3> a, std::array<cplx, 3> b) {
    std::array<int, 3> perm{0, 1, 2};
    double best = 1e300;
    do {
        double d = 0;
        for (int i = 0; i < 3; ++i) d = std::max(d, abs(a[i] - b[perm[i]]));
        best = std::min(best, d);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST_CASE("integrate_ode: exponential along a straight path") {
    PathSpec p;
    p.add(Segment::line(0.0, 1.0));
    IntegratorConfig cfg;
    auto tr = integrate_ode(exp_rhs, p, {1.0}, cfg);
    REQUIRE(tr.termination == Termination::PathEnd);
    CHECK(abs(tr.back().y[0] - std::exp(1.0)) / std::exp(1.0) < 1e-11);
}

TEST_CASE("integrate_ode: complex path and arc segments") {
    // y' = y from 0 to 1 along a detour through 1+i: result is path independent.
    PathSpec p;
    p.add(Segment::line(0.0, cplx(0, 1))).line_to(cplx(1, 1)).line_to(1.0);
    auto tr = integrate_ode(exp_rhs, p, {1.0}, IntegratorConfig{});
    CHECK(abs(tr.back().y[0] - std::exp(1.0)) < 1e-11);

    PathSpec arc;
    arc.add(Segment::arc(0.0, 1.0, 0.0, std::numbers::pi / 2));
    auto ta = integrate_ode(exp_rhs, arc, {std::exp(1.0)}, IntegratorConfig{});
    CHECK(abs(ta.back().y[0] - std::exp(cplx(0, 1))) < 1e-11);
}

TEST_CASE("integrate_ode: pole on the path raises StepUnderflow with the last good point") {
    auto rhs = [](cplx z, const std::vector<cplx>&, std::vector<cplx>& dy) { dy[0] = 1.0 / (z - 0.5); };
    PathSpec p;
    p.add(Segment::line(0.0, cplx(1.0, 1e-15)));
    IntegratorConfig cfg;
    cfg.min_step = 1e-10;
    try {
        integrate_ode(rhs, p, {0.0}, cfg);
        FAIL("expected StepUnderflow");
    } catch (const StepUnderflow& e) {
        CHECK(e.kind() == ErrorKind::StepUnderflow);
        CHECK(abs(e.z_last - 0.5) < 1e-3);
        CHECK(e.z_last.real() < 0.5);
        CHECK(std::isfinite(abs(e.y_last[0])));
    }
}

TEST_CASE("integrate_ode: max steps") {
    PathSpec p;
    p.add(Segment::line(0.0, 1.0));
    IntegratorConfig cfg;
    cfg.max_steps = 3;
    CHECK_THROWS_AS(integrate_ode(exp_rhs, p, {1.0}, cfg), Error);
}

TEST_CASE("integrator order: halving max_step reduces error by at least 2^4") {
    // Fixed steps forced by a loose tolerance and a max_step cap.
    auto rhs = [](cplx z, const std::vector<cplx>& y, std::vector<cplx>& dy) { dy[0] = cplx(0, 3) * y[0] * std::cos(z); };
    PathSpec p;
    p.add(Segment::line(0.0, 2.0));
    auto exact = std::exp(cplx(0, 3) * std::sin(2.0));
    IntegratorConfig cfg;
    cfg.rel_tol = 1.0;
    cfg.abs_tol = 1.0;
    cfg.max_step = 0.1;
    cfg.min_step = 1e-6;
    double e1 = abs(integrate_ode(rhs, p, {1.0}, cfg).back().y[0] - exact);
    cfg.max_step = 0.05;
    double e2 = abs(integrate_ode(rhs, p, {1.0}, cfg).back().y[0] - exact);
    CHECK(e1 / e2 >= 16.0);
}

TEST_CASE("path concatenation matches a single path") {
    auto rhs = [](cplx z, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        dy[0] = y[1];
        dy[1] = -z * y[0];
    };
    IntegratorConfig cfg;
    PathSpec ab, bc, ac;
    ab.add(Segment::line(0.0, cplx(1, 1)));
    bc.add(Segment::line(cplx(1, 1), cplx(2, 0)));
    ac.add(Segment::line(0.0, cplx(1, 1))).line_to(cplx(2, 0));
    auto t1 = integrate_ode(rhs, ab, {1.0, 0.0}, cfg);
    auto t2 = integrate_ode(rhs, bc, t1.back().y, cfg);
    auto t3 = integrate_ode(rhs, ac, {1.0, 0.0}, cfg);
    for (int i = 0; i < 2; ++i)
        CHECK(abs(t2.back().y[i] - t3.back().y[i]) <= 2 * cfg.rel_tol * abs(t3.back().y[i]) + 1e-13);
}

TEST_CASE("forced nodes and Hermite interpolation") {
    PathSpec p;
    p.add(Segment::line(0.0, 1.0, 10));
    auto tr = integrate_path(exp_rhs, p, {1.0}, IntegratorConfig{}, Record::NodesOnly);
    REQUIRE(tr.samples.size() == 11);
    for (const auto& s : tr.samples) CHECK(abs(s.y[0] - std::exp(s.z)) < 1e-11);
    auto full = integrate_path(exp_rhs, p, {1.0}, IntegratorConfig{});
    auto y = full.interpolate(0.537);
    CHECK(abs(y[0] - std::exp(0.537)) < 1e-8);
}

TEST_CASE("newton_solve") {
    auto r = newton_solve([](cplx z) { return z * z - 2.0; }, [](cplx z) { return 2.0 * z; }, 1.0);
    CHECK(abs(r.root - std::sqrt(2.0)) < 1e-12);
    auto s = newton_solve([](cplx z) { return z * z + 1.0; }, [](cplx z) { return 2.0 * z; }, cplx(0, 0.5));
    CHECK(abs(s.root - cplx(0, 1)) < 1e-12);
    CHECK_THROWS_AS(newton_solve([](cplx z) { return z * z + 1.0; }, [](cplx) { return cplx(0); }, 1.0), Error);
    NewtonConfig c;
    c.max_iter = 2;
    CHECK_THROWS_AS(newton_solve([](cplx z) { return std::exp(z) - 1e6; }, [](cplx z) { return std::exp(z); }, 0.0, c),
                    Error);
}

TEST_CASE("solve_depressed_cubic: fixed cases") {
    auto r = solve_depressed_cubic(0.0, -1.0);
    std::array<cplx, 3> unity{1.0, std::polar(1.0, 2 * std::numbers::pi / 3), std::polar(1.0, -2 * std::numbers::pi / 3)};
    CHECK(matched_distance(r, unity) < 1e-14);

    cplx chi = 100.0;
    auto big = solve_depressed_cubic((2.0 / 9) * std::pow(chi, 2.5), -std::pow(chi, 1.5));
    std::array<cplx, 3> asym{cplx(0, std::sqrt(2.0 / 9)) * std::pow(chi, 1.25),
                             cplx(0, -std::sqrt(2.0 / 9)) * std::pow(chi, 1.25), 4.5 / chi};
    for (const auto& a : asym) {
        double best = 1e300;
        for (const auto& x : big) best = std::min(best, abs(x - a) / abs(a));
        CHECK(best < 0.01);
    }

    auto one = solve_depressed_cubic(2.0 / 9, -1.0);
    CHECK(matched_distance(one, companion_roots(2.0 / 9, -1.0)) < 1e-10);
}

TEST_CASE("solve_depressed_cubic: random oracle sweep and repeated roots") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double max_res = 0, max_dist = 0;
    for (int i = 0; i < 1000; ++i) {
        cplx p, q;
        do p = cplx(10 * u(rng), 10 * u(rng)); while (abs(p) > 10);
        do q = cplx(10 * u(rng), 10 * u(rng)); while (abs(q) > 10);
        auto r = solve_depressed_cubic(p, q);
        for (auto a : r) max_res = std::max(max_res, abs(a * a * a + p * a + q) / (1 + std::pow(abs(a), 3)));
        CHECK(abs(r[0] * r[1] * r[2] + q) <= 1e-10 * (1 + abs(q)));
        max_dist = std::max(max_dist, matched_distance(r, companion_roots(p, q)));
    }
    CHECK(max_res <= 1e-12);
    CHECK(max_dist <= 1e-10);

    // (a-1)^2 (a+2) = a^3 - 3a + 2
    auto d = solve_depressed_cubic(-3.0, 2.0);
    std::sort(d.begin(), d.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(abs(d[0] + 2.0) < 1e-14);
    CHECK(abs(d[1] - 1.0) < 1e-8);
    CHECK(abs(d[2] - 1.0) < 1e-8);
    auto z = solve_depressed_cubic(0.0, 0.0);
    for (auto a : z) CHECK(a == cplx(0));
}

TEST_CASE("contour_integral: residues") {
    cplx c(0.3, -0.2);
    auto circle = PathSpec::circle(c, 1.0);
    auto s1 = sample_closed_path(circle, 64, [&](cplx z) { return 1.0 / (z - c); });
    auto r1 = contour_integral(circle, s1);
    CHECK(abs(r1.value - 1.0) < 1e-10);

    auto s0 = sample_closed_path(circle, 64, [](cplx) { return cplx(1.0); });
    auto r0 = contour_integral(circle, s0);
    CHECK(abs(r0.value) < 1e-12);
    CHECK(abs(r0.value) <= r0.error_estimate);

    auto s23 = sample_closed_path(circle, 64, [&](cplx z) { return (2.0 / 3) / (z - c); });
    CHECK(abs(contour_integral(circle, s23).value - 2.0 / 3) < 1e-10);

    // analytic inside: bounded by its own error estimate
    auto sa = sample_closed_path(circle, 32, [](cplx z) { return std::exp(z) * std::cos(3.0 * z); });
    auto ra = contour_integral(circle, sa);
    CHECK(abs(ra.value) <= ra.error_estimate);

    PathSpec open;
    open.add(Segment::line(0.0, 1.0));
    CHECK_THROWS_AS(contour_integral(open, s1), Error);
}
