#include <catch2/catch_amalgamated.hpp>

#include "singtrack/series/farfield.hpp"
#include "singtrack/series/outer.hpp"

using namespace singtrack;

TEST_CASE("far-field table: displayed coefficients") {
    auto t = compute_farfield_table(3, 2);
    CHECK(t(0, 0) == rat(1));
    CHECK(t(0, 1) == rat(-15, 8));
    CHECK(t(1, 0) == rat(-1, 2));
    CHECK(t(0, 2) == rat(25875, 128));
    CHECK(t(1, 1) == rat(195, 32));
    CHECK(t(2, 0) == rat(3, 8));
    CHECK(t(3, 0) == rat(-5, 16));
}

TEST_CASE("far-field table: A_k follow the binomial series of (1+1/η)^{-1/2}") {
    // Independent closed form for the m = 0 column: substituting G = (η+τ)^{-1/2}
    // into the G equation annihilates the m = 0 collected terms.
    auto t = compute_farfield_table(10, 0);
    Rational b = 1;
    for (int k = 0; k <= 10; ++k) {
        CHECK(t(k, 0) == b);
        b = b * (rat(-1, 2) - k) / (k + 1);
    }
}

TEST_CASE("far-field table: diagonal factor equals k+m") {
    for (int k = 0; k < 6; ++k)
        for (int m = 0; m < 6; ++m) CHECK(diagonal_factor(k, m) == Rational(k + m));
}

TEST_CASE("far-field table: entries are stable when the table grows") {
    auto small = compute_farfield_table(4, 3);
    auto big = compute_farfield_table(7, 6);
    for (int k = 0; k <= 4; ++k)
        for (int m = 0; m <= 3; ++m) CHECK(small(k, m) == big(k, m));
}

TEST_CASE("reconstruct_P: displayed polynomials") {
    auto t = compute_farfield_table(3, 3);
    auto P0 = reconstruct_P(0, t);
    REQUIRE(P0.p.size() == 1);
    CHECK(P0.p[0] == rat(1));
    auto P1 = reconstruct_P(1, t);
    CHECK(P1.p[1] == rat(-15, 8));  // a
    CHECK(P1.p[0] == rat(-1, 2));   // b
    auto P2 = reconstruct_P(2, t);
    CHECK(P2.p[2] == rat(25875, 128));
    CHECK(P2.p[1] == rat(195, 32));
    CHECK(P2.p[0] == rat(3, 8));
    CHECK_THROWS_AS(reconstruct_P(4, t), Error);
}

TEST_CASE("cross-expansion identity against the outer recursion") {
    auto t = compute_farfield_table(6, 6);
    for (int n = 0; n <= 6; ++n) CHECK(reconstruct_P(n, t) == outer_polynomial(n));
}

TEST_CASE("substitution residual lives beyond the truncation frontier") {
    auto t = compute_farfield_table(4, 3);
    auto res = pde_substitution_residual(t);
    CHECK(!res.empty());
    for (const auto& r : res) CHECK_FALSE(inside_frontier(t, r.k, r.twice_exponent));
}

TEST_CASE("gk_farfield_eval") {
    auto t = compute_farfield_table(3, 8);
    CHECK(std::abs(gk_farfield_eval(0, 10.0, 0, t)[0] - 1 / std::sqrt(10.0)) < 1e-15);
    CHECK(std::abs(gk_farfield_eval(1, 10.0, 0, t)[0] + 0.5 * std::pow(10.0, -1.5)) < 1e-15);

    // derivatives against finite differences
    cplx eta(20, -5);
    auto j = gk_farfield_eval(1, eta, 4, t);
    double h = 1e-4;
    auto jp = gk_farfield_eval(1, eta + h, 4, t), jm = gk_farfield_eval(1, eta - h, 4, t);
    CHECK(std::abs((jp[0] - jm[0]) / (2 * h) - j[1]) < 1e-9 * std::abs(j[1]));
    CHECK(std::abs((jp[1] - jm[1]) / (2 * h) - j[2]) < 1e-9 * std::abs(j[2]));

    CHECK_THROWS_AS(gk_farfield_eval(0, 1.0, 8, t), Error);
}

TEST_CASE("gk_farfield_eval: tail bound") {
    auto t = compute_farfield_table(0, 5);
    double bound = std::abs(to_double(t(0, 5))) * std::pow(5.0, -0.5 - 22.5) * 1.1;
    cplx a, b;
    bool asymptotic = true;
    try {
        a = gk_farfield_eval(0, 5.0, 4, t)[0];
        b = gk_farfield_eval(0, 5.0, 5, t)[0];
    } catch (const Error&) {
        asymptotic = false;
    }
    if (asymptotic) CHECK(std::abs(a - b) < bound);
    // at η = 20 the series is comfortably asymptotic
    auto c = gk_farfield_eval(0, 20.0, 4, t)[0], d = gk_farfield_eval(0, 20.0, 5, t)[0];
    CHECK(std::abs(c - d) < std::abs(to_double(t(0, 5))) * std::pow(20.0, -23.0) * 1.1);
}
