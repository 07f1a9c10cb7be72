#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <random>

#include "singtrack/io/export.hpp"

using namespace singtrack;
using namespace singtrack::io;

TEST_CASE("fmt_real: 17 significant digits that round-trip") {
    CHECK(fmt_real(1.0) == "1.0000000000000000e+00");
    CHECK(fmt_real(-0.0) == "0.0000000000000000e+00");
    CHECK(fmt_real(-2.5e-300) == "-2.5000000000000000e-300");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 1000; ++i) {
        double x = std::ldexp(u(rng), int(u(rng)));
        std::string s = fmt_real(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
        // mantissa digits: d.dddddddddddddddd
        auto e = s.find('e');
        CHECK(e - (s[0] == '-' ? 1 : 0) == 18);
    }
}

TEST_CASE("dump_json: sorted keys, flat scalar arrays, independent of insertion order") {
    json a = json::object(), b = json::object();
    a["zeta"] = 1;
    a["alpha"] = json::array({0.5, -0.25});
    b["alpha"] = json::array({0.5, -0.25});
    b["zeta"] = 1;
    CHECK(dump_json(a) == dump_json(b));
    CHECK(dump_json(a) == "{\n  \"alpha\": [5.0000000000000000e-01, -2.5000000000000000e-01],\n  \"zeta\": 1\n}\n");
    CHECK(dump_json(a, -1) == "{\"alpha\":[5.0000000000000000e-01, -2.5000000000000000e-01],\"zeta\":1}\n");
    json n = {{"x", std::numeric_limits<double>::quiet_NaN()}};
    CHECK(dump_json(n, -1) == "{\"x\":\"nan\"}\n");
}

TEST_CASE("dump_json output parses back to the same values") {
    json j = {{"c", complex_json({1.0 / 3, -2.0 / 7})}, {"r", rational_json(Rational(-5, 16))}, {"k", 12}};
    json back = json::parse(dump_json(j));
    CHECK(complex_from_json(back["c"]) == cplx(1.0 / 3, -2.0 / 7));
    CHECK(rational_from_json(back["r"]) == Rational(-5, 16));
    CHECK(back["r"]["num"] == "-5");
    CHECK(back["k"] == 12);
}

TEST_CASE("complex_from_json rejects anything but [re, im]") {
    CHECK_THROWS_AS(complex_from_json(json::array({1.0})), Error);
    CHECK_THROWS_AS(complex_from_json(json::object()), Error);
    CHECK_THROWS_AS(complex_from_json(json::array({"1", 2})), Error);
}

TEST_CASE("Csv: header first, rows of matching width") {
    Csv c({"a", "b"});
    c.add({"1", "2"});
    CHECK(c.str() == "a,b\n1,2\n");
    CHECK_THROWS_AS(c.add({"1"}), Error);
}

TEST_CASE("fnv1a_hex: reference vectors") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("export_plotdata: lattice columns and unknown kinds") {
    std::vector<LatticePoint> pts(2);
    pts[0].n_hat = 10;
    pts[0].eta_s = {1.5, -12.0};
    pts[0].residual = 1e-14;
    pts[1].n_hat = 11;
    pts[1].eta_s = {2.0, -13.0};
    std::string csv = export_plotdata(json::parse(dump_json(lattice_json(pts))), "lattice");
    CHECK(csv.substr(0, csv.find('\n')) == "n_hat,re,im,residual");
    CHECK(csv.find("10,1.5000000000000000e+00,-1.2000000000000000e+01,1.0000000000000000e-14\n") != std::string::npos);
    try {
        export_plotdata(json::object(), "histogram");
        FAIL("expected UnknownArtifact");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownArtifact);
    }
    CHECK_THROWS_AS(export_plotdata(json::object(), "lattice"), Error);
    CHECK_THROWS_AS(export_plotdata(json{{"artifact", "series"}}, "norms"), Error);
}

TEST_CASE("boundary export: corners sit on the polyline and on the sector edges") {
    DomainE d;
    const int per = 16;
    json b = json::parse(dump_json(boundary_json(d, 30, per)));
    const auto& poly = b["polyline"];
    REQUIRE(poly.size() == size_t(4 * per + 1));
    CHECK(complex_from_json(poly[per]) == complex_from_json(b["corners"]["chi2"]));
    CHECK(complex_from_json(poly[2 * per]) == complex_from_json(b["corners"]["chi3"]));
    CHECK(complex_from_json(poly[3 * per]) == complex_from_json(b["corners"]["chi1"]));
    // χ₁, χ₂ lie on the rays arg z = ∓(2π/9 − δ) and at distance ρ from χ₃ = ε
    const double th = 2 * std::numbers::pi / 9 - d.delta;
    cplx c1 = complex_from_json(b["corners"]["chi1"]), c2 = complex_from_json(b["corners"]["chi2"]);
    CHECK(std::abs(std::arg(c1) + th) < 1e-14);
    CHECK(std::abs(std::arg(c2) - th) < 1e-14);
    CHECK(std::abs(std::abs(c1 - d.eps) - std::abs(c2 - d.eps)) < 1e-15);
    CHECK(std::abs(std::arg(c2 - d.eps) - 2 * std::numbers::pi / 3) < 1e-14);
    std::string csv = export_plotdata(b, "boundary");
    CHECK(csv.substr(0, csv.find('\n')) == "re,im");
}

TEST_CASE("manifest: hash tracks the resolved config only") {
    json cfg = {{"study", "series"}, {"parameters", {{"kmax", 6}, {"mmax", 6}}}, {"seed_rng", 7}};
    std::vector<OutputFile> outs{{"series.json", "{}\n"}};
    json m1 = manifest_json(cfg, outs), m2 = manifest_json(cfg, {});
    CHECK(m1["config_hash"] == m2["config_hash"]);
    cfg["parameters"]["kmax"] = 5;
    CHECK(manifest_json(cfg, outs)["config_hash"] != m1["config_hash"]);
    CHECK(m1["outputs"][0]["bytes"] == 3);
    CHECK(m1["outputs"][0]["fnv1a64"] == fnv1a_hex("{}\n"));
    CHECK(m1.contains("tool_version"));
    CHECK(!m1.contains("timestamp"));
}
