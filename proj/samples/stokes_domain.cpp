// Corners of the WKB domain and the sign of d/dr Re P_j along its left boundary.

#include <cstdio>

#include "singtrack/stokes/stokes.hpp"

using namespace singtrack;

int main() {
    DomainE d;
    for (auto [name, z] : {std::pair{"chi1", d.chi1()}, {"chi2", d.chi2()}, {"chi3", d.chi3()}})
        std::printf("%s = %.12f %+.12fi\n", name, z.real(), z.imag());
    std::printf("turning point |chi_t| = %.12f\n", turning_modulus());
    auto got = left_boundary_signs(d), want = expected_left_boundary_signs();
    for (int j = 0; j < 3; ++j)
        std::printf("mode %d: upper %+d lower %+d (expected %+d %+d, min |rate| %.3g)\n", j + 1, got.sign[j][0],
                    got.sign[j][1], want.sign[j][0], want.sign[j][1],
                    std::min(got.min_abs_rate[j][0], got.min_abs_rate[j][1]));
}
