// Prints the far-field coefficients c_{k,m} and the polynomials P_n rebuilt from them.

#include <iostream>

#include "singtrack/series/farfield.hpp"

using namespace singtrack;

int main() {
    const auto t = compute_farfield_table(4, 3);
    for (int k = 0; k <= t.kmax(); ++k) {
        for (int m = 0; m <= t.mmax(); ++m)
            std::cout << "c[" << k << "," << m << "] = " << to_string(t(k, m)) << "   (eta^" << to_string(farfield_exponent(k, m))
                      << ")\n";
    }
    for (int n = 0; n <= 3; ++n) {
        std::cout << "P_" << n << ":";
        for (const auto& v : reconstruct_P(n, t).p) std::cout << " " << to_string(v);
        std::cout << "\n";
    }
}
