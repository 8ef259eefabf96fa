// Locate the equilibria and 2-cycles of one parameter set and classify a
// few initial ratios.

#include <cstdio>

#include "ratiodyn/ratiodyn.hpp"

int main() {
    using namespace ratiodyn;
    const parameters prm{0.1, 1.79, -2.0, 1.0};

    for (const auto& e : equilibria(prm))
        std::printf("equilibrium %.6f  phi' = %.6f (%s)\n", e.value, e.multiplier, to_string(e.kind));
    for (const auto& c : find_two_cycles(prm))
        std::printf("2-cycle (%.6f, %.6f)  pq = %.6f  multiplier = %.6f\n", c.p, c.q, c.product, c.multiplier);

    for (double t0 : {0.3, 1.0, 3.0}) {
        const auto v = classify(prm, 1.0, t0);
        std::printf("x0/x_-1 = %.2f -> %s [%s]\n", t0, to_string(v.cls), v.rule.c_str());
    }
}
