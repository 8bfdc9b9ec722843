// Walks the intersection of <x t, y> and <x, y> in F2 x Z: the projection
// lattice M is not of full rank, so the intersection is only enumerable.
#include "fta/fta.hpp"

#include <iostream>

int main() {
    using namespace fta;
    AmbientGroup g{2, AbelianSpec::free(1)};
    auto h1 = stallings(g, {parse_element("x1 t^(1)", g), parse_element("x2", g)});
    auto h2 = stallings(g, {parse_element("x1", g), parse_element("x2", g)});

    IntersectionStream stream(IntersectionProblem(h1, h2));
    const auto& rep = stream.report();
    std::cout << "r = " << rep.r << ", s = " << rep.s << ", verdict: " << to_string(rep.verdict) << "\n";
    for (std::size_t n = 0; n <= 3; ++n) {
        auto step = stream.at_radius(n);
        std::cout << "radius " << n << ":";
        for (const auto& b : step.basis) std::cout << "  " << format_element(b);
        std::cout << "\n";
    }
}
