#pragma once
#include <cstddef>
#include <vector>

namespace fplab {

struct Point {
    double x = 0.0, y = 0.0;
};

// The square Omega = [-1,1]^2 with a delta-step lattice. Points per axis is
// floor(2/delta) + 1; the floor takes a 1e-9 nudge so a quotient landing one
// ulp below an integer still counts the endpoint.
struct GridSpec {
    double delta = 0.05;

    std::size_t points_per_axis() const;
    std::size_t total_points() const { return points_per_axis() * points_per_axis(); }
};

// Row-major enumeration: index k = l * nx + j, where x = -1 + delta*j and
// y = -1 + delta*l. First point (-1,-1), last (1,1) when delta divides 2.
std::vector<Point> make_grid(const GridSpec& spec);

}  // namespace fplab
