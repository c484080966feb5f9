#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "fplab/grid.hpp"
#include "fplab/network.hpp"

namespace fplab {

struct IterationPolicy {
    double epsilon = 1e-5;
    std::size_t max_iters = 50;  // inclusive cap on map applications
};

enum class IterStatus { Converged, Unresolved };

struct IterationResult {
    Point start;
    IterStatus status = IterStatus::Unresolved;
    Point limit;        // valid iff Converged
    std::size_t steps = 0;
};

struct FixedPoint {
    Point p;                       // cluster centroid
    double residual = 0.0;         // ||Phi(p) - p||
    std::size_t support = 0;       // grid starts that converged here
    bool out_of_domain = false;    // centroid outside [-1,1]^2
    bool unstable_suspect = false; // single-start cluster whose neighbors leave it
};

struct FixedPointReport {
    std::vector<FixedPoint> fixed_points;
    std::vector<int> basin_label;          // per grid point; -1 = Unresolved
    std::vector<IterationResult> results;  // per grid point, grid order
    GridSpec grid;
    std::size_t q() const { return fixed_points.size(); }
    std::size_t unresolved_count() const;
    double unresolved_fraction() const;
};

// One trajectory of x^{m+1} = Phi(x^m) from x1. Stops as soon as the step
// norm drops below epsilon (Converged, limit = new iterate) or after
// max_iters applications (Unresolved). Iterates are not projected back into
// Omega. A non-finite iterate freezes the trajectory as Unresolved.
IterationResult iterate(const Network& net, Point x1, const IterationPolicy& policy);

// Batched version over arbitrary starts; bitwise identical to iterate() per
// start for any jobs value.
std::vector<IterationResult> iterate_many(const Network& net, const std::vector<Point>& starts,
                                          const IterationPolicy& policy, std::size_t jobs = 1);

// Runs iterate from every grid point, single-linkage clusters the converged
// limits at cluster_radius, reports cluster centroids as fixed points and
// labels each grid point with its cluster (or -1). Cluster order follows the
// smallest grid index of any member, so labels are stable across jobs.
FixedPointReport find_fixed_points(const Network& net, const GridSpec& spec,
                                   const IterationPolicy& policy, double cluster_radius,
                                   std::size_t jobs = 1);

// Artifact writers. CSV rows: j, l, x, y, label, steps, status.
std::string basins_to_csv(const FixedPointReport& rep);
// Plain-text PGM of labels, value = label + 1, 0 for unresolved; top row is
// the l = ny-1 grid row so the raster matches a conventional plot.
std::string basins_to_pgm(const FixedPointReport& rep);
std::string fixed_points_to_json(const FixedPointReport& rep);

}  // namespace fplab
