#pragma once
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fplab/fixpoint.hpp"
#include "fplab/init.hpp"

namespace fplab {

struct SweepConfig {
    std::size_t width_N0 = 100;
    std::vector<std::size_t> depths;
    DistributionSpec family;
    ActivationKind activation = ActivationKind::Tanh;
    std::size_t n_seeds = 1;
    GridSpec grid;
    IterationPolicy policy;
    double cluster_radius = 1e-3;
    std::uint64_t master_seed = 0;  // seed list = derive_seed(master, L, i)
};

struct DepthSummary {
    std::size_t L = 0;
    std::map<std::size_t, std::size_t> histogram;  // Q -> seed count
    std::size_t mode_q = 0;                        // ties break toward smaller Q
    double mean_q = 0.0;
    double unresolved_fraction = 0.0;  // over all starts of all seeds
};

struct SweepReport {
    SweepConfig config;
    std::vector<DepthSummary> per_depth;
    // fixed points per (depth index, seed index), for the JSON archive
    std::vector<std::vector<std::vector<FixedPoint>>> fixed_points;
};

// Most frequent Q; ties break toward the smaller Q value.
std::size_t mode_of(const std::map<std::size_t, std::size_t>& histogram);

// Architectures are autoencoders {2, N0 x (L-1), 2}. For each depth and seed:
// init_network -> find_fixed_points -> record Q (Unresolved starts are
// excluded from Q but counted in unresolved_fraction).
SweepReport run_sweep(const SweepConfig& cfg, std::size_t jobs = 1);

// One CSV row per depth: L, mode, mean, histogram JSON, unresolved fraction.
std::string summarize(const SweepReport& report);

std::string sweep_fixed_points_json(const SweepReport& report);

}  // namespace fplab
