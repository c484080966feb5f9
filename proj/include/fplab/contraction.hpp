#pragma once
#include <cstddef>
#include <optional>
#include <vector>

#include "fplab/grid.hpp"
#include "fplab/init.hpp"
#include "fplab/network.hpp"

namespace fplab {

struct ContractionSample {
    double beta = 0.0;
    std::size_t width_N = 0;
    std::size_t depth_L = 0;
    ActivationKind activation = ActivationKind::Tanh;
    double g = 0.0;
    Seed seed;
};

struct ContractionCurve {
    std::vector<ContractionSample> samples;
    std::optional<double> beta_cr;
    std::string diagnostic;  // set when the curve never crosses g = 1
};

struct LayerStats {
    double preactivation_variance = 0.0;
    std::size_t width_N = 0;
    double sigma = 0.0;
};

// All grid pairs, or a seeded uniform subsample of `count` pairs plus every
// nearest-neighbor pair (the difference quotient peaks locally).
struct PairBudget {
    bool all = true;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    static PairBudget All() { return {}; }
    static PairBudget Sample(std::size_t count, std::uint64_t seed) { return {false, count, seed}; }
};

// Max over grid-point pairs of ||Phi(x) - Phi(x')|| / ||x - x'||. Grid points
// are zero-padded into the net input width when n_0 > 2, so a single NxN
// layer acts on embedded 2-D points; output distance runs over all n_L
// components.
double contraction_constant(const Network& net, const GridSpec& spec, const PairBudget& budget,
                            std::size_t jobs = 1);

// Gauss PowerLaw(beta) nets of the given widths; g per (beta, seed), beta_cr
// from the crossing of the seed-averaged curve with 1 (linear interpolation
// between the bracketing betas).
ContractionCurve beta_sweep(const std::vector<std::size_t>& widths, ActivationKind activation,
                            const std::vector<double>& betas, const std::vector<Seed>& seeds,
                            const GridSpec& spec, std::size_t jobs = 1);

struct DepthCurveRow {
    std::size_t L = 0;
    double mean_g = 0.0;
};

struct DepthCurve {
    std::vector<DepthCurveRow> rows;
    std::vector<ContractionSample> samples;
    double slope = 0.0;      // least-squares fit of log mean_g vs L
    double intercept = 0.0;
    double r2 = 0.0;
};

// Square nets width_N wide, depth L layers, Gauss PowerLaw(beta); seeds are
// drawn independently per depth.
DepthCurve depth_curve(std::size_t width_N, ActivationKind activation, double beta,
                       const std::vector<std::size_t>& depths, std::size_t n_seeds,
                       std::uint64_t master_seed, const GridSpec& spec, std::size_t jobs = 1);

// Empirical variance of the components of y = Wx + b over seeds, Gauss
// entries of scale sigma, x all-ones (unit-magnitude components).
LayerStats preactivation_variance(std::size_t width_N, double sigma, std::size_t n_seeds,
                                  std::uint64_t master_seed);

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace fplab
