#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "fplab/network.hpp"
#include "fplab/rng.hpp"

namespace fplab {

enum class Family { Gauss, Cauchy };

enum class ScaleRule {
    PerLayerInverseWidth,  // scale = 1 / (input width of the layer)
    PowerLaw,              // scale = N^-beta, N = input width of the layer
    InverseSqrtDepth,      // scale = 1 / sqrt(L), same for every layer
    Fixed,                 // scale = value
};

struct DistributionSpec {
    Family family = Family::Gauss;
    ScaleRule scale_rule = ScaleRule::PerLayerInverseWidth;
    double beta = 0.0;    // PowerLaw exponent
    double value = 0.0;   // Fixed scale
    bool zero_bias = false;
};

// Scale for layer l of a net with the given widths (n_in = widths[l]).
double scale_for_layer(const DistributionSpec& dist, const std::vector<std::size_t>& widths,
                       std::size_t l);

// Weights of layer l draw from stream_id 2l, biases from 2l+1, all on the
// seed's value; entry order is row-major. Per-layer streams are independent
// so construction order never matters.
Network init_network(const std::vector<std::size_t>& widths, ActivationKind activation,
                     const DistributionSpec& dist, const Seed& seed);

std::string family_name(Family f);
Family parse_family(const std::string& name);

}  // namespace fplab
