#include "fplab/init.hpp"

#include <cmath>
#include <stdexcept>

namespace fplab {

double scale_for_layer(const DistributionSpec& dist, const std::vector<std::size_t>& widths,
                       std::size_t l) {
    const double n_in = static_cast<double>(widths[l]);
    const std::size_t L = widths.size() - 1;
    switch (dist.scale_rule) {
        case ScaleRule::PerLayerInverseWidth: return 1.0 / n_in;
        case ScaleRule::PowerLaw: return std::pow(n_in, -dist.beta);
        case ScaleRule::InverseSqrtDepth: return 1.0 / std::sqrt(static_cast<double>(L));
        case ScaleRule::Fixed: return dist.value;
    }
    return 1.0;
}

Network init_network(const std::vector<std::size_t>& widths, ActivationKind activation,
                     const DistributionSpec& dist, const Seed& seed) {
    if (widths.size() < 2) throw std::invalid_argument("init_network: need at least 2 widths");
    for (std::size_t w : widths)
        if (w < 1) throw std::invalid_argument("init_network: widths must be >= 1");

    Network net;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const std::size_t ni = widths[l], no = widths[l + 1];
        const double scale = scale_for_layer(dist, widths, l);
        Seed ws{seed.value, seed.stream_id + 2 * l};
        Seed bs{seed.value, seed.stream_id + 2 * l + 1};
        Layer layer;
        layer.activation = activation;
        layer.weights.rows = no;
        layer.weights.cols = ni;
        layer.weights.a = dist.family == Family::Gauss ? sample_gauss(ws, no * ni, scale)
                                                       : sample_cauchy(ws, no * ni, scale);
        if (dist.zero_bias) {
            layer.bias.assign(no, 0.0);
        } else {
            layer.bias = dist.family == Family::Gauss ? sample_gauss(bs, no, scale)
                                                      : sample_cauchy(bs, no, scale);
        }
        net.layers.push_back(std::move(layer));
    }
    net.params_id = family_name(dist.family) + ":" + std::to_string(seed.value) + ":" +
                    std::to_string(seed.stream_id);
    return net;
}

std::string family_name(Family f) {
    return f == Family::Gauss ? "gauss" : "cauchy";
}

Family parse_family(const std::string& name) {
    if (name == "gauss") return Family::Gauss;
    if (name == "cauchy") return Family::Cauchy;
    throw std::invalid_argument("unknown family: " + name);
}

}  // namespace fplab
