#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "fplab/activation.hpp"

namespace fplab {

// Row-major dense matrix, nothing fancy.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    const double* row(std::size_t r) const { return a.data() + r * cols; }
};

struct Layer {
    Mat weights;               // n_out x n_in
    std::vector<double> bias;  // n_out
    ActivationKind activation = ActivationKind::Tanh;

    std::size_t n_in() const { return weights.cols; }
    std::size_t n_out() const { return weights.rows; }
};

struct Network {
    std::vector<Layer> layers;
    std::string params_id;  // seed + distribution descriptor, for provenance

    std::size_t depth() const { return layers.size(); }
    std::size_t n_in() const { return layers.front().n_in(); }
    std::size_t n_out() const { return layers.back().n_out(); }
    std::vector<std::size_t> widths() const;
    bool autoencoder_shaped() const { return !layers.empty() && n_in() == n_out(); }
};

// Throws ShapeError if consecutive layer shapes do not chain or a bias length
// mismatches its weight rows.
void check_network(const Network& net);

std::vector<double> layer_forward(const Layer& layer, const std::vector<double>& x);
std::vector<double> forward(const Network& net, const std::vector<double>& x0);

// Batched forward: X holds nrows inputs of length net.n_in(), row-major.
// Each output row is computed independently with ascending-index accumulation,
// so results are bitwise identical to forward() row by row and do not depend
// on how rows are batched or scheduled.
std::vector<double> forward_batch(const Network& net, const std::vector<double>& X,
                                  std::size_t nrows);

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);

}  // namespace fplab
