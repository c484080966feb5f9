#include "fplab/network.hpp"

#include <cmath>

#include <json.hpp>

#include "fplab/errors.hpp"

namespace fplab {

std::vector<std::size_t> Network::widths() const {
    std::vector<std::size_t> w;
    if (layers.empty()) return w;
    w.push_back(layers.front().n_in());
    for (const auto& l : layers) w.push_back(l.n_out());
    return w;
}

void check_network(const Network& net) {
    if (net.layers.empty()) throw std::invalid_argument("network has no layers");
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& l = net.layers[i];
        if (l.bias.size() != l.n_out())
            throw ShapeError("layer bias length", l.n_out(), l.bias.size());
        if (i > 0 && l.n_in() != net.layers[i - 1].n_out())
            throw ShapeError("layer input width", net.layers[i - 1].n_out(), l.n_in());
    }
}

// Single row kernel shared by all forward paths: fixed ascending-k dot
// product, so batching and threading cannot change a single bit.
static void affine_activate_row(const Layer& layer, const double* x, double* y) {
    const std::size_t no = layer.n_out(), ni = layer.n_in();
    for (std::size_t o = 0; o < no; ++o) {
        const double* w = layer.weights.row(o);
        double acc = 0.0;
        for (std::size_t k = 0; k < ni; ++k) acc += w[k] * x[k];
        y[o] = apply_activation(layer.activation, acc + layer.bias[o]);
    }
}

std::vector<double> layer_forward(const Layer& layer, const std::vector<double>& x) {
    if (x.size() != layer.n_in())
        throw ShapeError("layer_forward input length", layer.n_in(), x.size());
    std::vector<double> y(layer.n_out());
    affine_activate_row(layer, x.data(), y.data());
    return y;
}

std::vector<double> forward(const Network& net, const std::vector<double>& x0) {
    check_network(net);
    if (x0.size() != net.n_in())
        throw ShapeError("forward input length", net.n_in(), x0.size());
    std::vector<double> cur = x0, next;
    for (const Layer& l : net.layers) {
        next.resize(l.n_out());
        affine_activate_row(l, cur.data(), next.data());
        cur.swap(next);
    }
    return cur;
}

std::vector<double> forward_batch(const Network& net, const std::vector<double>& X,
                                  std::size_t nrows) {
    check_network(net);
    if (X.size() != nrows * net.n_in())
        throw ShapeError("forward_batch input size", nrows * net.n_in(), X.size());
    std::vector<double> cur = X, next;
    for (const Layer& l : net.layers) {
        next.resize(nrows * l.n_out());
        for (std::size_t r = 0; r < nrows; ++r)
            affine_activate_row(l, cur.data() + r * l.n_in(), next.data() + r * l.n_out());
        cur.swap(next);
    }
    return cur;
}

std::string network_to_json(const Network& net) {
    nlohmann::ordered_json j;
    j["widths"] = net.widths();
    j["params_id"] = net.params_id;
    auto& layers = j["layers"] = nlohmann::ordered_json::array();
    for (const Layer& l : net.layers) {
        nlohmann::ordered_json jl;
        jl["activation"] = activation_name(l.activation);
        jl["rows"] = l.weights.rows;
        jl["cols"] = l.weights.cols;
        jl["weights"] = l.weights.a;  // row-major
        jl["bias"] = l.bias;
        layers.push_back(std::move(jl));
    }
    return j.dump(2);
}

Network network_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Network net;
    net.params_id = j.value("params_id", std::string{});
    for (const auto& jl : j.at("layers")) {
        Layer l;
        l.activation = parse_activation(jl.at("activation").get<std::string>());
        l.weights.rows = jl.at("rows").get<std::size_t>();
        l.weights.cols = jl.at("cols").get<std::size_t>();
        l.weights.a = jl.at("weights").get<std::vector<double>>();
        if (l.weights.a.size() != l.weights.rows * l.weights.cols)
            throw ShapeError("weights array size", l.weights.rows * l.weights.cols,
                             l.weights.a.size());
        l.bias = jl.at("bias").get<std::vector<double>>();
        net.layers.push_back(std::move(l));
    }
    check_network(net);
    return net;
}

std::string activation_name(ActivationKind k) {
    switch (k) {
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::HardTanh: return "hardtanh";
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Identity: return "identity";
    }
    return "tanh";
}

ActivationKind parse_activation(const std::string& name) {
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "hardtanh") return ActivationKind::HardTanh;
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "identity") return ActivationKind::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

}  // namespace fplab
