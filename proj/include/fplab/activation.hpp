#pragma once
#include <cmath>
#include <string>

namespace fplab {

enum class ActivationKind { Tanh, HardTanh, Sigmoid, Identity };

inline double apply_activation(ActivationKind k, double x) {
    switch (k) {
        case ActivationKind::Tanh:     return std::tanh(x);
        case ActivationKind::HardTanh: return x > 1.0 ? 1.0 : (x < -1.0 ? -1.0 : x);
        case ActivationKind::Sigmoid:  return 1.0 / (1.0 + std::exp(-x));
        case ActivationKind::Identity: return x;
    }
    return x;
}

// HardTanh derivative is 1 on [-1,1] inclusive; keeps gradients alive when a
// preactivation sits exactly on the clamp boundary.
inline double activation_derivative(ActivationKind k, double x) {
    switch (k) {
        case ActivationKind::Tanh: {
            double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case ActivationKind::HardTanh: return (x >= -1.0 && x <= 1.0) ? 1.0 : 0.0;
        case ActivationKind::Sigmoid: {
            double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
        case ActivationKind::Identity: return 1.0;
    }
    return 1.0;
}

std::string activation_name(ActivationKind k);
ActivationKind parse_activation(const std::string& name);

}  // namespace fplab
