#ifndef XTFC_ACTIVATION_HPP
#define XTFC_ACTIVATION_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xtfc {

/// Scalar activations available for the hidden layer. Every kind supports
/// closed-form derivatives up to order 4; no finite differencing is used
/// anywhere in production code paths.
enum class ActivationKind { logistic, tanh, sin, gaussian };

inline std::string to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::logistic: return "logistic";
        case ActivationKind::tanh: return "tanh";
        case ActivationKind::sin: return "sin";
        case ActivationKind::gaussian: return "gaussian";
    }
    throw std::invalid_argument("unknown activation kind");
}

inline ActivationKind parse_activation(std::string_view name) {
    if (name == "logistic") return ActivationKind::logistic;
    if (name == "tanh") return ActivationKind::tanh;
    if (name == "sin") return ActivationKind::sin;
    if (name == "gaussian") return ActivationKind::gaussian;
    throw std::invalid_argument("unknown activation '" + std::string(name) +
                                "' (expected logistic|tanh|sin|gaussian)");
}

namespace detail {

// Stable logistic: never exponentiates a large positive argument.
inline double logistic_value(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace detail

/// sigma^(order)(z) for the requested activation. Orders 0..4 only; the
/// derivatives are closed-form recurrences in the order-0 value.
inline double activate(ActivationKind kind, double z, int order = 0) {
    if (order < 0 || order > 4)
        throw std::invalid_argument("activation derivative order must be in [0,4], got " +
                                    std::to_string(order));
    switch (kind) {
        case ActivationKind::logistic: {
            const double s = detail::logistic_value(z);
            const double u = s * (1.0 - s);
            switch (order) {
                case 0: return s;
                case 1: return u;
                case 2: return u * (1.0 - 2.0 * s);
                case 3: return u * (1.0 - 6.0 * s + 6.0 * s * s);
                default: return u * (1.0 - 2.0 * s) * (1.0 - 12.0 * s + 12.0 * s * s);
            }
        }
        case ActivationKind::tanh: {
            const double t = std::tanh(z);
            const double w = 1.0 - t * t;
            switch (order) {
                case 0: return t;
                case 1: return w;
                case 2: return -2.0 * t * w;
                case 3: return w * (6.0 * t * t - 2.0);
                default: return 8.0 * t * w * (2.0 - 3.0 * t * t);
            }
        }
        case ActivationKind::sin:
            switch (order & 3) {
                case 0: return std::sin(z);
                case 1: return std::cos(z);
                case 2: return -std::sin(z);
                default: return -std::cos(z);
            }
        case ActivationKind::gaussian: {
            const double g = std::exp(-z * z);
            switch (order) {
                case 0: return g;
                case 1: return -2.0 * z * g;
                case 2: return (4.0 * z * z - 2.0) * g;
                case 3: return (12.0 * z - 8.0 * z * z * z) * g;
                default: {
                    const double z2 = z * z;
                    return (16.0 * z2 * z2 - 48.0 * z2 + 12.0) * g;
                }
            }
        }
    }
    throw std::invalid_argument("unknown activation kind");
}

} // namespace xtfc

#endif // XTFC_ACTIVATION_HPP
