#ifndef XTFC_PROBLEMS_HPP
#define XTFC_PROBLEMS_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xtfc/solver.hpp"

namespace xtfc {

enum class GridKind { uniform };

struct ProblemDefaults {
    int neurons = 0;
    std::vector<int> grid;
    ActivationKind activation = ActivationKind::logistic;
    double weight_lo = -1.0;
    double weight_hi = 1.0;
    double tol = 1e-12;
    int max_iter = 30;
    // Feed the network the domain box mapped onto [-1,1]^dim instead of raw
    // coordinates. Used where the raw-coordinate Gauss-Newton iteration is
    // not robust from a zero start (the ODE problems and the two PDEs whose
    // stationary points otherwise depend on the draw).
    bool map_inputs = false;
};

/// One benchmark: box domain, constraints per unknown, the differential
/// operator as a pointwise residual over a fixed derivative stencil, its
/// value-Jacobian, closed-form truth, and the hyperparameters used for the
/// headline runs.
struct ProblemDefinition {
    std::string id;
    std::vector<std::array<double, 2>> domain;
    int output_count = 1;
    bool linear = false;
    std::vector<ConstraintSpec> constraints;
    // Derivative multi-indices whose values feed the residual, per unknown.
    std::vector<std::vector<MultiIndex>> stencil;
    // residual(x, vals, out): vals are stencil values flattened unknown-major.
    std::function<void(std::span<const double>, std::span<const double>, std::span<double>)>
        residual;
    // d residual_e / d vals_s, flattened e * total_slots + s.
    std::function<void(std::span<const double>, std::span<const double>, std::span<double>)>
        residual_jacobian;
    std::vector<AnalyticFn> exact;
    ProblemDefaults defaults;

    int dim() const { return static_cast<int>(domain.size()); }
};

namespace exact_detail {

inline constexpr double pi = std::numbers::pi;

inline void reject(const std::string& id, const MultiIndex& d) {
    std::string msg = "unsupported derivative (";
    for (int k = 0; k < d.dim(); ++k) msg += (k ? "," : "") + std::to_string(d[k]);
    throw std::invalid_argument(msg + ") for exact solution of " + id);
}

// d-th derivative of sin(w u + phase) in u.
inline double sin_deriv(double w, double u, int d, double phase = 0.0) {
    double scale = 1.0;
    for (int r = 0; r < d; ++r) scale *= w;
    return scale * std::sin(w * u + phase + 0.5 * pi * static_cast<double>(d));
}

// d-th derivative of u^p for small integer powers.
inline double mono_deriv(double u, int p, int d) {
    if (d > p) return 0.0;
    double falling = 1.0;
    for (int r = 0; r < d; ++r) falling *= static_cast<double>(p - r);
    double power = 1.0;
    for (int r = 0; r < p - d; ++r) power *= u;
    return falling * power;
}

// y(t) = 2t / (t + 1), any derivative order.
inline double ode1(std::span<const double> x, const MultiIndex& d) {
    const double t = x[0];
    const int a = d.order(0);
    if (a == 0) return 2.0 * t / (t + 1.0);
    const double sign = (a % 2 == 1) ? 1.0 : -1.0;
    double fact = 1.0;
    for (int i = 2; i <= a; ++i) fact *= static_cast<double>(i);
    return 2.0 * sign * fact * std::pow(t + 1.0, -(a + 1));
}

inline double sode2_y1(std::span<const double> x, const MultiIndex& d) {
    return sin_deriv(1.0, x[0], d.order(0));
}

inline double sode2_y2(std::span<const double> x, const MultiIndex& d) {
    return mono_deriv(x[0], 0, d.order(0)) + mono_deriv(x[0], 2, d.order(0));
}

// f(x, y) = e^{-x} (x + y^3).
inline double pde1(std::span<const double> p, const MultiIndex& d) {
    const double x = p[0], y = p[1];
    const int a = d.order(0), b = d.order(1);
    const double sign = (a % 2 == 0) ? 1.0 : -1.0;
    const double ex = std::exp(-x);
    switch (b) {
        case 0: return sign * ex * (x + y * y * y - static_cast<double>(a));
        case 1: return sign * ex * 3.0 * y * y;
        case 2: return sign * ex * 6.0 * y;
        case 3: return sign * ex * 6.0;
        default: return 0.0;
    }
}

// f(x, y) = y^2 sin(pi x), shared by PDE problems 2 and 3.
inline double pde23(std::span<const double> p, const MultiIndex& d) {
    return sin_deriv(pi, p[0], d.order(0)) * mono_deriv(p[1], 2, d.order(1));
}

// f(x, t) = sin(pi x) e^{-pi^2 t}.
inline double pde4(std::span<const double> p, const MultiIndex& d) {
    const int b = d.order(1);
    double scale = 1.0;
    for (int r = 0; r < b; ++r) scale *= -pi * pi;
    return sin_deriv(pi, p[0], d.order(0)) * scale * std::exp(-pi * pi * p[1]);
}

// f(x, y, t) = sin(pi x / L) sin(pi y / H) e^{-lambda t}, L = 2, H = 1.
inline double pde5(std::span<const double> p, const MultiIndex& d) {
    constexpr double length = 2.0, height = 1.0;
    constexpr double lambda = pi * pi / (length * length) + pi * pi / (height * height);
    double scale = 1.0;
    for (int r = 0; r < d.order(2); ++r) scale *= -lambda;
    return sin_deriv(pi / length, p[0], d.order(0)) * sin_deriv(pi / height, p[1], d.order(1)) *
           scale * std::exp(-lambda * p[2]);
}

// z(x, y, t) = sin(2 pi x y) + t^2 y + (t - 1) x y.
inline double pde6(std::span<const double> p, const MultiIndex& d) {
    const double x = p[0], y = p[1], t = p[2];
    const int a = d.order(0), b = d.order(1), c = d.order(2);
    const double s = 2.0 * pi * x * y;
    double wave = 0.0;
    if (c == 0 && a <= 2 && b <= 2) {
        const double k = 2.0 * pi;
        if (a == 0 && b == 0) wave = std::sin(s);
        else if (a == 1 && b == 0) wave = k * y * std::cos(s);
        else if (a == 0 && b == 1) wave = k * x * std::cos(s);
        else if (a == 2 && b == 0) wave = -k * k * y * y * std::sin(s);
        else if (a == 0 && b == 2) wave = -k * k * x * x * std::sin(s);
        else if (a == 1 && b == 1) wave = k * std::cos(s) - k * k * x * y * std::sin(s);
        else if (a == 2 && b == 1)
            wave = -2.0 * k * k * y * std::sin(s) - k * k * k * x * y * y * std::cos(s);
        else if (a == 1 && b == 2)
            wave = -2.0 * k * k * x * std::sin(s) - k * k * k * x * x * y * std::cos(s);
        else  // a == 2 && b == 2
            wave = -2.0 * k * k * std::sin(s) - 4.0 * k * k * k * x * y * std::cos(s) +
                   k * k * k * k * x * x * y * y * std::sin(s);
    } else if (c > 0) {
        wave = 0.0;
    } else {
        reject("pde6", d);
    }
    // polynomial part: t^2 y + (t - 1) x y, factorwise derivatives
    const double poly = mono_deriv(t, 2, c) * mono_deriv(y, 1, b) * mono_deriv(x, 0, a) +
                        (mono_deriv(t, 1, c) - mono_deriv(t, 0, c)) *
                            mono_deriv(x, 1, a) * mono_deriv(y, 1, b);
    return wave + poly;
}

// f(x, y, z, t) = t^2 sin(2 pi z) + sin(x^2 y) + x y^{3/2} z + x y t (z-1)(t-1).
// Only the partials the catalog needs are provided; y^{3/2} keeps the
// second y-derivative singular at y = 0, so it is deliberately absent.
inline double pde7(std::span<const double> p, const MultiIndex& d) {
    const double x = p[0], y = p[1], z = p[2], t = p[3];
    const int a = d.order(0), b = d.order(1), c = d.order(2), e = d.order(3);
    const double r = x * x * y;
    const double sy = std::sqrt(y);
    const double two_pi = 2.0 * pi;
    if (a == 0 && b == 0 && c == 0 && e == 0)
        return t * t * std::sin(two_pi * z) + std::sin(r) + x * y * sy * z +
               x * y * t * (z - 1.0) * (t - 1.0);
    if (a == 1 && b + c + e == 0)
        return 2.0 * x * y * std::cos(r) + y * sy * z + y * t * (z - 1.0) * (t - 1.0);
    if (b == 1 && a + c + e == 0)
        return x * x * std::cos(r) + 1.5 * x * sy * z + x * t * (z - 1.0) * (t - 1.0);
    if (c == 1 && a + b + e == 0)
        return two_pi * t * t * std::cos(two_pi * z) + x * y * sy + x * y * t * (t - 1.0);
    if (e == 1 && a + b + c == 0)
        return 2.0 * t * std::sin(two_pi * z) + x * y * (z - 1.0) * (2.0 * t - 1.0);
    if (e == 2 && a + b + c == 0)
        return 2.0 * std::sin(two_pi * z) + 2.0 * x * y * (z - 1.0);
    if (a == 2 && b + c + e == 0)
        return 2.0 * y * std::cos(r) - 4.0 * x * x * y * y * std::sin(r);
    if (c == 2 && a + b + e == 0) return -two_pi * two_pi * t * t * std::sin(two_pi * z);
    reject("pde7", d);
    return 0.0;
}

} // namespace exact_detail

namespace catalog_detail {

inline AnalyticFn wrap(double (*fn)(std::span<const double>, const MultiIndex&)) {
    return AnalyticFn(fn);
}

inline ProblemDefinition make_ode1() {
    using exact_detail::ode1;
    ProblemDefinition p;
    p.id = "ode1";
    p.domain = {{1.0, 2.0}};
    p.output_count = 1;
    p.linear = false;
    p.constraints = {{{{{1.0, 0}, {2.0, 0}}}, wrap(&ode1)}};
    p.stencil = {{MultiIndex{0}, MultiIndex{2}}};
    p.residual = [](std::span<const double> x, std::span<const double> v,
                    std::span<double> out) {
        const double t = x[0], y = v[0];
        out[0] = v[1] - (y * y * y - 2.0 * y * y) / (2.0 * t * t);
    };
    p.residual_jacobian = [](std::span<const double> x, std::span<const double> v,
                             std::span<double> out) {
        const double t = x[0], y = v[0];
        out[0] = -(3.0 * y * y - 4.0 * y) / (2.0 * t * t);
        out[1] = 1.0;
    };
    p.exact = {wrap(&ode1)};
    p.defaults = {51, {51}, ActivationKind::logistic, -10.0, 10.0, 1e-14, 20, true};
    return p;
}

inline ProblemDefinition make_sode2() {
    ProblemDefinition p;
    p.id = "sode2";
    p.domain = {{0.0, 3.0}};
    p.output_count = 2;
    p.linear = false;
    p.constraints = {{{{{0.0, 0}}}, wrap(&exact_detail::sode2_y1)},
                     {{{{0.0, 0}}}, wrap(&exact_detail::sode2_y2)}};
    p.stencil = {{MultiIndex{0}, MultiIndex{1}}, {MultiIndex{0}, MultiIndex{1}}};
    // vals: [y1, y1', y2, y2']
    p.residual = [](std::span<const double> x, std::span<const double> v,
                    std::span<double> out) {
        const double t = x[0];
        const double s = std::sin(t);
        out[0] = v[1] - std::cos(t) - v[0] * v[0] - v[2] + (1.0 + t * t + s * s);
        out[1] = v[3] - 2.0 * t + (1.0 + t * t) * s - v[0] * v[2];
    };
    p.residual_jacobian = [](std::span<const double>, std::span<const double> v,
                             std::span<double> out) {
        out[0] = -2.0 * v[0];
        out[1] = 1.0;
        out[2] = -1.0;
        out[3] = 0.0;
        out[4] = -v[2];
        out[5] = 0.0;
        out[6] = -v[0];
        out[7] = 1.0;
    };
    p.exact = {wrap(&exact_detail::sode2_y1), wrap(&exact_detail::sode2_y2)};
    p.defaults = {100, {100}, ActivationKind::logistic, -10.0, 10.0, 1e-10, 30, true};
    return p;
}

inline ProblemDefinition make_pde1() {
    ProblemDefinition p;
    p.id = "pde1";
    p.domain = {{0.0, 1.0}, {0.0, 1.0}};
    p.output_count = 1;
    p.linear = true;
    p.constraints = {{{{{0.0, 0}, {1.0, 0}}, {{0.0, 0}, {1.0, 0}}},
                      wrap(&exact_detail::pde1)}};
    p.stencil = {{MultiIndex{2, 0}, MultiIndex{0, 2}}};
    p.residual = [](std::span<const double> x, std::span<const double> v,
                    std::span<double> out) {
        const double u = x[0], y = x[1];
        out[0] = v[0] + v[1] - std::exp(-u) * (u - 2.0 + y * y * y + 6.0 * y);
    };
    p.residual_jacobian = [](std::span<const double>, std::span<const double>,
                             std::span<double> out) {
        out[0] = 1.0;
        out[1] = 1.0;
    };
    p.exact = {wrap(&exact_detail::pde1)};
    p.defaults = {170, {30, 30}, ActivationKind::tanh, -1.0, 1.0, 1e-12, 30};
    return p;
}

inline ProblemDefinition make_pde2() {
    using exact_detail::pi;
    ProblemDefinition p;
    p.id = "pde2";
    p.domain = {{0.0, 1.0}, {0.0, 1.0}};
    p.output_count = 1;
    p.linear = true;
    // value on three sides, normal derivative prescribed on y = 1
    p.constraints = {{{{{0.0, 0}, {1.0, 0}}, {{0.0, 0}, {1.0, 1}}},
                      wrap(&exact_detail::pde23)}};
    p.stencil = {{MultiIndex{2, 0}, MultiIndex{0, 2}}};
    p.residual = [](std::span<const double> x, std::span<const double> v,
                    std::span<double> out) {
        out[0] = v[0] + v[1] - (2.0 - pi * pi * x[1] * x[1]) * std::sin(pi * x[0]);
    };
    p.residual_jacobian = [](std::span<const double>, std::span<const double>,
                             std::span<double> out) {
        out[0] = 1.0;
        out[1] = 1.0;
    };
    p.exact = {wrap(&exact_detail::pde23)};
    p.defaults = {170, {30, 30}, ActivationKind::tanh, -1.0, 1.0, 1e-12, 30};
    return p;
}

inline ProblemDefinition make_pde3() {
    using exact_detail::pi;
    ProblemDefinition p = make_pde2();
    p.id = "pde3";
    p.linear = false;
    p.stencil = {{MultiIndex{0, 0}, MultiIndex{0, 1}, MultiIndex{2, 0}, MultiIndex{0, 2}}};
    p.residual = [](std::span<const double> x, std::span<const double> v,
                    std::span<double> out) {
        const double sx = std::sin(pi * x[0]);
        const double y = x[1];
        out[0] = v[2] + v[3] + v[0] * v[1] -
                 sx * (2.0 - pi * pi * y * y + 2.0 * y * y * y * sx);
    };
    p.residual_jacobian = [](std::span<const double>, std::span<const double> v,
                             std::span<double> out) {
        out[0] = v[1];
        out[1] = v[0];
        out[2] = 1.0;
        out[3] = 1.0;
    };
    p.defaults = {150, {20, 20}, ActivationKind::tanh, -1.0, 1.0, 1e-10, 30, true};
    return p;
}

inline ProblemDefinition make_pde4() {
    ProblemDefinition p;
    p.id = "pde4";
    p.domain = {{0.0, 1.0}, {0.0, 1.0}};  // (x, t)
    p.output_count = 1;
    p.linear = true;
    p.constraints = {{{{{0.0, 0}, {1.0, 0}}, {{0.0, 0}}}, wrap(&exact_detail::pde4)}};
    p.stencil = {{MultiIndex{2, 0}, MultiIndex{0, 1}}};
    p.residual = [](std::span<const double>, std::span<const double> v,
                    std::span<double> out) {
        out[0] = v[0] - v[1];  // kappa = 1
    };
    p.residual_jacobian = [](std::span<const double>, std::span<const double>,
                             std::span<double> out) {
        out[0] = 1.0;
        out[1] = -1.0;
    };
    p.exact = {wrap(&exact_detail::pde4)};
    p.defaults = {196, {30, 30}, ActivationKind::tanh, -1.0, 1.0, 1e-12, 30};
    return p;
}

inline ProblemDefinition make_pde5() {
    ProblemDefinition p;
    p.id = "pde5";
    p.domain = {{0.0, 2.0}, {0.0, 1.0}, {0.0, 1.0}};  // (x, y, t), L = 2, H = 1
    p.output_count = 1;
    p.linear = true;
    p.constraints = {{{{{0.0, 0}, {2.0, 0}}, {{0.0, 0}, {1.0, 0}}, {{0.0, 0}}},
                      wrap(&exact_detail::pde5)}};
    p.stencil = {{MultiIndex{2, 0, 0}, MultiIndex{0, 2, 0}, MultiIndex{0, 0, 1}}};
    p.residual = [](std::span<const double>, std::span<const double> v,
                    std::span<double> out) {
        out[0] = v[0] + v[1] - v[2];  // kappa = 1
    };
    p.residual_jacobian = [](std::span<const double>, std::span<const double>,
                             std::span<double> out) {
        out[0] = 1.0;
        out[1] = 1.0;
        out[2] = -1.0;
    };
    p.exact = {wrap(&exact_detail::pde5)};
    p.defaults = {400, {13, 13, 13}, ActivationKind::tanh, -1.0, 1.0, 1e-12, 30};
    return p;
}

inline ProblemDefinition make_pde6() {
    using exact_detail::pi;
    ProblemDefinition p;
    p.id = "pde6";
    p.domain = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};  // (x, y, t)
    p.output_count = 1;
    p.linear = false;
    p.constraints = {{{{{0.0, 0}}, {{0.0, 0}}, {{1.0, 0}}}, wrap(&exact_detail::pde6)}};
    p.stencil = {{MultiIndex{1, 0, 0}, MultiIndex{0, 1, 0}, MultiIndex{0, 0, 1}}};
    p.residual = [](std::span<const double> q, std::span<const double> v,
                    std::span<double> out) {
        const double x = q[0], y = q[1], t = q[2];
        const double cosxy = std::cos(2.0 * pi * x * y);
        const double rhs = t * t + (t - 1.0) * x + 2.0 * pi * x * cosxy +
                           (2.0 * t * y + x * y) * ((t - 1.0) * y + 2.0 * pi * y * cosxy);
        out[0] = v[2] * v[0] + v[1] - rhs;
    };
    p.residual_jacobian = [](std::span<const double>, std::span<const double> v,
                             std::span<double> out) {
        out[0] = v[2];  // d/d z_x
        out[1] = 1.0;   // d/d z_y
        out[2] = v[0];  // d/d z_t
    };
    p.exact = {wrap(&exact_detail::pde6)};
    p.defaults = {255, {8, 8, 8}, ActivationKind::tanh, -1.0, 1.0, 1e-12, 30, true};
    return p;
}

inline ProblemDefinition make_pde7() {
    using exact_detail::pi;
    ProblemDefinition p;
    p.id = "pde7";
    p.domain = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};  // (x, y, z, t)
    p.output_count = 1;
    p.linear = false;
    p.constraints = {{{{{0.0, 0}}, {{0.0, 0}}, {{1.0, 0}}, {{0.0, 0}, {1.0, 0}}},
                      wrap(&exact_detail::pde7)}};
    p.stencil = {{MultiIndex{1, 0, 0, 0}, MultiIndex{0, 1, 0, 0}, MultiIndex{0, 0, 1, 0},
                  MultiIndex{0, 0, 0, 2}}};
    p.residual = [](std::span<const double> q, std::span<const double> v,
                    std::span<double> out) {
        const double x = q[0], y = q[1], z = q[2], t = q[3];
        const double sy = std::sqrt(y);
        const double cosr = std::cos(x * x * y);
        const double fy = (t - 1.0) * t * x * (z - 1.0) + x * x * cosr + 1.5 * x * sy * z;
        const double fx = (t - 1.0) * t * y * (z - 1.0) + 2.0 * x * y * cosr + y * sy * z;
        const double fz = 2.0 * pi * t * t * std::cos(2.0 * pi * z) + (t - 1.0) * t * x * y +
                          x * y * sy;
        const double rhs = fy * fx * fz + 2.0 * x * y * (z - 1.0) +
                           2.0 * std::sin(2.0 * pi * z);
        out[0] = v[0] * v[1] * v[2] + v[3] - rhs;
    };
    p.residual_jacobian = [](std::span<const double>, std::span<const double> v,
                             std::span<double> out) {
        out[0] = v[1] * v[2];
        out[1] = v[0] * v[2];
        out[2] = v[0] * v[1];
        out[3] = 1.0;
    };
    p.exact = {wrap(&exact_detail::pde7)};
    p.defaults = {340, {5, 5, 5, 5}, ActivationKind::tanh, -1.0, 1.0, 1e-12, 30};
    return p;
}

} // namespace catalog_detail

/// The nine benchmarks in publication order.
inline const std::vector<ProblemDefinition>& catalog() {
    static const std::vector<ProblemDefinition> problems = [] {
        std::vector<ProblemDefinition> v;
        v.push_back(catalog_detail::make_ode1());
        v.push_back(catalog_detail::make_sode2());
        v.push_back(catalog_detail::make_pde1());
        v.push_back(catalog_detail::make_pde2());
        v.push_back(catalog_detail::make_pde3());
        v.push_back(catalog_detail::make_pde4());
        v.push_back(catalog_detail::make_pde5());
        v.push_back(catalog_detail::make_pde6());
        v.push_back(catalog_detail::make_pde7());
        return v;
    }();
    return problems;
}

inline const ProblemDefinition& find_problem(std::string_view id) {
    for (const auto& p : catalog())
        if (p.id == id) return p;
    throw std::invalid_argument("unknown problem id '" + std::string(id) + "'");
}

/// Closed-form truth at a point; rejects out-of-domain queries.
inline std::vector<double> exact_values(const ProblemDefinition& problem,
                                        std::span<const double> x) {
    if (static_cast<int>(x.size()) != problem.dim())
        throw std::invalid_argument("point dimension mismatch");
    for (int k = 0; k < problem.dim(); ++k) {
        const auto& box = problem.domain[static_cast<std::size_t>(k)];
        if (x[k] < box[0] - 1e-12 || x[k] > box[1] + 1e-12)
            throw std::domain_error("point outside the domain of " + problem.id);
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(problem.output_count));
    const MultiIndex value = MultiIndex::zeros(problem.dim());
    for (const auto& fn : problem.exact) out.push_back(fn(x, value));
    return out;
}

inline CollocationGrid make_grid(const ProblemDefinition& problem, std::span<const int> counts,
                                 GridKind kind = GridKind::uniform) {
    if (kind != GridKind::uniform)
        throw std::invalid_argument("only uniform grids are supported");
    return uniform_grid(problem.domain, counts);
}

inline CollocationGrid make_default_grid(const ProblemDefinition& problem) {
    return make_grid(problem, problem.defaults.grid);
}

} // namespace xtfc

#endif // XTFC_PROBLEMS_HPP
