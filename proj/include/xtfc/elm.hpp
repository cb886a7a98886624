#ifndef XTFC_ELM_HPP
#define XTFC_ELM_HPP

#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "xtfc/activation.hpp"

namespace xtfc {

/// Partial-derivative multi-index: one non-negative order per input
/// dimension. An empty index means "value" (all orders zero) for any
/// dimension count. Total order is capped at 4 by the evaluation routines.
class MultiIndex {
  public:
    MultiIndex() = default;

    explicit MultiIndex(std::vector<int> orders) : orders_(std::move(orders)) {
        for (int o : orders_)
            if (o < 0) throw std::invalid_argument("derivative orders must be non-negative");
    }

    MultiIndex(std::initializer_list<int> orders) : MultiIndex(std::vector<int>(orders)) {}

    static MultiIndex zeros(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }

    static MultiIndex unit(int dim, int axis, int order = 1) {
        std::vector<int> o(dim, 0);
        o.at(axis) = order;
        return MultiIndex(std::move(o));
    }

    bool empty() const { return orders_.empty(); }
    int dim() const { return static_cast<int>(orders_.size()); }
    int total() const { return std::accumulate(orders_.begin(), orders_.end(), 0); }

    // Order along `axis`; an empty index reads as zero everywhere.
    int order(int axis) const {
        return orders_.empty() ? 0 : orders_.at(axis);
    }

    int& operator[](int axis) { return orders_.at(axis); }
    int operator[](int axis) const { return orders_.at(axis); }

    bool operator==(const MultiIndex& other) const { return orders_ == other.orders_; }

    const std::vector<int>& orders() const { return orders_; }

  private:
    std::vector<int> orders_;
};

/// Random-feature hidden layer: L neurons with frozen input weights W and
/// biases b, drawn once from unif(lo, hi) and never tuned. A basis row at a
/// point x is the vector sigma(w_j^T tau(x) + b_j), j = 1..L, where tau is
/// an optional per-dimension affine map (identity unless a domain box is
/// supplied, in which case the box maps onto [-1,1]^dim -- the usual
/// collocation normalization, and the regime the weight intervals are
/// calibrated for). Derivative rows carry the exact chain-rule products.
class ElmBasis {
  public:
    /// Seeded construction. Draws are consumed in a fixed order (all W
    /// entries row by row, then all biases) and mapped from raw
    /// std::mt19937_64 output to [lo,hi) directly, so the same arguments
    /// give bit-identical weights on every platform.
    ElmBasis(int neurons, int dim, std::pair<double, double> bounds, std::uint64_t seed,
             ActivationKind kind, std::vector<std::array<double, 2>> domain = {})
        : kind_(kind), seed_(seed), bounds_(bounds) {
        if (neurons < 1) throw std::invalid_argument("neuron count must be >= 1");
        if (dim < 1) throw std::invalid_argument("input dimension must be >= 1");
        if (!(bounds.first < bounds.second))
            throw std::invalid_argument("weight bounds must satisfy lo < hi");
        std::mt19937_64 rng(seed);
        const double lo = bounds.first, span = bounds.second - bounds.first;
        auto draw = [&rng, lo, span]() {
            // 53 uniform mantissa bits in [0,1); avoids the unportable
            // std::uniform_real_distribution.
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            return lo + span * u;
        };
        weights_.resize(neurons, dim);
        biases_.resize(neurons);
        for (int j = 0; j < neurons; ++j)
            for (int k = 0; k < dim; ++k) weights_(j, k) = draw();
        for (int j = 0; j < neurons; ++j) biases_(j) = draw();
        set_input_map(std::move(domain));
    }

    /// Explicit weights, mostly for tests and single-neuron closed forms.
    ElmBasis(Eigen::MatrixXd weights, Eigen::VectorXd biases, ActivationKind kind,
             std::vector<std::array<double, 2>> domain = {})
        : weights_(std::move(weights)), biases_(std::move(biases)), kind_(kind), seed_(0),
          bounds_{0.0, 0.0} {
        if (weights_.rows() != biases_.size())
            throw std::invalid_argument("weights/biases neuron counts differ");
        set_input_map(std::move(domain));
    }

    int neurons() const { return static_cast<int>(weights_.rows()); }
    int dim() const { return static_cast<int>(weights_.cols()); }
    ActivationKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    std::pair<double, double> bounds() const { return bounds_; }
    const Eigen::MatrixXd& weights() const { return weights_; }
    const Eigen::VectorXd& biases() const { return biases_; }

    /// Row of basis derivatives at x: element j is
    ///   (prod_k (w_{j,k} m_k)^{d_k}) * sigma^(|d|)(w_j^T tau(x) + b_j)
    /// with tau_k(x) = m_k x_k + c_k the input map (identity by default).
    Eigen::RowVectorXd basis_row(std::span<const double> x, const MultiIndex& d = {}) const {
        check_point(x);
        check_index(d);
        const int total = d.empty() ? 0 : d.total();
        Eigen::RowVectorXd row(neurons());
        for (int j = 0; j < neurons(); ++j) {
            double z = biases_(j);
            for (int k = 0; k < dim(); ++k)
                z += weights_(j, k) * (map_scale_[static_cast<std::size_t>(k)] * x[k] +
                                       map_shift_[static_cast<std::size_t>(k)]);
            double scale = 1.0;
            if (!d.empty())
                for (int k = 0; k < dim(); ++k)
                    for (int rep = 0; rep < d[k]; ++rep)
                        scale *= weights_(j, k) * map_scale_[static_cast<std::size_t>(k)];
            row(j) = scale * activate(kind_, z, total);
        }
        return row;
    }

    /// Free-function derivative g^(d)(x) = basis_row(x, d) . beta.
    double eval(const Eigen::VectorXd& beta, std::span<const double> x,
                const MultiIndex& d = {}) const {
        if (beta.size() != neurons())
            throw std::invalid_argument("output weight vector has length " +
                                        std::to_string(beta.size()) + ", expected " +
                                        std::to_string(neurons()));
        return basis_row(x, d).dot(beta);
    }

  private:
    void set_input_map(std::vector<std::array<double, 2>> domain) {
        map_scale_.assign(static_cast<std::size_t>(dim()), 1.0);
        map_shift_.assign(static_cast<std::size_t>(dim()), 0.0);
        if (domain.empty()) return;
        if (static_cast<int>(domain.size()) != dim())
            throw std::invalid_argument("input-map box dimension mismatch");
        for (int k = 0; k < dim(); ++k) {
            const double lo = domain[static_cast<std::size_t>(k)][0];
            const double hi = domain[static_cast<std::size_t>(k)][1];
            if (!(lo < hi)) throw std::invalid_argument("input-map box must satisfy lo < hi");
            map_scale_[static_cast<std::size_t>(k)] = 2.0 / (hi - lo);
            map_shift_[static_cast<std::size_t>(k)] = -(hi + lo) / (hi - lo);
        }
    }

    void check_point(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim())
            throw std::invalid_argument("point has " + std::to_string(x.size()) +
                                        " components, basis expects " + std::to_string(dim()));
    }
    void check_index(const MultiIndex& d) const {
        if (d.empty()) return;
        if (d.dim() != dim())
            throw std::invalid_argument("derivative multi-index dimension mismatch");
        if (d.total() > 4)
            throw std::invalid_argument("total derivative order exceeds 4");
    }

    Eigen::MatrixXd weights_;  // L x dim
    Eigen::VectorXd biases_;   // L
    ActivationKind kind_;
    std::uint64_t seed_;
    std::pair<double, double> bounds_;
    std::vector<double> map_scale_;
    std::vector<double> map_shift_;
};

} // namespace xtfc

#endif // XTFC_ELM_HPP
