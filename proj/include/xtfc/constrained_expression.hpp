#ifndef XTFC_CONSTRAINED_EXPRESSION_HPP
#define XTFC_CONSTRAINED_EXPRESSION_HPP

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "xtfc/elm.hpp"

namespace xtfc {

/// Analytic scalar field with partial derivatives: f(x, d) returns the
/// d-multi-index partial of f at x. Used for constraint data and for exact
/// solutions of the benchmark catalog.
using AnalyticFn = std::function<double(std::span<const double>, const MultiIndex&)>;

/// Raised when a dimension's constraint set cannot produce a switch vector
/// (e.g. duplicated (location, order) pairs make the monomial system singular).
class ConstraintDegeneracyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Dense univariate polynomial, ascending coefficients. Evaluation takes an
/// optional derivative order; orders beyond the degree give 0.
class Polynomial {
  public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.push_back(0.0);
    }

    static Polynomial constant(double c) { return Polynomial({c}); }

    double operator()(double x, int deriv = 0) const {
        const int n = static_cast<int>(coeffs_.size());
        if (deriv >= n) return 0.0;
        double value = 0.0;
        for (int i = n - 1; i >= deriv; --i) {
            double falling = 1.0;
            for (int r = 0; r < deriv; ++r) falling *= static_cast<double>(i - r);
            value = value * x + falling * coeffs_[static_cast<std::size_t>(i)];
        }
        return value;
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coefficients() const { return coeffs_; }

  private:
    std::vector<double> coeffs_;
};

/// Boundary-condition operator: take the `order`-th partial along `axis`,
/// then restrict to the hyperplane x_axis = location.
struct BoundaryOperator {
    int axis = 0;
    double location = 0.0;
    int order = 0;
};

/// One constraint hyperplane within a single dimension.
struct HyperplaneConstraint {
    double location = 0.0;
    int order = 0;
};

/// Full constraint description for one unknown: per-dimension hyperplane
/// lists plus the boundary data. `data` is any smooth extension of the
/// prescribed constraint values; everything it contributes to the
/// constrained expression passes through at least one hyperplane
/// restriction, so only its values (and requested partials) on the
/// constraint hyperplanes matter. Supplying a single global callable keeps
/// the data consistent at hyperplane intersections by construction.
struct ConstraintSpec {
    std::vector<std::vector<HyperplaneConstraint>> per_dimension;
    AnalyticFn data;

    int dim() const { return static_cast<int>(per_dimension.size()); }

    void validate() const {
        for (int k = 0; k < dim(); ++k) {
            const auto& list = per_dimension[static_cast<std::size_t>(k)];
            for (std::size_t a = 0; a < list.size(); ++a)
                for (std::size_t b = a + 1; b < list.size(); ++b)
                    if (list[a].location == list[b].location && list[a].order == list[b].order)
                        throw ConstraintDegeneracyError(
                            "duplicate constraint (location, order) pair in dimension " +
                            std::to_string(k));
        }
    }
};

/// Per-dimension switch vector: components[0] is the constant 1, and
/// components[1 + i] is the polynomial paired with the dimension's i-th
/// constraint. Kronecker property: applying the j-th boundary operator to
/// components[1 + i] yields delta_ij.
struct SwitchVector {
    std::vector<Polynomial> components;

    int constraint_count() const { return static_cast<int>(components.size()) - 1; }
};

/// Builds the switch vector for one dimension by solving the monomial
/// collocation system (monomials h_i(x) = x^{i-1}; coefficients from the
/// inverse of the boundary-operator matrix).
inline SwitchVector build_switch_vector(const std::vector<HyperplaneConstraint>& constraints,
                                        int axis = 0) {
    const int n = static_cast<int>(constraints.size());
    SwitchVector v;
    v.components.push_back(Polynomial::constant(1.0));
    if (n == 0) return v;

    Eigen::MatrixXd system(n, n);
    for (int r = 0; r < n; ++r) {
        const auto& bc = constraints[static_cast<std::size_t>(r)];
        for (int i = 0; i < n; ++i) {
            // i-th monomial x^i differentiated bc.order times at bc.location.
            if (bc.order > i) {
                system(r, i) = 0.0;
            } else {
                double falling = 1.0;
                for (int rep = 0; rep < bc.order; ++rep) falling *= static_cast<double>(i - rep);
                double power = 1.0;
                for (int rep = 0; rep < i - bc.order; ++rep) power *= bc.location;
                system(r, i) = falling * power;
            }
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible())
        throw ConstraintDegeneracyError(
            "switch-vector system is singular for dimension " + std::to_string(axis) +
            "; the constraint set is degenerate on the monomial basis");
    const Eigen::MatrixXd alpha = lu.solve(Eigen::MatrixXd::Identity(n, n));
    for (int j = 0; j < n; ++j) {
        std::vector<double> coeffs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) coeffs[static_cast<std::size_t>(i)] = alpha(i, j);
        v.components.emplace_back(std::move(coeffs));
    }
    return v;
}

/// One entry of the boundary-condition tensor: a signed composition of
/// boundary operators (one per non-unit index). The all-unit entry has
/// sign 0 and applies no operators.
struct MTensorEntry {
    std::vector<int> index;           // 0-based; 0 is the "unit" slot per dimension
    double sign = 0.0;                // 0, +1 or -1
    std::vector<BoundaryOperator> ops;
};

/// The (n+1)-order tensor from the multivariate constrained-expression
/// recipe, stored entry-by-entry in row-major order (last dimension
/// fastest). Entries are target-independent: apply() binds them to a
/// concrete function.
struct MTensor {
    std::vector<int> extents;          // per dimension: constraint count + 1
    std::vector<MTensorEntry> entries;

    const MTensorEntry& at(std::span<const int> index) const {
        std::size_t flat = 0;
        for (std::size_t k = 0; k < extents.size(); ++k) {
            const int i = index[k];
            if (i < 0 || i >= extents[k]) throw std::out_of_range("M tensor index out of range");
            flat = flat * static_cast<std::size_t>(extents[k]) + static_cast<std::size_t>(i);
        }
        return entries[flat];
    }

    /// Entry applied to a target function at x: restrict the target's
    /// coordinates on each operator's axis and differentiate accordingly.
    static double apply(const MTensorEntry& entry, const AnalyticFn& target,
                        std::span<const double> x) {
        if (entry.sign == 0.0) return 0.0;
        std::vector<double> y(x.begin(), x.end());
        MultiIndex d = MultiIndex::zeros(static_cast<int>(x.size()));
        for (const auto& op : entry.ops) {
            y[static_cast<std::size_t>(op.axis)] = op.location;
            d[op.axis] += op.order;
        }
        return entry.sign * target(y, d);
    }
};

/// Builds the full boundary-condition tensor for a constraint set: the
/// all-unit entry is 0, first-order sub-tensors hold the per-dimension
/// constraints, and a general entry composes one boundary operator per
/// non-unit index with sign (-1)^(m+1), m = number of non-unit indices.
inline MTensor build_m_tensor(const ConstraintSpec& spec) {
    spec.validate();
    MTensor tensor;
    const int dim = spec.dim();
    tensor.extents.resize(static_cast<std::size_t>(dim));
    std::size_t count = 1;
    for (int k = 0; k < dim; ++k) {
        tensor.extents[static_cast<std::size_t>(k)] =
            static_cast<int>(spec.per_dimension[static_cast<std::size_t>(k)].size()) + 1;
        count *= static_cast<std::size_t>(tensor.extents[static_cast<std::size_t>(k)]);
    }
    tensor.entries.reserve(count);
    std::vector<int> index(static_cast<std::size_t>(dim), 0);
    for (std::size_t flat = 0; flat < count; ++flat) {
        MTensorEntry entry;
        entry.index = index;
        int m = 0;
        for (int k = 0; k < dim; ++k) {
            const int i = index[static_cast<std::size_t>(k)];
            if (i == 0) continue;
            ++m;
            const auto& bc = spec.per_dimension[static_cast<std::size_t>(k)]
                                               [static_cast<std::size_t>(i - 1)];
            entry.ops.push_back({k, bc.location, bc.order});
        }
        entry.sign = (m == 0) ? 0.0 : ((m % 2 == 1) ? 1.0 : -1.0);
        tensor.entries.push_back(std::move(entry));
        for (int k = dim - 1; k >= 0; --k) {
            if (++index[static_cast<std::size_t>(k)] < tensor.extents[static_cast<std::size_t>(k)])
                break;
            index[static_cast<std::size_t>(k)] = 0;
        }
    }
    return tensor;
}

/// TFC constrained expression with an ELM free function:
///
///   f_CE(x) = M(c) . v-products + g(x) - M(g) . v-products
///
/// kept as a finite term list. Each term multiplies a product of
/// switch-vector polynomials (in the coordinates whose target slot is
/// restricted) by the target -- either the constraint data c or the free
/// function g -- evaluated with those coordinates pinned to constraint
/// locations and the boundary-operator derivative orders applied. Since a
/// term's polynomial factors and its target depend on disjoint coordinates,
/// every partial derivative of f_CE distributes exactly over the factors:
/// no numeric differentiation is involved, and the result stays affine in
/// the output weights beta.
class ConstrainedExpression {
  public:
    struct Term {
        bool on_free_function = false;  // target: true -> g, false -> c
        double coeff = 1.0;             // tensor sign, negated for projected g
        std::vector<int> fixed_axes;
        std::vector<double> fixed_locations;
        MultiIndex inner;               // boundary-operator orders (full dim)
        std::vector<Polynomial> weights;  // switch polynomials, one per fixed axis
    };

    ConstrainedExpression(ConstraintSpec spec, ElmBasis basis)
        : spec_(std::move(spec)), basis_(std::move(basis)) {
        if (spec_.dim() != basis_.dim())
            throw std::invalid_argument("constraint spec and basis dimension differ");
        spec_.validate();
        switch_vectors_.reserve(static_cast<std::size_t>(spec_.dim()));
        for (int k = 0; k < spec_.dim(); ++k)
            switch_vectors_.push_back(
                build_switch_vector(spec_.per_dimension[static_cast<std::size_t>(k)], k));
        build_terms();
    }

    int dim() const { return spec_.dim(); }
    const ElmBasis& basis() const { return basis_; }
    const ConstraintSpec& spec() const { return spec_; }
    const std::vector<SwitchVector>& switch_vectors() const { return switch_vectors_; }
    const std::vector<Term>& terms() const { return terms_; }

    /// Affine view of the requested derivative: value = offset + row . beta.
    std::pair<double, Eigen::RowVectorXd> affine_row(std::span<const double> x,
                                                     const MultiIndex& d = {}) const {
        check_args(x, d);
        double offset = 0.0;
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(basis_.neurons());
        std::vector<double> y(static_cast<std::size_t>(dim()));
        for (const Term& term : terms_) {
            const double w = term_weight(term, x, d);
            if (w == 0.0) continue;
            MultiIndex target_d = target_index(term, d);
            project_point(term, x, y);
            if (term.on_free_function)
                row.noalias() += (term.coeff * w) * basis_.basis_row(y, target_d);
            else
                offset += term.coeff * w * spec_.data(y, target_d);
        }
        return {offset, std::move(row)};
    }

    /// Exact derivative of f_CE at x for the given output weights.
    double eval(const Eigen::VectorXd& beta, std::span<const double> x,
                const MultiIndex& d = {}) const {
        auto [offset, row] = affine_row(x, d);
        if (beta.size() != row.size())
            throw std::invalid_argument("output weight vector length mismatch");
        return offset + row.dot(beta);
    }

    // -- term geometry helpers shared with the batched assembler --

    /// Product of the term's switch polynomials, differentiated per d.
    double term_weight(const Term& term, std::span<const double> x, const MultiIndex& d) const {
        double w = 1.0;
        for (std::size_t i = 0; i < term.fixed_axes.size(); ++i) {
            const int axis = term.fixed_axes[i];
            w *= term.weights[i](x[static_cast<std::size_t>(axis)], d.order(axis));
        }
        return w;
    }

    /// Derivative multi-index passed to the term's target: the boundary
    /// operators' orders plus the free-coordinate part of d.
    MultiIndex target_index(const Term& term, const MultiIndex& d) const {
        MultiIndex target_d = term.inner;
        if (!d.empty()) {
            std::size_t fixed_pos = 0;
            for (int k = 0; k < dim(); ++k) {
                const bool fixed = fixed_pos < term.fixed_axes.size() &&
                                   term.fixed_axes[fixed_pos] == k;
                if (fixed)
                    ++fixed_pos;
                else
                    target_d[k] += d[k];
            }
        }
        return target_d;
    }

    /// Target evaluation point: x with the term's axes pinned.
    void project_point(const Term& term, std::span<const double> x,
                       std::vector<double>& y) const {
        y.assign(x.begin(), x.end());
        for (std::size_t i = 0; i < term.fixed_axes.size(); ++i)
            y[static_cast<std::size_t>(term.fixed_axes[i])] = term.fixed_locations[i];
    }

  private:
    void check_args(std::span<const double> x, const MultiIndex& d) const {
        if (static_cast<int>(x.size()) != dim())
            throw std::invalid_argument("evaluation point dimension mismatch");
        if (!d.empty() && d.dim() != dim())
            throw std::invalid_argument("derivative multi-index dimension mismatch");
    }

    void build_terms() {
        const MTensor tensor = build_m_tensor(spec_);
        for (const MTensorEntry& entry : tensor.entries) {
            if (entry.sign == 0.0) continue;
            Term base;
            base.inner = MultiIndex::zeros(dim());
            for (const auto& op : entry.ops) {
                base.fixed_axes.push_back(op.axis);
                base.fixed_locations.push_back(op.location);
                base.inner[op.axis] += op.order;
                const int component = entry.index[static_cast<std::size_t>(op.axis)];
                base.weights.push_back(
                    switch_vectors_[static_cast<std::size_t>(op.axis)]
                        .components[static_cast<std::size_t>(component)]);
            }
            Term on_c = base;
            on_c.on_free_function = false;
            on_c.coeff = entry.sign;
            terms_.push_back(std::move(on_c));
            Term on_g = std::move(base);
            on_g.on_free_function = true;
            on_g.coeff = -entry.sign;
            terms_.push_back(std::move(on_g));
        }
        // Identity contribution of the free function.
        Term identity;
        identity.on_free_function = true;
        identity.coeff = 1.0;
        identity.inner = MultiIndex::zeros(dim());
        terms_.push_back(std::move(identity));
    }

    ConstraintSpec spec_;
    ElmBasis basis_;
    std::vector<SwitchVector> switch_vectors_;
    std::vector<Term> terms_;
};

inline ConstrainedExpression build_ce(const ConstraintSpec& spec, const ElmBasis& basis) {
    return ConstrainedExpression(spec, basis);
}

} // namespace xtfc

#endif // XTFC_CONSTRAINED_EXPRESSION_HPP
