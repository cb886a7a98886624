#ifndef XTFC_SOLVER_HPP
#define XTFC_SOLVER_HPP

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xtfc/constrained_expression.hpp"

namespace xtfc {

/// Tensor-product collocation grid over a box; points are enumerated in
/// row-major order with the last dimension fastest.
struct CollocationGrid {
    std::vector<std::vector<double>> axes;

    int dim() const { return static_cast<int>(axes.size()); }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.size();
        return n;
    }

    void decode(std::size_t p, std::span<int> index) const {
        for (int k = dim() - 1; k >= 0; --k) {
            const std::size_t count = axes[static_cast<std::size_t>(k)].size();
            index[static_cast<std::size_t>(k)] = static_cast<int>(p % count);
            p /= count;
        }
    }

    void point(std::span<const int> index, std::span<double> x) const {
        for (int k = 0; k < dim(); ++k)
            x[static_cast<std::size_t>(k)] =
                axes[static_cast<std::size_t>(k)][static_cast<std::size_t>(index[k])];
    }

    std::vector<double> point_at(std::size_t p) const {
        std::vector<int> index(static_cast<std::size_t>(dim()));
        std::vector<double> x(static_cast<std::size_t>(dim()));
        decode(p, index);
        point(index, x);
        return x;
    }
};

/// Uniform grid including both box endpoints in every dimension.
inline CollocationGrid uniform_grid(std::span<const std::array<double, 2>> box,
                                    std::span<const int> counts) {
    if (box.size() != counts.size())
        throw std::invalid_argument("grid counts do not match box dimension");
    CollocationGrid grid;
    grid.axes.resize(box.size());
    for (std::size_t k = 0; k < box.size(); ++k) {
        const int n = counts[k];
        if (n < 1) throw std::invalid_argument("grid counts must be positive");
        auto& axis = grid.axes[k];
        axis.resize(static_cast<std::size_t>(n));
        if (n == 1) {
            axis[0] = box[k][0];
        } else {
            const double lo = box[k][0], hi = box[k][1];
            for (int i = 0; i < n; ++i)
                axis[static_cast<std::size_t>(i)] =
                    lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        }
    }
    return grid;
}

struct SolveConfig {
    double rcond = -1.0;   // < 0: machine epsilon * max(N, L)
    double tol = 1e-12;    // Gauss-Newton stop: max-norm of the residual change
    int max_iter = 30;
};

struct SolveOutcome {
    Eigen::VectorXd beta;                 // stacked output weights
    std::vector<Eigen::VectorXd> betas;   // per unknown (filled by solve())
    int iterations = 0;
    bool converged = false;
    double train_residual_max = 0.0;
    double solve_seconds = 0.0;
    std::vector<double> residual_history; // max-abs residual after each pass
    std::string diagnostics;
};

inline double effective_rcond(double rcond, Eigen::Index rows, Eigen::Index cols) {
    if (rcond >= 0.0) return rcond;
    return std::numeric_limits<double>::epsilon() *
           static_cast<double>(std::max(rows, cols));
}

/// Minimum-norm least-squares solution via SVD; singular values below
/// rcond * sigma_max are truncated. rcond < 0 selects eps * max(N, L).
inline Eigen::VectorXd lstsq_svd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                 double rcond = -1.0) {
    if (A.rows() != b.size())
        throw std::invalid_argument("lstsq dimensions differ: A has " +
                                    std::to_string(A.rows()) + " rows, b has " +
                                    std::to_string(b.size()));
    if (!A.allFinite() || !b.allFinite())
        throw std::runtime_error("lstsq input contains non-finite entries");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(effective_rcond(rcond, A.rows(), A.cols()));
    return svd.solve(b);
}

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Gauss-Newton iterative least squares: beta <- beta + lstsq(J, -r).
///
/// The convergence metric is the max-norm of the residual change across the
/// last applied step. The step that lands below `tol` only confirms
/// stationarity, so it is not counted: a purely linear residual reports
/// exactly one iteration. Three consecutive metric increases are treated as
/// divergence and reported in the outcome instead of thrown.
inline SolveOutcome gauss_newton(const ResidualFn& residual, const JacobianFn& jacobian,
                                 Eigen::VectorXd beta0, const SolveConfig& cfg = {}) {
    if (cfg.tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    SolveOutcome out;
    const auto start = std::chrono::steady_clock::now();
    Eigen::VectorXd beta = std::move(beta0);
    Eigen::VectorXd r = residual(beta);
    out.residual_history.push_back(r.size() ? r.cwiseAbs().maxCoeff() : 0.0);
    double previous_metric = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        const Eigen::MatrixXd J = jacobian(beta);
        const Eigen::VectorXd step = lstsq_svd(J, -r, cfg.rcond);
        beta += step;
        Eigen::VectorXd r_next = residual(beta);
        const double metric = (r_next - r).cwiseAbs().maxCoeff();
        r = std::move(r_next);
        out.residual_history.push_back(r.size() ? r.cwiseAbs().maxCoeff() : 0.0);
        if (metric < cfg.tol) {
            out.converged = true;
            out.iterations = k - 1;
            break;
        }
        out.iterations = k;
        if (metric > previous_metric) {
            if (++growth_streak >= 3) {
                out.diagnostics = "divergence: residual change grew for 3 consecutive "
                                  "iterations (last metric " + std::to_string(metric) + ")";
                break;
            }
        } else {
            growth_streak = 0;
        }
        previous_metric = metric;
    }
    if (!out.converged && out.diagnostics.empty())
        out.diagnostics = "iteration cap reached before the residual change dropped below "
                          "tolerance";
    out.beta = std::move(beta);
    out.train_residual_max = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    out.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

/// Affine map of one constrained-expression derivative over a whole grid:
/// values = offset + rows * beta. Assembly walks the term list once; target
/// evaluations are cached per distinct projection (a term pins a subset of
/// coordinates, so each free-coordinate combination is shared by a full
/// slab of grid points).
struct AffineSystem {
    Eigen::VectorXd offset;
    Eigen::MatrixXd rows;
};

inline AffineSystem assemble_affine(const ConstrainedExpression& ce, const CollocationGrid& grid,
                                    const MultiIndex& d = {}) {
    const int dim = ce.dim();
    if (grid.dim() != dim) throw std::invalid_argument("grid dimension mismatch");
    const std::size_t n_points = grid.size();
    const int neurons = ce.basis().neurons();

    AffineSystem system;
    system.offset = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_points));
    system.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_points), neurons);

    // Per-point axis indices, decoded once.
    std::vector<int> indices(n_points * static_cast<std::size_t>(dim));
    for (std::size_t p = 0; p < n_points; ++p)
        grid.decode(p, std::span<int>(indices.data() + p * static_cast<std::size_t>(dim),
                                      static_cast<std::size_t>(dim)));

    std::vector<double> x(static_cast<std::size_t>(dim));
    std::vector<double> y(static_cast<std::size_t>(dim));
    for (const auto& term : ce.terms()) {
        const MultiIndex target_d = ce.target_index(term, d);
        if (target_d.total() > 4)
            throw std::invalid_argument("requested derivative exceeds supported order 4");

        // Strides over the term's free axes; fixed axes contribute nothing
        // to the projected point.
        std::vector<std::size_t> free_stride(static_cast<std::size_t>(dim), 0);
        std::size_t cache_size = 1;
        for (int k = dim - 1; k >= 0; --k) {
            bool fixed = false;
            for (int axis : term.fixed_axes)
                if (axis == k) { fixed = true; break; }
            if (!fixed) {
                free_stride[static_cast<std::size_t>(k)] = cache_size;
                cache_size *= grid.axes[static_cast<std::size_t>(k)].size();
            }
        }

        Eigen::MatrixXd row_cache;
        Eigen::VectorXd val_cache;
        std::vector<char> cached(cache_size, 0);
        if (term.on_free_function)
            row_cache.resize(static_cast<Eigen::Index>(cache_size), neurons);
        else
            val_cache.resize(static_cast<Eigen::Index>(cache_size));

        for (std::size_t p = 0; p < n_points; ++p) {
            const int* idx = indices.data() + p * static_cast<std::size_t>(dim);
            grid.point(std::span<const int>(idx, static_cast<std::size_t>(dim)), x);
            const double w = ce.term_weight(term, x, d);
            if (w == 0.0) continue;
            std::size_t key = 0;
            for (int k = 0; k < dim; ++k)
                key += free_stride[static_cast<std::size_t>(k)] *
                       static_cast<std::size_t>(idx[k]);
            if (!cached[key]) {
                ce.project_point(term, x, y);
                if (term.on_free_function)
                    row_cache.row(static_cast<Eigen::Index>(key)) = ce.basis().basis_row(y, target_d);
                else
                    val_cache(static_cast<Eigen::Index>(key)) = ce.spec().data(y, target_d);
                cached[key] = 1;
            }
            if (term.on_free_function)
                system.rows.row(static_cast<Eigen::Index>(p)) +=
                    (term.coeff * w) * row_cache.row(static_cast<Eigen::Index>(key));
            else
                system.offset(static_cast<Eigen::Index>(p)) +=
                    term.coeff * w * val_cache(static_cast<Eigen::Index>(key));
        }
    }
    return system;
}

struct LinearSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
};

namespace detail {

/// Collocated residual system shared by the linear and Gauss-Newton paths.
/// One affine map per (unknown, stencil entry) is assembled up front; every
/// residual or Jacobian evaluation afterwards is dense linear algebra plus
/// the problem's pointwise residual operator.
template <class Problem>
class CollocationSystem {
  public:
    CollocationSystem(const Problem& problem, const std::vector<ConstrainedExpression>& ces,
                      const CollocationGrid& grid)
        : problem_(problem), grid_(grid), outputs_(problem.output_count),
          n_points_(grid.size()) {
        col_offset_.assign(static_cast<std::size_t>(outputs_) + 1, 0);
        slot_offset_.assign(static_cast<std::size_t>(outputs_) + 1, 0);
        for (int o = 0; o < outputs_; ++o) {
            col_offset_[static_cast<std::size_t>(o) + 1] =
                col_offset_[static_cast<std::size_t>(o)] +
                ces[static_cast<std::size_t>(o)].basis().neurons();
            slot_offset_[static_cast<std::size_t>(o) + 1] =
                slot_offset_[static_cast<std::size_t>(o)] +
                static_cast<int>(problem.stencil[static_cast<std::size_t>(o)].size());
        }
        systems_.resize(static_cast<std::size_t>(total_slots()));
        for (int o = 0; o < outputs_; ++o) {
            const auto& stencil = problem.stencil[static_cast<std::size_t>(o)];
            for (std::size_t s = 0; s < stencil.size(); ++s)
                systems_[static_cast<std::size_t>(slot_offset_[static_cast<std::size_t>(o)]) + s] =
                    assemble_affine(ces[static_cast<std::size_t>(o)], grid, stencil[s]);
        }
        points_.resize(n_points_ * static_cast<std::size_t>(grid.dim()));
        for (std::size_t p = 0; p < n_points_; ++p) {
            const auto x = grid.point_at(p);
            std::copy(x.begin(), x.end(),
                      points_.begin() + static_cast<std::ptrdiff_t>(p * x.size()));
        }
    }

    int total_slots() const { return slot_offset_.back(); }
    int total_cols() const { return col_offset_.back(); }
    Eigen::Index total_rows() const {
        return static_cast<Eigen::Index>(n_points_) * outputs_;
    }
    int column_offset(int output) const { return col_offset_[static_cast<std::size_t>(output)]; }
    int columns_of(int output) const {
        return col_offset_[static_cast<std::size_t>(output) + 1] -
               col_offset_[static_cast<std::size_t>(output)];
    }

    std::span<const double> point(std::size_t p) const {
        const auto d = static_cast<std::size_t>(grid_.dim());
        return {points_.data() + p * d, d};
    }

    /// Value of every stencil slot at every point for the given weights.
    std::vector<Eigen::VectorXd> slot_values(const Eigen::VectorXd& beta) const {
        std::vector<Eigen::VectorXd> vals(systems_.size());
        for (int o = 0; o < outputs_; ++o) {
            const auto seg = beta.segment(col_offset_[static_cast<std::size_t>(o)],
                                          columns_of(o));
            for (int s = slot_offset_[static_cast<std::size_t>(o)];
                 s < slot_offset_[static_cast<std::size_t>(o) + 1]; ++s) {
                const auto& sys = systems_[static_cast<std::size_t>(s)];
                vals[static_cast<std::size_t>(s)] = sys.offset + sys.rows * seg;
            }
        }
        return vals;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& beta) const {
        const auto vals = slot_values(beta);
        Eigen::VectorXd r(total_rows());
        std::vector<double> local(static_cast<std::size_t>(total_slots()));
        std::vector<double> out(static_cast<std::size_t>(outputs_));
        for (std::size_t p = 0; p < n_points_; ++p) {
            for (int s = 0; s < total_slots(); ++s)
                local[static_cast<std::size_t>(s)] =
                    vals[static_cast<std::size_t>(s)](static_cast<Eigen::Index>(p));
            problem_.residual(point(p), local, out);
            for (int e = 0; e < outputs_; ++e)
                r(static_cast<Eigen::Index>(p) * outputs_ + e) = out[static_cast<std::size_t>(e)];
        }
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& beta) const {
        const auto vals = slot_values(beta);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(total_rows(), total_cols());
        std::vector<double> local(static_cast<std::size_t>(total_slots()));
        std::vector<double> coeffs(static_cast<std::size_t>(outputs_ * total_slots()));
        for (std::size_t p = 0; p < n_points_; ++p) {
            for (int s = 0; s < total_slots(); ++s)
                local[static_cast<std::size_t>(s)] =
                    vals[static_cast<std::size_t>(s)](static_cast<Eigen::Index>(p));
            problem_.residual_jacobian(point(p), local, coeffs);
            for (int e = 0; e < outputs_; ++e) {
                const Eigen::Index row = static_cast<Eigen::Index>(p) * outputs_ + e;
                for (int o = 0; o < outputs_; ++o) {
                    for (int s = slot_offset_[static_cast<std::size_t>(o)];
                         s < slot_offset_[static_cast<std::size_t>(o) + 1]; ++s) {
                        const double c =
                            coeffs[static_cast<std::size_t>(e * total_slots() + s)];
                        if (c == 0.0) continue;
                        J.row(row).segment(col_offset_[static_cast<std::size_t>(o)],
                                           columns_of(o)) +=
                            c * systems_[static_cast<std::size_t>(s)].rows.row(
                                    static_cast<Eigen::Index>(p));
                    }
                }
            }
        }
        return J;
    }

    /// For linear problems the Jacobian is constant and the residual is
    /// affine, so the collocation system is matrix * beta - rhs.
    LinearSystem linear_system() const {
        LinearSystem ls;
        ls.matrix = jacobian(Eigen::VectorXd::Zero(total_cols()));
        ls.rhs = -residual(Eigen::VectorXd::Zero(total_cols()));
        return ls;
    }

  private:
    const Problem& problem_;
    const CollocationGrid& grid_;
    int outputs_;
    std::size_t n_points_;
    std::vector<int> col_offset_;
    std::vector<int> slot_offset_;
    std::vector<AffineSystem> systems_;
    std::vector<double> points_;
};

template <class Problem>
inline void check_grid_in_domain(const Problem& problem, const CollocationGrid& grid) {
    if (grid.dim() != static_cast<int>(problem.domain.size()))
        throw std::invalid_argument("grid dimension does not match problem domain");
    for (int k = 0; k < grid.dim(); ++k)
        for (double v : grid.axes[static_cast<std::size_t>(k)]) {
            const auto& box = problem.domain[static_cast<std::size_t>(k)];
            if (v < box[0] - 1e-12 || v > box[1] + 1e-12)
                throw std::invalid_argument("grid point outside the problem domain");
        }
}

} // namespace detail

/// Row p of the returned matrix and entry p of the rhs satisfy
/// residual_p(beta) = matrix.row(p) . beta - rhs(p) for a linear problem.
template <class Problem>
inline LinearSystem assemble_linear(const Problem& problem,
                                    const std::vector<ConstrainedExpression>& ces,
                                    const CollocationGrid& grid) {
    if (!problem.linear)
        throw std::invalid_argument("assemble_linear requires a problem flagged linear");
    if (static_cast<int>(ces.size()) != problem.output_count)
        throw std::invalid_argument("constrained expression count does not match problem");
    detail::CollocationSystem<Problem> sys(problem, ces, grid);
    return sys.linear_system();
}

/// Full training step: build one constrained expression per unknown, then
/// dispatch to a single SVD least-squares solve (linear problems) or
/// Gauss-Newton from beta = 0 (nonlinear problems). Systems of equations
/// are solved coupled, with the unknowns' weight vectors stacked.
template <class Problem>
inline SolveOutcome solve(const Problem& problem, const std::vector<ElmBasis>& bases,
                          const CollocationGrid& grid, const SolveConfig& cfg = {}) {
    if (static_cast<int>(bases.size()) != problem.output_count)
        throw std::invalid_argument("expected one basis per unknown");
    detail::check_grid_in_domain(problem, grid);
    std::vector<ConstrainedExpression> ces;
    ces.reserve(bases.size());
    for (int o = 0; o < problem.output_count; ++o)
        ces.emplace_back(problem.constraints[static_cast<std::size_t>(o)],
                         bases[static_cast<std::size_t>(o)]);
    detail::CollocationSystem<Problem> sys(problem, ces, grid);

    SolveOutcome out;
    if (problem.linear) {
        const LinearSystem ls = sys.linear_system();
        const auto start = std::chrono::steady_clock::now();
        out.beta = lstsq_svd(ls.matrix, ls.rhs, cfg.rcond);
        out.solve_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.converged = true;
        out.iterations = 1;
        out.train_residual_max = sys.residual(out.beta).cwiseAbs().maxCoeff();
        out.residual_history = {out.train_residual_max};
    } else {
        out = gauss_newton([&sys](const Eigen::VectorXd& b) { return sys.residual(b); },
                           [&sys](const Eigen::VectorXd& b) { return sys.jacobian(b); },
                           Eigen::VectorXd::Zero(sys.total_cols()), cfg);
    }
    out.betas.reserve(static_cast<std::size_t>(problem.output_count));
    for (int o = 0; o < problem.output_count; ++o)
        out.betas.push_back(out.beta.segment(sys.column_offset(o), sys.columns_of(o)));
    return out;
}

} // namespace xtfc

#endif // XTFC_SOLVER_HPP
