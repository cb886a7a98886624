#ifndef XTFC_BENCH_HPP
#define XTFC_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xtfc/problems.hpp"

namespace xtfc {

using json = nlohmann::json;

/// Per-run configuration; unset fields fall back to the problem defaults.
struct RunConfig {
    std::uint64_t seed = 1;
    int neurons = -1;
    std::vector<int> points;
    std::optional<ActivationKind> activation;
    std::optional<std::pair<double, double>> weight_range;
    double tol = -1.0;
    double rcond = -1.0;
    int max_iter = -1;
};

struct RunReport {
    std::string problem;
    int neurons = 0;
    std::vector<int> points;
    std::string activation;
    double weight_lo = 0.0, weight_hi = 0.0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    double rcond = 0.0;
    int max_iter = 0;
    double train_max_error = 0.0, train_mean_error = 0.0;
    double test_max_error = 0.0, test_mean_error = 0.0;
    std::vector<double> output_train_max_error;
    std::vector<double> output_test_max_error;
    double train_max_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;

    json to_json() const {
        return json{{"problem", problem},
                    {"neurons", neurons},
                    {"points", points},
                    {"activation", activation},
                    {"weight_lo", weight_lo},
                    {"weight_hi", weight_hi},
                    {"seed", seed},
                    {"tol", tol},
                    {"rcond", rcond},
                    {"max_iter", max_iter},
                    {"train_max_error", train_max_error},
                    {"train_mean_error", train_mean_error},
                    {"test_max_error", test_max_error},
                    {"test_mean_error", test_mean_error},
                    {"output_train_max_error", output_train_max_error},
                    {"output_test_max_error", output_test_max_error},
                    {"train_max_residual", train_max_residual},
                    {"iterations", iterations},
                    {"converged", converged},
                    {"solve_seconds", solve_seconds},
                    {"total_seconds", total_seconds}};
    }

    static RunReport from_json(const json& j) {
        RunReport r;
        j.at("problem").get_to(r.problem);
        j.at("neurons").get_to(r.neurons);
        j.at("points").get_to(r.points);
        j.at("activation").get_to(r.activation);
        j.at("weight_lo").get_to(r.weight_lo);
        j.at("weight_hi").get_to(r.weight_hi);
        j.at("seed").get_to(r.seed);
        j.at("tol").get_to(r.tol);
        j.at("rcond").get_to(r.rcond);
        j.at("max_iter").get_to(r.max_iter);
        j.at("train_max_error").get_to(r.train_max_error);
        j.at("train_mean_error").get_to(r.train_mean_error);
        j.at("test_max_error").get_to(r.test_max_error);
        j.at("test_mean_error").get_to(r.test_mean_error);
        j.at("output_train_max_error").get_to(r.output_train_max_error);
        j.at("output_test_max_error").get_to(r.output_test_max_error);
        j.at("train_max_residual").get_to(r.train_max_residual);
        j.at("iterations").get_to(r.iterations);
        j.at("converged").get_to(r.converged);
        j.at("solve_seconds").get_to(r.solve_seconds);
        j.at("total_seconds").get_to(r.total_seconds);
        return r;
    }

    bool equal_modulo_timing(const RunReport& other) const {
        json a = to_json(), b = other.to_json();
        a.erase("solve_seconds");
        a.erase("total_seconds");
        b.erase("solve_seconds");
        b.erase("total_seconds");
        return a == b;
    }
};

namespace bench_detail {

struct ResolvedConfig {
    int neurons;
    std::vector<int> points;
    ActivationKind activation;
    double weight_lo, weight_hi;
    SolveConfig solver;
    std::uint64_t seed;
};

inline ResolvedConfig resolve(const ProblemDefinition& problem, const RunConfig& cfg) {
    ResolvedConfig r;
    r.neurons = cfg.neurons > 0 ? cfg.neurons : problem.defaults.neurons;
    r.points = cfg.points.empty() ? problem.defaults.grid : cfg.points;
    if (r.points.size() == 1 && problem.dim() > 1)
        r.points.assign(static_cast<std::size_t>(problem.dim()), r.points[0]);
    if (static_cast<int>(r.points.size()) != problem.dim())
        throw std::invalid_argument("expected " + std::to_string(problem.dim()) +
                                    " per-dimension point counts for " + problem.id);
    r.activation = cfg.activation.value_or(problem.defaults.activation);
    r.weight_lo = cfg.weight_range ? cfg.weight_range->first : problem.defaults.weight_lo;
    r.weight_hi = cfg.weight_range ? cfg.weight_range->second : problem.defaults.weight_hi;
    r.solver.tol = cfg.tol > 0.0 ? cfg.tol : problem.defaults.tol;
    r.solver.max_iter = cfg.max_iter > 0 ? cfg.max_iter : problem.defaults.max_iter;
    r.solver.rcond = cfg.rcond;
    r.seed = cfg.seed;
    return r;
}

/// Test points: a uniform grid at twice the training density, plus the
/// published table abscissae for the ODE problems.
inline CollocationGrid make_test_grid(const ProblemDefinition& problem,
                                      std::span<const int> train_counts) {
    std::vector<int> counts(train_counts.begin(), train_counts.end());
    for (int& c : counts) c *= 2;
    CollocationGrid grid = make_grid(problem, counts);
    auto append_axis = [&grid](double lo, double step, int n) {
        auto& axis = grid.axes[0];
        for (int i = 0; i <= n; ++i) axis.push_back(lo + step * static_cast<double>(i));
        std::sort(axis.begin(), axis.end());
        axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    };
    if (problem.id == "ode1") append_axis(1.0, 0.1, 10);
    if (problem.id == "sode2") append_axis(0.0, 0.3, 10);
    return grid;
}

struct ErrorStats {
    double max = 0.0;
    double mean = 0.0;
};

inline ErrorStats evaluate_errors(const ConstrainedExpression& ce, const CollocationGrid& grid,
                                  const Eigen::VectorXd& beta, const AnalyticFn& truth) {
    const AffineSystem sys = assemble_affine(ce, grid, MultiIndex::zeros(ce.dim()));
    const Eigen::VectorXd values = sys.offset + sys.rows * beta;
    const MultiIndex value_index = MultiIndex::zeros(ce.dim());
    ErrorStats stats;
    const std::size_t n = grid.size();
    for (std::size_t p = 0; p < n; ++p) {
        const auto x = grid.point_at(p);
        const double err = std::abs(values(static_cast<Eigen::Index>(p)) - truth(x, value_index));
        stats.max = std::max(stats.max, err);
        stats.mean += err;
    }
    stats.mean /= static_cast<double>(n);
    return stats;
}

inline double percentile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace bench_detail

/// Full pipeline for one seed: frozen random basis, constrained
/// expressions, collocation solve, then train/test errors against the
/// closed-form truth.
inline RunReport run_once(const ProblemDefinition& problem, const RunConfig& cfg = {}) {
    const auto total_start = std::chrono::steady_clock::now();
    const auto rc = bench_detail::resolve(problem, cfg);

    ElmBasis basis(rc.neurons, problem.dim(), {rc.weight_lo, rc.weight_hi}, rc.seed,
                   rc.activation,
                   problem.defaults.map_inputs ? problem.domain
                                               : std::vector<std::array<double, 2>>{});
    std::vector<ElmBasis> bases(static_cast<std::size_t>(problem.output_count), basis);
    const CollocationGrid train = make_grid(problem, rc.points);
    const CollocationGrid test = bench_detail::make_test_grid(problem, rc.points);

    const SolveOutcome outcome = solve(problem, bases, train, rc.solver);

    RunReport report;
    report.problem = problem.id;
    report.neurons = rc.neurons;
    report.points = rc.points;
    report.activation = to_string(rc.activation);
    report.weight_lo = rc.weight_lo;
    report.weight_hi = rc.weight_hi;
    report.seed = rc.seed;
    report.tol = rc.solver.tol;
    {
        std::size_t n_rows = train.size() * static_cast<std::size_t>(problem.output_count);
        report.rcond = effective_rcond(rc.solver.rcond, static_cast<Eigen::Index>(n_rows),
                                       static_cast<Eigen::Index>(problem.output_count) *
                                           rc.neurons);
    }
    report.max_iter = rc.solver.max_iter;
    report.iterations = outcome.iterations;
    report.converged = outcome.converged;
    report.train_max_residual = outcome.train_residual_max;
    report.solve_seconds = outcome.solve_seconds;

    for (int o = 0; o < problem.output_count; ++o) {
        const ConstrainedExpression ce(problem.constraints[static_cast<std::size_t>(o)],
                                       bases[static_cast<std::size_t>(o)]);
        const auto& truth = problem.exact[static_cast<std::size_t>(o)];
        const auto train_stats = bench_detail::evaluate_errors(
            ce, train, outcome.betas[static_cast<std::size_t>(o)], truth);
        const auto test_stats = bench_detail::evaluate_errors(
            ce, test, outcome.betas[static_cast<std::size_t>(o)], truth);
        report.output_train_max_error.push_back(train_stats.max);
        report.output_test_max_error.push_back(test_stats.max);
        report.train_max_error = std::max(report.train_max_error, train_stats.max);
        report.test_max_error = std::max(report.test_max_error, test_stats.max);
        report.train_mean_error += train_stats.mean / problem.output_count;
        report.test_mean_error += test_stats.mean / problem.output_count;
    }
    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - total_start).count();
    return report;
}

inline RunReport run_once(std::string_view problem_id, const RunConfig& cfg = {}) {
    return run_once(find_problem(problem_id), cfg);
}

struct McSummary {
    std::string problem;
    int trials = 0;
    int failures = 0;
    std::uint64_t base_seed = 0;
    std::vector<double> max_test_errors;             // by trial index
    std::vector<std::pair<double, int>> histogram;   // (log10 lower edge, count)
    double median = 0.0, p10 = 0.0, p25 = 0.0, p75 = 0.0, p90 = 0.0;

    json to_json() const {
        json bins = json::array();
        for (const auto& [edge, count] : histogram)
            bins.push_back(json{{"log10_lo", edge}, {"count", count}});
        return json{{"problem", problem},       {"trials", trials},
                    {"failures", failures},     {"base_seed", base_seed},
                    {"max_test_errors", max_test_errors},
                    {"histogram", bins},        {"median", median},
                    {"p10", p10},               {"p25", p25},
                    {"p75", p75},               {"p90", p90}};
    }

    void write_histogram_csv(std::ostream& os) const {
        os << "log10_lo,log10_hi,count\n";
        for (const auto& [edge, count] : histogram)
            os << edge << ',' << edge + 0.5 << ',' << count << '\n';
    }
};

/// Seeded robustness study: trial k runs the pipeline with seed
/// base_seed + k. Failed (non-converged) trials are counted, not fatal.
inline McSummary monte_carlo(const ProblemDefinition& problem, const RunConfig& cfg,
                             int trials) {
    if (trials < 1) throw std::invalid_argument("trial count must be >= 1");
    McSummary summary;
    summary.problem = problem.id;
    summary.trials = trials;
    summary.base_seed = cfg.seed;
    summary.max_test_errors.reserve(static_cast<std::size_t>(trials));
    for (int k = 0; k < trials; ++k) {
        RunConfig trial_cfg = cfg;
        trial_cfg.seed = cfg.seed + static_cast<std::uint64_t>(k);
        const RunReport report = run_once(problem, trial_cfg);
        if (!report.converged) ++summary.failures;
        summary.max_test_errors.push_back(report.test_max_error);
    }
    std::vector<double> sorted = summary.max_test_errors;
    std::sort(sorted.begin(), sorted.end());
    summary.median = bench_detail::percentile(sorted, 0.50);
    summary.p10 = bench_detail::percentile(sorted, 0.10);
    summary.p25 = bench_detail::percentile(sorted, 0.25);
    summary.p75 = bench_detail::percentile(sorted, 0.75);
    summary.p90 = bench_detail::percentile(sorted, 0.90);
    // log10 bins of width 0.5
    std::map<long, int> bins;
    for (double err : summary.max_test_errors) {
        const double l = std::log10(std::max(err, 1e-18));
        bins[static_cast<long>(std::floor(l / 0.5))]++;
    }
    for (const auto& [bin, count] : bins)
        summary.histogram.emplace_back(0.5 * static_cast<double>(bin), count);
    return summary;
}

inline McSummary monte_carlo(std::string_view problem_id, const RunConfig& cfg, int trials) {
    return monte_carlo(find_problem(problem_id), cfg, trials);
}

enum class SweepAxis { points, neurons };

inline std::string to_string(SweepAxis axis) {
    return axis == SweepAxis::points ? "points" : "neurons";
}

struct SweepPoint {
    int value = 0;
    double max_test_error = 0.0;
    double median_test_error = 0.0;
    int failures = 0;
};

struct SweepCurve {
    std::string problem;
    SweepAxis axis = SweepAxis::points;
    int trials = 0;
    std::vector<SweepPoint> points;

    void write_csv(std::ostream& os) const {
        os << "axis,value,trials,max_test_error,median_test_error,failures\n";
        for (const auto& p : points)
            os << to_string(axis) << ',' << p.value << ',' << trials << ',' << p.max_test_error
               << ',' << p.median_test_error << ',' << p.failures << '\n';
    }
};

/// Accuracy sweep along points-per-side or neuron count; each swept value
/// aggregates a Monte-Carlo batch (max over trials, as in the sensitivity
/// figures).
inline SweepCurve sweep(const ProblemDefinition& problem, SweepAxis axis,
                        std::span<const int> values, int trials, const RunConfig& base = {}) {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1])
            throw std::invalid_argument("sweep values must be strictly increasing");
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    SweepCurve curve;
    curve.problem = problem.id;
    curve.axis = axis;
    curve.trials = trials;
    for (int value : values) {
        RunConfig cfg = base;
        if (axis == SweepAxis::points)
            cfg.points.assign(static_cast<std::size_t>(problem.dim()), value);
        else
            cfg.neurons = value;
        const McSummary mc = monte_carlo(problem, cfg, trials);
        SweepPoint point;
        point.value = value;
        point.max_test_error =
            *std::max_element(mc.max_test_errors.begin(), mc.max_test_errors.end());
        point.median_test_error = mc.median;
        point.failures = mc.failures;
        curve.points.push_back(point);
    }
    return curve;
}

struct CompareRow {
    std::string method;
    double train_max_error = 0.0;
    bool has_train = false;
    double test_max_error = 0.0;
    std::string provenance;  // "measured" or "published"
};

/// Published maximum-error baselines for the problems that have them,
/// alongside a freshly measured run at the paper hyperparameters.
inline std::vector<CompareRow> compare_table(const ProblemDefinition& problem,
                                             const RunConfig& cfg = {}) {
    std::vector<CompareRow> rows;
    const RunReport measured = run_once(problem, cfg);
    rows.push_back({"X-TFC", measured.train_max_error, true, measured.test_max_error,
                    "measured"});
    if (problem.id == "pde1") {
        rows.push_back({"FEM", 2e-8, true, 1.5e-5, "published"});
        rows.push_back({"Lagaris", 5e-7, true, 5e-7, "published"});
        rows.push_back({"CNN", 0.0, false, 3.2e-2, "published"});
        rows.push_back({"BNN", 0.0, false, 2.4e-4, "published"});
    } else if (problem.id == "pde2") {
        rows.push_back({"FEM", 7e-7, true, 4e-5, "published"});
        rows.push_back({"Lagaris", 6e-6, true, 6e-6, "published"});
        rows.push_back({"CNN", 0.0, false, 3e-3, "published"});
    } else if (problem.id == "pde3") {
        rows.push_back({"FEM", 6e-7, true, 4e-5, "published"});
        rows.push_back({"Lagaris", 1.5e-5, true, 1.5e-5, "published"});
    } else {
        throw std::invalid_argument("no published baselines for '" + problem.id + "'");
    }
    return rows;
}

inline void write_compare_csv(std::ostream& os, const std::string& problem_id,
                              std::span<const CompareRow> rows) {
    os << "problem,method,train_max_error,test_max_error,provenance\n";
    for (const auto& row : rows) {
        os << problem_id << ',' << row.method << ',';
        if (row.has_train) os << row.train_max_error;
        os << ',' << row.test_max_error << ',' << row.provenance << '\n';
    }
}

} // namespace xtfc

#endif // XTFC_BENCH_HPP
