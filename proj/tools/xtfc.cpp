// Benchmark command line: single solves, Monte-Carlo robustness studies,
// accuracy sweeps, and published-baseline comparison tables.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xtfc/bench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;

std::vector<int> parse_int_list(const std::string& text, char sep) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty()) throw CLI::ValidationError("expected a non-empty list: " + text);
    return out;
}

std::vector<int> parse_range(const std::string& text) {
    // "a:b:step" inclusive range, or a plain comma list
    if (text.find(':') == std::string::npos) return parse_int_list(text, ',');
    const auto parts = parse_int_list(text, ':');
    if (parts.size() != 3 || parts[2] <= 0)
        throw CLI::ValidationError("expected a:b:step with positive step: " + text);
    std::vector<int> out;
    for (int v = parts[0]; v <= parts[1]; v += parts[2]) out.push_back(v);
    return out;
}

std::pair<double, double> parse_pair(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("expected lo,hi: " + text);
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

void write_text(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << body;
}

struct CommonOptions {
    std::string problem;
    xtfc::RunConfig cfg;
    std::string activation_name;
    std::string points_text;
    std::string weight_range_text;

    void attach(CLI::App& cmd, bool require_problem = true) {
        auto* opt = cmd.add_option("--problem", problem, "problem id (ode1..pde7)");
        if (require_problem) opt->required();
        cmd.add_option("--neurons", cfg.neurons, "hidden neuron count");
        cmd.add_option("--points", points_text,
                       "per-dimension training point counts, e.g. 30,30");
        cmd.add_option("--activation", activation_name,
                       "activation: logistic|tanh|sin|gaussian");
        cmd.add_option("--seed", cfg.seed, "base RNG seed");
        cmd.add_option("--weight-range", weight_range_text, "uniform init interval lo,hi");
        cmd.add_option("--tol", cfg.tol, "nonlinear convergence tolerance");
        cmd.add_option("--max-iter", cfg.max_iter, "Gauss-Newton iteration cap");
        cmd.add_option("--rcond", cfg.rcond, "SVD truncation ratio (default eps*max(N,L))");
    }

    void finalize() {
        if (!points_text.empty()) cfg.points = parse_int_list(points_text, ',');
        if (!activation_name.empty())
            cfg.activation = xtfc::parse_activation(activation_name);
        if (!weight_range_text.empty()) cfg.weight_range = parse_pair(weight_range_text);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"X-TFC differential equation benchmark harness"};
    app.require_subcommand(1);

    CommonOptions solve_opts, mc_opts, sweep_opts;
    std::string solve_out, mc_out, mc_csv, sweep_out, compare_out, compare_problem;
    int mc_trials = 1000, sweep_trials = 10;
    std::string sweep_axis_name = "points", sweep_values_text;

    auto* solve_cmd = app.add_subcommand("solve", "run one seeded solve and report errors");
    solve_opts.attach(*solve_cmd);
    solve_cmd->add_option("--out", solve_out, "JSON report path (default stdout)");

    auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo robustness study");
    mc_opts.attach(*mc_cmd);
    mc_cmd->add_option("--trials", mc_trials, "number of trials");
    mc_cmd->add_option("--out", mc_out, "JSON summary path (default stdout)");
    mc_cmd->add_option("--csv", mc_csv, "optional histogram CSV path");

    auto* sweep_cmd = app.add_subcommand("sweep", "error vs points-per-side or neurons");
    sweep_opts.attach(*sweep_cmd);
    sweep_cmd->add_option("--axis", sweep_axis_name, "swept axis: points|neurons")
        ->check(CLI::IsMember({"points", "neurons"}));
    sweep_cmd->add_option("--values", sweep_values_text, "a:b:step or comma list")->required();
    sweep_cmd->add_option("--trials", sweep_trials, "trials per swept value");
    sweep_cmd->add_option("--out", sweep_out, "CSV path (default stdout)");

    auto* compare_cmd =
        app.add_subcommand("compare", "X-TFC vs published baselines (pde1|pde2|pde3)");
    compare_cmd->add_option("--problem", compare_problem, "problem id")->required();
    compare_cmd->add_option("--out", compare_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*solve_cmd) {
            solve_opts.finalize();
            const auto report = xtfc::run_once(solve_opts.problem, solve_opts.cfg);
            write_text(solve_out, report.to_json().dump(2) + "\n");
            if (!report.converged) {
                std::cerr << "warning: solve did not converge within the iteration cap\n";
                return kExitNoConvergence;
            }
        } else if (*mc_cmd) {
            mc_opts.finalize();
            const auto summary =
                xtfc::monte_carlo(mc_opts.problem, mc_opts.cfg, mc_trials);
            write_text(mc_out, summary.to_json().dump(2) + "\n");
            if (!mc_csv.empty()) {
                std::ostringstream os;
                summary.write_histogram_csv(os);
                write_text(mc_csv, os.str());
            }
        } else if (*sweep_cmd) {
            sweep_opts.finalize();
            const auto axis = sweep_axis_name == "points" ? xtfc::SweepAxis::points
                                                          : xtfc::SweepAxis::neurons;
            const auto values = parse_range(sweep_values_text);
            const auto curve = xtfc::sweep(xtfc::find_problem(sweep_opts.problem), axis,
                                           values, sweep_trials, sweep_opts.cfg);
            std::ostringstream os;
            curve.write_csv(os);
            write_text(sweep_out, os.str());
        } else if (*compare_cmd) {
            const auto& problem = xtfc::find_problem(compare_problem);
            const auto rows = xtfc::compare_table(problem);
            std::ostringstream os;
            xtfc::write_compare_csv(os, compare_problem, rows);
            write_text(compare_out, os.str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
