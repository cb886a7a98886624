#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "xtfc/elm.hpp"
#include "fd_oracles.hpp"

using xtfc::ActivationKind;
using xtfc::ElmBasis;
using xtfc::MultiIndex;

TEST_CASE("seeded init respects the sampling interval") {
    // ODE-style interval
    ElmBasis ode_basis(50, 1, {-10.0, 10.0}, 1, ActivationKind::logistic);
    CHECK((ode_basis.weights().array().abs() <= 10.0).all());
    CHECK((ode_basis.biases().array().abs() <= 10.0).all());
    CHECK(ode_basis.weights().size() + ode_basis.biases().size() == 100);

    // PDE-style interval
    ElmBasis pde_basis(170, 2, {-1.0, 1.0}, 7, ActivationKind::tanh);
    CHECK((pde_basis.weights().array().abs() <= 1.0).all());
    CHECK((pde_basis.biases().array().abs() <= 1.0).all());
}

TEST_CASE("seeded init is deterministic") {
    ElmBasis a(33, 3, {-2.0, 5.0}, 99, ActivationKind::sin);
    ElmBasis b(33, 3, {-2.0, 5.0}, 99, ActivationKind::sin);
    CHECK(a.weights() == b.weights());
    CHECK(a.biases() == b.biases());
    ElmBasis c(33, 3, {-2.0, 5.0}, 100, ActivationKind::sin);
    CHECK(a.weights() != c.weights());
}

TEST_CASE("init precondition checks") {
    CHECK_THROWS_AS(ElmBasis(0, 1, {-1.0, 1.0}, 1, ActivationKind::tanh),
                    std::invalid_argument);
    CHECK_THROWS_AS(ElmBasis(5, 0, {-1.0, 1.0}, 1, ActivationKind::tanh),
                    std::invalid_argument);
    CHECK_THROWS_AS(ElmBasis(5, 1, {1.0, -1.0}, 1, ActivationKind::tanh),
                    std::invalid_argument);
}

TEST_CASE("single neuron derivative row has the closed form") {
    Eigen::MatrixXd w(1, 2);
    w << 2.0, 3.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(1);
    ElmBasis basis(w, b, ActivationKind::tanh);
    const double x[] = {0.0, 0.0};
    CHECK(basis.basis_row(x, MultiIndex{1, 0})(0) == Catch::Approx(2.0));
    CHECK(basis.basis_row(x, MultiIndex{0, 1})(0) == Catch::Approx(3.0));
    CHECK(basis.basis_row(x, MultiIndex{1, 1})(0) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("basis derivative rows match finite differences") {
    ElmBasis basis(14, 2, {-1.5, 1.5}, 5, ActivationKind::gaussian);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const double x0 = unif(rng), x1 = unif(rng);
        for (int j = 0; j < basis.neurons(); ++j) {
            auto value_at = [&](double u) {
                const double p[] = {u, x1};
                return basis.basis_row(p, MultiIndex{0, 0})(j);
            };
            const double d2 = basis.basis_row(std::array{x0, x1}, MultiIndex{2, 0})(j);
            CHECK(std::abs(d2 - oracle::central_diff2(value_at, x0)) / (1.0 + std::abs(d2)) <
                  1e-5);
            const double d1 = basis.basis_row(std::array{x0, x1}, MultiIndex{0, 1})(j);
            auto value_y = [&](double u) {
                const double p[] = {x0, u};
                return basis.basis_row(p, MultiIndex{0, 0})(j);
            };
            CHECK(std::abs(d1 - oracle::central_diff(value_y, x1)) / (1.0 + std::abs(d1)) <
                  1e-5);
        }
    }
}

TEST_CASE("mixed partials agree with nested finite differences") {
    ElmBasis basis(8, 2, {-2.0, 2.0}, 21, ActivationKind::logistic);
    const double x[] = {0.3, -0.4};
    auto dy_of_row0 = [&](double u) {
        const double p[] = {u, x[1]};
        return basis.basis_row(p, MultiIndex{0, 1})(0);
    };
    const double got = basis.basis_row(x, MultiIndex{1, 1})(0);
    CHECK(std::abs(got - oracle::central_diff(dy_of_row0, x[0])) / (1.0 + std::abs(got)) <
          1e-5);
}

TEST_CASE("free function evaluation is linear in the output weights") {
    ElmBasis basis(20, 2, {-1.0, 1.0}, 17, ActivationKind::tanh);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        Eigen::VectorXd b1 = Eigen::VectorXd::NullaryExpr(20, [&] { return unif(rng); });
        Eigen::VectorXd b2 = Eigen::VectorXd::NullaryExpr(20, [&] { return unif(rng); });
        const double a = unif(rng), c = unif(rng);
        const double x[] = {unif(rng), unif(rng)};
        const MultiIndex d{1, 0};
        const double combined = basis.eval(a * b1 + c * b2, x, d);
        const double parts = a * basis.eval(b1, x, d) + c * basis.eval(b2, x, d);
        CHECK(std::abs(combined - parts) <= 1e-12 * (1.0 + std::abs(parts)));
    }
}

TEST_CASE("zero output weights give the zero function") {
    ElmBasis basis(10, 3, {-1.0, 1.0}, 2, ActivationKind::sin);
    const Eigen::VectorXd beta = Eigen::VectorXd::Zero(10);
    const double x[] = {0.2, 0.4, 0.9};
    CHECK(basis.eval(beta, x) == 0.0);
    CHECK(basis.eval(beta, x, MultiIndex{1, 1, 0}) == 0.0);
}

TEST_CASE("free function derivative matches finite differences") {
    ElmBasis basis(16, 1, {-4.0, 4.0}, 9, ActivationKind::logistic);
    Eigen::VectorXd beta = Eigen::VectorXd::LinSpaced(16, -1.0, 1.0);
    for (double t : {0.1, 0.5, 0.9}) {
        auto g = [&](double u) {
            const double p[] = {u};
            return basis.eval(beta, p);
        };
        const double p[] = {t};
        const double got = basis.eval(beta, p, MultiIndex{1});
        CHECK(std::abs(got - oracle::central_diff(g, t)) / (1.0 + std::abs(got)) < 1e-5);
    }
}

TEST_CASE("evaluation rejects bad arguments") {
    ElmBasis basis(6, 2, {-1.0, 1.0}, 4, ActivationKind::tanh);
    const double x[] = {0.0, 0.0};
    const double short_x[] = {0.0};
    CHECK_THROWS_AS(basis.basis_row(x, MultiIndex{3, 2}), std::invalid_argument);
    CHECK_THROWS_AS(basis.basis_row(short_x), std::invalid_argument);
    CHECK_THROWS_AS(basis.eval(Eigen::VectorXd::Zero(5), x), std::invalid_argument);
}

TEST_CASE("domain-mapped input behaves like a rescaled network") {
    Eigen::MatrixXd w(1, 1);
    w << 1.5;
    Eigen::VectorXd b(1);
    b << 0.25;
    // box [1, 3] maps to [-1, 1]: tau(t) = t - 2
    ElmBasis mapped(w, b, ActivationKind::sin, {{1.0, 3.0}});
    const double t[] = {2.5};
    CHECK(mapped.basis_row(t)(0) == Catch::Approx(std::sin(1.5 * 0.5 + 0.25)));
    CHECK(mapped.basis_row(t, MultiIndex{1})(0) ==
          Catch::Approx(1.5 * std::cos(1.5 * 0.5 + 0.25)));
}
