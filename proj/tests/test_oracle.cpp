#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "effham/oracle.hpp"
#include "effham/splitting.hpp"
#include "test_util.hpp"

using namespace effham;

namespace {

const Complex I(0.0, 1.0);
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    return out;
}

}  // namespace

TEST_CASE("lambda = 0 reduces to conjugation by the free evolution") {
    DiscreteBathSim sim{{{0.4, 1.3}}, 5, 2.0, {}};
    const SpinModel model = SpinModel::unbiased(1.1, 0.0);
    const std::vector<double> times{0.0, 0.8, 1.7};
    const DynamicalMapSeries series = simulate_map(sim, model, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Operator u = (Complex(0, -0.5 * 1.1 * times[i]) * pauli_z()).exp();
        test::Rng rng(5);
        const Operator x = test::random_matrix(2, rng);
        CHECK(test::max_abs_diff(series.maps[i].apply(x), u * x * u.adjoint()) < 1e-12);
    }
}

TEST_CASE("map invariants: identity at t = 0, trace preservation, CP spot check") {
    DiscreteBathSim sim{{{0.5, 1.2}, {0.3, 2.1}}, 4, 1.5, {}};
    const SpinModel model = SpinModel::unbiased(1.0, 0.4);
    const std::vector<double> times{0.0, 1.2};
    const DynamicalMapSeries series = simulate_map(sim, model, times);

    CHECK((series.maps[0].matrix - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);

    test::Rng rng(11);
    for (const auto& phi : series.maps) {
        for (int probe = 0; probe < 5; ++probe) {
            const Operator x = test::random_matrix(2, rng);
            CHECK(std::abs(phi.apply(x).trace() - x.trace()) < 1e-10);
        }
        // Choi matrix of the exact reduced dynamics is positive
        Eigen::MatrixXcd choi = Eigen::MatrixXcd::Zero(4, 4);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                Operator e = Operator::Zero(2, 2);
                e(a, b) = 1.0;
                choi += kron(e, phi.apply(e));
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(choi);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("semigroup recovery: generator of exp(t L0) is L0") {
    const SuperOperator l0 = lindblad_generator(
        0.5 * 0.9 * pauli_z(), {{0.3, sigma_minus()}, {0.15, pauli_z()}});
    DynamicalMapSeries series;
    series.times = linspace(0.0, 1.0, 101);
    for (double t : series.times)
        series.maps.push_back({2, (t * l0.matrix).exp()});
    const auto generators = generator_from_map(series);
    for (std::size_t i = 2; i + 2 < series.times.size(); i += 7)
        CHECK((generators[i].matrix - l0.matrix).norm() < 1e-8);
}

TEST_CASE("single-mode dephasing map reproduces the decoherence closed form") {
    const double w = 1.0, g = 0.5, w0 = 1.4, lambda = 0.6;
    for (double beta : {kInf, 2.0}) {
        DiscreteBathSim sim{{{g, w0}}, 30, beta, {}};
        const SpinModel model = SpinModel::dephasing(w, lambda);
        const std::vector<double> times{0.5, 1.5, 3.0};
        const DynamicalMapSeries series = simulate_map(sim, model, times);
        const double coth = std::isinf(beta) ? 1.0 : 1.0 / std::tanh(0.5 * beta * w0);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double t = times[i];
            const double decoherence =
                4.0 * lambda * lambda * g * g * coth * (1.0 - std::cos(w0 * t)) / (w0 * w0);
            // vec(E_01) sits at column 2; the map is diagonal on coherences
            const Complex expected = std::exp(Complex(-decoherence, -w * t));
            CHECK(std::abs(series.maps[i].matrix(2, 2) - expected) < 1e-10);
            // populations are frozen
            CHECK(std::abs(series.maps[i].matrix(0, 0) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("simulation dimension cap enforced") {
    DiscreteBathSim sim{{{0.3, 1.0}, {0.3, 1.2}, {0.3, 1.4}}, 18, 2.0, {}};
    REQUIRE(sim.total_dim() > kMaxSimDim);
    const std::vector<double> times{0.5};
    CHECK_THROWS_AS(simulate_map(sim, SpinModel::dephasing(1.0, 0.1), times),
                    std::invalid_argument);
}

TEST_CASE("exact dephasing generator") {
    const double w = 1.0, g = 0.5, w0 = 1.4, lambda = 0.35;
    const SpinModel model = SpinModel::dephasing(w, lambda);

    SUBCASE("gamma vanishes at t = 0") {
        const BathSpec bath{SpectralDensity::discrete_modes({{g, w0}}), kInf, {}};
        const SuperOperator l = exact_dephasing_generator(bath, model, 0.0);
        CHECK((l.matrix - commutator_generator(0.5 * w * pauli_z()).matrix).norm() < 1e-13);
    }

    SUBCASE("single zero-temperature mode rate") {
        const BathSpec bath{SpectralDensity::discrete_modes({{g, w0}}), kInf, {}};
        const double t = 1.2;
        const double gamma = 2.0 * lambda * lambda * g * g * std::sin(w0 * t) / w0;
        const SuperOperator expected =
            commutator_generator(0.5 * w * pauli_z()) +
            superop_from_sandwich({{gamma, pauli_z(), pauli_z()},
                                   {-gamma, identity_op(2), identity_op(2)}});
        CHECK((exact_dephasing_generator(bath, model, t).matrix - expected.matrix).norm() <
              1e-12);
    }

    SUBCASE("matches the generator extracted from the exact simulation") {
        const double beta = 1.8;
        const BathSpec bath{SpectralDensity::discrete_modes({{g, w0}}), beta, {}};
        DiscreteBathSim sim{{{g, w0}}, 25, beta, {}};
        const std::vector<double> times{0.6, 1.4, 2.5};
        const DynamicalMapSeries series =
            simulate_with_generators(sim, model, times, 0.004);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const SuperOperator exact = exact_dephasing_generator(bath, model, times[i]);
            CHECK((series.generators[i].matrix - exact.matrix).norm() < 1e-6);
        }
    }

    SUBCASE("extracted K is the free Hamiltonian") {
        const BathSpec bath{SpectralDensity::discrete_modes({{g, w0}}), 2.2, {}};
        const SuperOperator l = exact_dephasing_generator(bath, model, 1.7);
        CHECK(test::max_abs_diff(effective_hamiltonian(l), 0.5 * w * pauli_z()) < 1e-12);
    }

    SUBCASE("wrong coupling rejected") {
        const BathSpec bath{SpectralDensity::discrete_modes({{g, w0}}), kInf, {}};
        CHECK_THROWS_AS(exact_dephasing_generator(bath, SpinModel::unbiased(w, lambda), 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("Richardson check: halving the finite-difference step is stable") {
    DiscreteBathSim sim{{{0.5, 1.3}}, 10, 2.0, {}};
    const SpinModel model = SpinModel::unbiased(1.0, 0.3);
    const std::vector<double> times{1.3};
    const auto coarse = simulate_with_generators(sim, model, times, 0.01);
    const auto fine = simulate_with_generators(sim, model, times, 0.005);
    CHECK((coarse.generators[0].matrix - fine.generators[0].matrix).norm() < 1e-6);
}

TEST_CASE("extracted generators are HTP within finite-difference error") {
    DiscreteBathSim sim{{{0.5, 1.3}}, 10, 2.0, {}};
    const SpinModel model = SpinModel::unbiased(1.0, 0.3);
    const std::vector<double> times{0.7, 1.9};
    const DynamicalMapSeries series = simulate_with_generators(sim, model, times, 0.005);
    for (const auto& l : series.generators) {
        const auto [herm, trace] = htp_basis_residuals(l);
        CHECK(herm < 1e-8);
        CHECK(trace < 1e-8);
    }
}

TEST_CASE("generator extraction flags singular maps") {
    // strong uniform damping makes Phi numerically singular quickly
    const SuperOperator l0 = lindblad_generator(
        Operator::Zero(2, 2), {{20.0, sigma_minus()}, {20.0, sigma_plus()}});
    DynamicalMapSeries series;
    series.times = linspace(0.0, 1.2, 25);
    for (double t : series.times) series.maps.push_back({2, (t * l0.matrix).exp()});
    CHECK_THROWS_AS(generator_from_map(series), std::runtime_error);
}

TEST_CASE("oracle comparison") {
    const double w = 1.0;
    DiscreteBathSim sim{{{0.45, 1.5}, {0.35, 0.9}}, 7, 2.0, {}};

    SUBCASE("lambda = 0: residuals at machine scale") {
        const SpinModel model = SpinModel::unbiased(w, 0.0);
        const std::vector<double> times{0.8, 1.6};
        const DynamicalMapSeries maps = simulate_with_generators(sim, model, times, 0.004);
        const KSeries series = k_series(model, sim.bath_spec(), 2, times, {0.05});
        const OracleReport report = oracle_compare(maps, series);
        for (double r : report.residuals.at(2)) CHECK(r < 1e-10);
    }

    SUBCASE("sigma_x: each order improves the fit and K_exact is diagonal") {
        const SpinModel model = SpinModel::unbiased(w, 0.25);
        const std::vector<double> times{1.0, 2.0};
        const DynamicalMapSeries maps = simulate_with_generators(sim, model, times, 0.005);
        const KSeries series = k_series(model, sim.bath_spec(), 4, times, {0.01});
        const OracleReport report = oracle_compare(maps, series);
        for (std::size_t i = 0; i < times.size(); ++i) {
            CHECK(report.residuals.at(2)[i] < 0.2 * report.residuals.at(0)[i]);
            CHECK(report.residuals.at(4)[i] < 0.5 * report.residuals.at(2)[i]);
            CHECK(std::abs(report.k_exact[i](0, 1)) < 1e-5);
        }
    }

    SUBCASE("grid mismatch is rejected") {
        const SpinModel model = SpinModel::unbiased(w, 0.2);
        const std::vector<double> ta{1.0}, tb{1.5};
        const DynamicalMapSeries maps = simulate_with_generators(sim, model, ta, 0.01);
        const KSeries series = k_series(model, sim.bath_spec(), 2, tb, {0.05});
        CHECK_THROWS_AS(oracle_compare(maps, series), std::invalid_argument);
    }
}

TEST_CASE("truncation adequacy of the desk-scale configuration") {
    DiscreteBathSim sim{{{0.4, 1.2}}, 8, 2.5, {}};
    const SpinModel model = SpinModel::unbiased(1.0, 0.3);
    const std::vector<double> times{1.0, 2.0};
    CHECK(truncation_change(sim, model, times) < 1e-8);
}

TEST_CASE("displaced bath: residuals scale as the first missing order through n = 3") {
    DiscreteBathSim sim{{{0.5, 1.3}}, 14, 2.5, {Complex(0.45, 0.25)}};
    const std::vector<double> times{1.0, 2.0};
    OracleReport reports[2];
    const double lams[2] = {0.2, 0.1};
    for (int i = 0; i < 2; ++i) {
        const SpinModel model = SpinModel::unbiased(1.0, lams[i]);
        const auto maps = simulate_with_generators(sim, model, times, 0.003);
        const KSeries series = k_series(model, sim.bath_spec(), 3, times, {0.005});
        reports[i] = oracle_compare(maps, series);
    }
    for (int order = 1; order <= 3; ++order) {
        const double expected = std::pow(2.0, order + 1);  // next order is n+1
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double ratio =
                reports[0].residuals.at(order)[i] / reports[1].residuals.at(order)[i];
            CHECK(ratio > 0.85 * expected);
            CHECK(ratio < 1.15 * expected);
        }
    }
}

TEST_CASE("displaced initial state produces first-order driving") {
    const double g = 0.5, w0 = 1.3;
    DiscreteBathSim sim{{{g, w0}}, 14, kInf, {Complex(0.5, 0.2)}};
    const SpinModel model = SpinModel::unbiased(1.0, 0.12);
    const std::vector<double> times{0.9, 1.8};
    const DynamicalMapSeries maps = simulate_with_generators(sim, model, times, 0.005);
    const KSeries series = k_series(model, sim.bath_spec(), 2, times, {0.01});
    const OracleReport report = oracle_compare(maps, series);
    for (std::size_t i = 0; i < times.size(); ++i) {
        // transverse components of K_exact match the first-order drive
        const Operator k1 = series.orders.at(1)[i];
        CHECK(k1.norm() > 1e-3);
        CHECK(report.residuals.at(1)[i] < 0.25 * report.residuals.at(0)[i]);
    }
}
