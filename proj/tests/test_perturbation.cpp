#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "effham/perturbation.hpp"
#include "test_util.hpp"

using namespace effham;

namespace {

const Complex I(0.0, 1.0);
constexpr double kInf = std::numeric_limits<double>::infinity();

BathSpec single_mode(double g, double omega, double beta) {
    return {SpectralDensity::discrete_modes({{g, omega}}), beta, {}};
}

// K_2 for A = sigma_x and a stationary bath reduces to
//   K_2(t) = sigma_z * int_0^t S(u) sin(omega u) du,
// since [A(t),A(s)] = 2i sin(omega (t-s)) sigma_z and {A(t),A(s)} is a pure
// trace. For a single mode, S(u) = g^2 coth(beta w0/2) cos(w0 u) and the
// integral has the elementary closed form below.
Operator analytic_k2_sigma_x(double omega, double g, double w0, double coth, double t) {
    auto term = [&](double b) { return (1.0 - std::cos(b * t)) / b; };
    const double integral = 0.5 * g * g * coth * (term(omega + w0) + term(omega - w0));
    return integral * pauli_z();
}

}  // namespace

TEST_CASE("interaction picture coupling operator") {
    SUBCASE("sigma_z is constant") {
        const SpinModel model = SpinModel::dephasing(1.3, 0.1);
        for (double t : {0.0, 0.7, 2.4})
            CHECK(test::max_abs_diff(interaction_picture_a(model, t), pauli_z()) < 1e-15);
    }
    SUBCASE("sigma_x rotates into sigma_+ e^{iwt} + sigma_- e^{-iwt}") {
        const double w = 1.7;
        const SpinModel model = SpinModel::unbiased(w, 0.1);
        for (double t : {0.3, 1.9}) {
            const Operator expected = std::polar(1.0, w * t) * sigma_plus() +
                                      std::polar(1.0, -w * t) * sigma_minus();
            CHECK(test::max_abs_diff(interaction_picture_a(model, t), expected) < 1e-14);
        }
    }
    SUBCASE("arbitrary coupling at t = 0") {
        test::Rng rng(3);
        const Operator a = test::random_hermitian(2, rng);
        const SpinModel model = SpinModel::with_coupling(0.9, 0.2, a);
        CHECK(test::max_abs_diff(interaction_picture_a(model, 0.0), a) < 1e-15);
    }
}

TEST_CASE("time-ordered coupling products") {
    const double w = 1.1;
    const SpinModel model = SpinModel::unbiased(w, 0.1);

    SUBCASE("empty product is the identity") {
        CHECK(test::max_abs_diff(a_product(model, {}), identity_op(2)) == 0.0);
    }
    SUBCASE("even count gives 1 cos(phi) + i sigma_z sin(phi)") {
        const std::vector<double> times{2.0, 0.8};
        const double phi = -w * (-times[0] + times[1]);
        const Operator expected =
            std::cos(phi) * identity_op(2) + I * std::sin(phi) * pauli_z();
        CHECK(test::max_abs_diff(a_product(model, times), expected) < 1e-14);
    }
    SUBCASE("odd count keeps the off-diagonal structure") {
        const std::vector<double> times{2.2, 1.5, 0.3};
        const double phi = -w * (-times[0] + times[1] - times[2]);
        const Operator expected = std::polar(1.0, phi) * sigma_plus() +
                                  std::polar(1.0, -phi) * sigma_minus();
        CHECK(test::max_abs_diff(a_product(model, times), expected) < 1e-14);
    }
    SUBCASE("unordered input rejected") {
        const std::vector<double> bad{0.3, 1.0};
        CHECK_THROWS_AS(a_product(model, bad), std::invalid_argument);
    }
}

TEST_CASE("X operator parity table") {
    SUBCASE("sigma_z coupling") {
        const SpinModel model = SpinModel::dephasing(1.0, 0.1);
        const std::vector<double> one{1.0}, two{1.5, 0.5}, three{2.0, 1.0, 0.4};
        CHECK(test::max_abs_diff(x_operator(model, one, two), pauli_z()) < 1e-14);
        CHECK(x_operator(model, one, one).norm() < 1e-15);   // (k odd, q odd)
        CHECK(x_operator(model, two, one).norm() < 1e-15);   // (k even, q odd)
        CHECK(test::max_abs_diff(x_operator(model, two, two), identity_op(2)) < 1e-14);
        CHECK(test::max_abs_diff(x_operator(model, three, two), pauli_z()) < 1e-14);
    }
    SUBCASE("sigma_x coupling, n even k even") {
        const double w = 1.4;
        const SpinModel model = SpinModel::unbiased(w, 0.1);
        const std::vector<double> tau{1.8, 0.9}, s{1.2, 0.2};
        const double phi_tau = w * (tau[0] - tau[1]);
        const double phi_s = w * (s[0] - s[1]);
        const Operator x = x_operator(model, tau, s);
        // traceless part matches cos(phi_s) i sin(phi_tau) sigma_z; the
        // identity component carries the cos(phi_tau) factor of the product
        CHECK(test::max_abs_diff(traceless_part(x),
                                 std::cos(phi_s) * I * std::sin(phi_tau) * pauli_z()) <
              1e-14);
        const Operator direct =
            0.5 * std::conj(a_product(model, s).trace()) * a_product(model, tau);
        CHECK(test::max_abs_diff(x, direct) < 1e-14);
    }
}

TEST_CASE("first order vanishes for zero-mean baths and equals m(t) A(t) otherwise") {
    const QuadratureScheme quad{0.05};
    const SpinModel model = SpinModel::unbiased(1.2, 0.3);
    BathSpec bath = single_mode(0.6, 1.5, 2.0);
    CHECK(k_order(model, bath, 1, 1.5, quad).norm() == 0.0);

    bath.mean.push_back(BathSpec::coherent_mean(0.6, 1.5, Complex(0.4, -0.1)));
    for (double t : {0.0, 0.75, 1.5}) {
        const Operator expected = bath.mean_at(t) * interaction_picture_a(model, t);
        CHECK(test::max_abs_diff(k_order(model, bath, 1, t, quad), expected) < 1e-13);
    }
}

TEST_CASE("second order for pure dephasing vanishes") {
    const QuadratureScheme quad{0.02};
    const SpinModel model = SpinModel::dephasing(1.0, 0.2);
    const BathSpec bath{SpectralDensity::ohmic_exp(0.5, 3.0), 1.5, {}};
    CHECK(k_order(model, bath, 2, 1.0, quad).norm() < 1e-13);
    CHECK(k2_closed_form(model, bath, 1.0, quad).norm() < 1e-13);
}

TEST_CASE("second order for sigma_x against the analytic single-mode value") {
    const double w = 1.0, g = 0.7, w0 = 1.6;
    const SpinModel model = SpinModel::unbiased(w, 0.2);
    const QuadratureScheme quad{1.0 / 512.0};

    for (double beta : {kInf, 1.3}) {
        const BathSpec bath = single_mode(g, w0, beta);
        const double coth = std::isinf(beta) ? 1.0 : 1.0 / std::tanh(0.5 * beta * w0);
        for (double t : {0.5, 1.0}) {
            const Operator expected = analytic_k2_sigma_x(w, g, w0, coth, t);
            const Operator computed = k_order(model, bath, 2, t, quad);
            CHECK((computed - expected).norm() < 1e-4 * expected.norm());
            // diagonal structure is exact at any step
            CHECK(std::abs(computed(0, 1)) < 1e-14);
        }
    }
}

TEST_CASE("closed-form k2 equals the recursion route") {
    const SpinModel model = SpinModel::unbiased(1.0, 0.2);
    const QuadratureScheme quad{0.02};
    const BathSpec bath = single_mode(0.7, 1.6, kInf);
    for (double t : {0.4, 1.2, 2.0}) {
        const Operator a = k_order(model, bath, 2, t, quad);
        const Operator b = k2_closed_form(model, bath, t, quad);
        CHECK((a - b).norm() < 1e-12);
    }
    CHECK(k2_closed_form(model, bath, 0.0, quad).norm() == 0.0);

    BathSpec displaced = bath;
    displaced.mean.push_back(BathSpec::coherent_mean(0.7, 1.6, Complex(0.2, 0.0)));
    CHECK_THROWS_AS(k2_closed_form(model, displaced, 1.0, quad), std::invalid_argument);
}

TEST_CASE("symmetry-resolved assembly equals the direct route") {
    const QuadratureScheme quad{0.05};
    BathSpec bath = single_mode(0.8, 1.4, 1.8);
    const SpinModel sx = SpinModel::unbiased(1.1, 0.2);
    const SpinModel sz = SpinModel::dephasing(1.1, 0.2);

    SUBCASE("n = 2, sigma_x") {
        for (double t : {0.5, 1.5}) {
            const Operator a = k_order(sx, bath, 2, t, quad);
            const Operator b = k_order_symmetry_resolved(sx, bath, 2, t, quad);
            CHECK((a - b).norm() < 1e-10);
        }
    }
    SUBCASE("n = 1 with a displaced mean") {
        BathSpec displaced = bath;
        displaced.mean.push_back(BathSpec::coherent_mean(0.8, 1.4, Complex(0.3, 0.2)));
        for (const SpinModel& model : {sx, sz}) {
            const Operator a = k_order(model, displaced, 1, 1.0, quad);
            const Operator b = k_order_symmetry_resolved(model, displaced, 1, 1.0, quad);
            CHECK((a - b).norm() < 1e-12);
        }
    }
    SUBCASE("n = 3 zero mean vanishes on both routes") {
        CHECK(k_order(sx, bath, 3, 1.0, quad).norm() == 0.0);
        CHECK(k_order_symmetry_resolved(sx, bath, 3, 1.0, quad).norm() == 0.0);
    }
    SUBCASE("n = 3 and 4 with a displaced mean") {
        BathSpec displaced = bath;
        displaced.mean.push_back(BathSpec::coherent_mean(0.8, 1.4, Complex(0.3, 0.2)));
        const QuadratureScheme coarse{0.125};
        for (int n : {3, 4}) {
            const Operator a = k_order(sx, displaced, n, 1.0, coarse);
            const Operator b = k_order_symmetry_resolved(sx, displaced, n, 1.0, coarse);
            CHECK((a - b).norm() < 1e-10 * std::max(1.0, a.norm()));
        }
    }
}

TEST_CASE("closed-form coupling paths match the generic matrix path") {
    const QuadratureScheme quad{0.1};
    BathSpec bath = single_mode(0.8, 1.4, 1.8);
    bath.mean.push_back(BathSpec::coherent_mean(0.8, 1.4, Complex(0.25, -0.3)));
    for (const SpinModel& model :
         {SpinModel::dephasing(1.2, 0.2), SpinModel::unbiased(1.2, 0.2)}) {
        for (int n : {1, 2, 3, 4}) {
            const Operator fast = k_order(model, bath, n, 1.0, quad);
            const Operator generic = k_order(model, bath, n, 1.0, quad, {true});
            CHECK((fast - generic).norm() < 1e-12 * std::max(1.0, fast.norm()));
        }
    }
}

TEST_CASE("every computed order is Hermitian and traceless") {
    const QuadratureScheme quad{0.1};
    BathSpec bath{SpectralDensity::ohmic_exp(0.4, 2.0), 1.2, {}};
    bath.mean.push_back({0.3, -0.1, 1.7});
    test::Rng rng(9);
    const SpinModel model = SpinModel::with_coupling(1.0, 0.2, test::random_hermitian(2, rng));
    for (int n = 0; n <= 4; ++n) {
        const Operator k = k_order(model, bath, n, 1.0, quad);
        CHECK(is_hermitian(k, 1e-10));
        CHECK(is_traceless(k, 1e-10));
    }
}

TEST_CASE("quadrature convergence of k2 is second order") {
    const SpinModel model = SpinModel::unbiased(1.0, 0.2);
    const BathSpec bath{SpectralDensity::ohmic_exp(0.5, 2.5), kInf, {}};
    const double t = 1.0;
    const Operator k_h = k_order(model, bath, 2, t, {1.0 / 64.0});
    const Operator k_h2 = k_order(model, bath, 2, t, {1.0 / 128.0});
    const Operator k_h4 = k_order(model, bath, 2, t, {1.0 / 256.0});
    const double d1 = (k_h - k_h2).norm();
    const double d2 = (k_h2 - k_h4).norm();
    const double order = std::log2(d1 / d2);
    CHECK(order > 1.8);
    CHECK(order < 2.6);
}

TEST_CASE("k_series structure") {
    const QuadratureScheme quad{0.05};
    const std::vector<double> times{0.5, 1.0, 1.5, 2.0};

    SUBCASE("lambda = 0 partial sums reduce to the free Hamiltonian") {
        const SpinModel model = SpinModel::unbiased(1.3, 0.0);
        const BathSpec bath = single_mode(0.5, 1.2, 2.0);
        const KSeries series = k_series(model, bath, 2, times, quad);
        for (const auto& k : series.partial_sums.at(2))
            CHECK(test::max_abs_diff(k, 0.5 * 1.3 * pauli_z()) < 1e-13);
    }

    SUBCASE("pure dephasing: all orders >= 1 vanish, K = (w/2) sigma_z") {
        const SpinModel model = SpinModel::dephasing(1.0, 0.3);
        const BathSpec bath{SpectralDensity::ohmic_exp(0.4, 2.0), 1.5, {}};
        const KSeries series = k_series(model, bath, 4, times, quad);
        for (int n = 1; n <= 4; ++n)
            for (const auto& k : series.orders.at(n)) CHECK(k.norm() < 1e-12);
        const auto rows = report_observables(series);
        for (const auto& r : rows) {
            CHECK(r.omega_r == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(std::abs(r.kx) < 1e-12);
            CHECK(std::abs(r.ky) < 1e-12);
        }
    }

    SUBCASE("sigma_x coupling keeps K diagonal; omega_r is time dependent") {
        const SpinModel model = SpinModel::unbiased(1.0, 0.35);
        const BathSpec bath = single_mode(0.7, 1.6, 2.5);
        const KSeries series = k_series(model, bath, 4, times, quad);
        for (int n = 1; n <= 4; ++n)
            for (const auto& k : series.orders.at(n)) CHECK(std::abs(k(0, 1)) < 1e-12);
        const auto rows = report_observables(series);
        double spread = 0.0;
        for (const auto& r : rows) {
            CHECK(std::abs(r.kx) < 1e-12);
            CHECK(std::abs(r.ky) < 1e-12);
            spread = std::max(spread, std::abs(r.omega_r - 1.0));
        }
        CHECK(spread > 1e-3);  // the renormalization actually moves
    }

    SUBCASE("displaced bath: odd orders have zero diagonal for sigma_x") {
        const SpinModel model = SpinModel::unbiased(1.0, 0.3);
        BathSpec bath = single_mode(0.7, 1.6, 2.5);
        bath.mean.push_back(BathSpec::coherent_mean(0.7, 1.6, Complex(0.4, 0.1)));
        const KSeries series = k_series(model, bath, 3, times, {0.1});
        for (int n : {1, 3})
            for (const auto& k : series.orders.at(n)) {
                CHECK(std::abs(k(0, 0)) < 1e-12);
                CHECK(std::abs(k(1, 1)) < 1e-12);
            }
        bool some_drive = false;
        for (const auto& k : series.orders.at(1)) some_drive |= k.norm() > 1e-3;
        CHECK(some_drive);
    }

    SUBCASE("metadata and invariants") {
        const SpinModel model = SpinModel::unbiased(1.0, 0.3);
        const BathSpec bath = single_mode(0.7, 1.6, 2.5);
        const KSeries series = k_series(model, bath, 2, times, quad);
        CHECK(series.metadata.max_order == 2);
        CHECK(series.metadata.lambda == 0.3);
        for (const auto& k : series.orders.at(0))
            CHECK(test::max_abs_diff(k, 0.5 * pauli_z()) < 1e-14);
        for (const auto& [n, ops] : series.orders)
            for (const auto& k : ops) {
                CHECK(is_hermitian(k, 1e-10));
                CHECK(is_traceless(k, 1e-10));
            }
    }
}

TEST_CASE("report_observables angles") {
    KSeries series;
    series.times = {1.0, 2.0};
    series.metadata.lambda = 0.0;
    series.orders[0] = {0.5 * 1.4 * pauli_z(), 0.5 * 1.4 * pauli_x()};
    series.partial_sums[0] = series.orders[0];
    const auto rows = report_observables(series);
    CHECK(rows[0].omega_r == doctest::Approx(1.4));
    CHECK(rows[0].rotation_angle == doctest::Approx(0.0));
    CHECK(rows[1].omega_r == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rows[1].kx == doctest::Approx(1.4));
    CHECK(rows[1].rotation_angle == doctest::Approx(M_PI / 2));
}

TEST_CASE("series preconditions") {
    const SpinModel model = SpinModel::unbiased(1.0, 0.3);
    const BathSpec bath = single_mode(0.7, 1.6, 2.5);
    const std::vector<double> times{1.0};
    CHECK_THROWS_AS(k_series(model, bath, 5, times, {0.05}), std::invalid_argument);
    CHECK_THROWS_AS(k_order(model, bath, 2, 1.003, {0.05}), std::invalid_argument);
    const BathSpec drude{SpectralDensity::drude(0.3, 1.0), 1.0, {}};
    CHECK_THROWS_AS(k_order(model, drude, 2, 1.0, {0.05}), std::invalid_argument);
}
