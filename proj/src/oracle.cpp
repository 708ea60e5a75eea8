#include "effham/oracle.hpp"

#include <cmath>

#include "effham/quadrature.hpp"
#include "effham/splitting.hpp"

namespace effham {

namespace {

const Complex I(0.0, 1.0);

Eigen::MatrixXcd mode_lowering(int n_states) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_states, n_states);
    for (int n = 1; n < n_states; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// lift a single-mode operator into the full environment space
Eigen::MatrixXcd lift(const Eigen::MatrixXcd& op, int mode, int n_modes, int n_states) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int j = 0; j < n_modes; ++j)
        out = kron(out, j == mode ? op
                                  : Eigen::MatrixXcd::Identity(n_states, n_states));
    return out;
}

struct SimOperators {
    Eigen::MatrixXcd hamiltonian;  // full system+bath Hamiltonian
    Eigen::MatrixXcd rho_env;      // initial bath state, unit trace
    long dim_env = 0;
};

SimOperators build_sim(const DiscreteBathSim& sim, const SpinModel& model) {
    if (sim.fock_cutoff < 2) throw std::invalid_argument("simulate_map: fock_cutoff < 2");
    const long dim = sim.total_dim();
    if (dim > kMaxSimDim)
        throw std::invalid_argument("simulate_map: total dimension exceeds 4096");
    const int n_modes = static_cast<int>(sim.modes.size());
    const int ns = sim.fock_cutoff;
    const long dim_env = dim / 2;

    Eigen::MatrixXcd h_env = Eigen::MatrixXcd::Zero(dim_env, dim_env);
    Eigen::MatrixXcd b_env = Eigen::MatrixXcd::Zero(dim_env, dim_env);
    for (int j = 0; j < n_modes; ++j) {
        const Eigen::MatrixXcd a = mode_lowering(ns);
        h_env += sim.modes[j].omega * lift(a.adjoint() * a, j, n_modes, ns);
        b_env += sim.modes[j].g * lift(a + a.adjoint(), j, n_modes, ns);
    }

    SimOperators ops;
    ops.dim_env = dim_env;
    const Eigen::MatrixXcd id_env = Eigen::MatrixXcd::Identity(dim_env, dim_env);
    ops.hamiltonian = kron(0.5 * model.omega * pauli_z(), id_env) +
                      kron(identity_op(2), h_env) +
                      model.lambda * kron(model.coupling_op, b_env);

    // thermal state per mode, renormalized after truncation
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(1, 1);
    for (int j = 0; j < n_modes; ++j) {
        Eigen::VectorXd p(ns);
        if (std::isinf(sim.beta)) {
            p.setZero();
            p(0) = 1.0;
        } else {
            for (int n = 0; n < ns; ++n) p(n) = std::exp(-sim.beta * sim.modes[j].omega * n);
            p /= p.sum();
        }
        rho = kron(rho, p.cast<Complex>().asDiagonal());
    }
    if (!sim.displacement.empty()) {
        if (sim.displacement.size() != sim.modes.size())
            throw std::invalid_argument("simulate_map: one displacement per mode required");
        Eigen::MatrixXcd disp = Eigen::MatrixXcd::Identity(dim_env, dim_env);
        for (int j = 0; j < n_modes; ++j) {
            const Complex alpha = sim.displacement[j];
            if (alpha == 0.0) continue;
            const Eigen::MatrixXcd a = mode_lowering(ns);
            // exp(alpha a^dag - conj(alpha) a) via the Hermitian generator
            const Eigen::MatrixXcd herm = I * (alpha * a.adjoint() - std::conj(alpha) * a);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
            Eigen::VectorXcd phases(ns);
            for (int n = 0; n < ns; ++n) phases(n) = std::polar(1.0, -es.eigenvalues()(n));
            const Eigen::MatrixXcd d_op = es.eigenvectors() * phases.asDiagonal() *
                                          es.eigenvectors().adjoint();
            disp = lift(d_op, j, n_modes, ns) * disp;
        }
        rho = disp * rho * disp.adjoint();
    }
    rho /= rho.trace().real();
    ops.rho_env = std::move(rho);
    return ops;
}

}  // namespace

long DiscreteBathSim::total_dim() const {
    long dim = 2;
    for (std::size_t j = 0; j < modes.size(); ++j) dim *= fock_cutoff;
    return dim;
}

BathSpec DiscreteBathSim::bath_spec() const {
    BathSpec bath;
    bath.j = SpectralDensity::discrete_modes(modes);
    bath.beta = beta;
    if (!displacement.empty()) {
        for (std::size_t j = 0; j < modes.size(); ++j)
            if (displacement[j] != 0.0)
                bath.mean.push_back(BathSpec::coherent_mean(modes[j].g, modes[j].omega,
                                                            displacement[j]));
    }
    return bath;
}

DynamicalMapSeries simulate_map(const DiscreteBathSim& sim, const SpinModel& model,
                                std::span<const double> times) {
    const SimOperators ops = build_sim(sim, model);
    const long dim_env = ops.dim_env;
    const long dim = 2 * dim_env;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ops.hamiltonian);
    const Eigen::MatrixXcd& v = es.eigenvectors();
    const Eigen::VectorXd& energy = es.eigenvalues();

    // Y_ab = V^dag (E_ab (x) rho_E) V, reused at every time
    std::vector<Eigen::MatrixXcd> y(4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dim, dim);
            x.block(a * dim_env, b * dim_env, dim_env, dim_env) = ops.rho_env;
            y[static_cast<std::size_t>(a) + 2 * b] = v.adjoint() * x * v;
        }

    DynamicalMapSeries series;
    series.times.assign(times.begin(), times.end());
    series.maps.reserve(times.size());
    Eigen::VectorXcd phase(dim);
    for (double t : times) {
        for (long e = 0; e < dim; ++e) phase(e) = std::polar(1.0, -energy(e) * t);
        SuperOperator phi = SuperOperator::zero(2);
        for (int c = 0; c < 4; ++c) {
            const Eigen::MatrixXcd z =
                phase.asDiagonal() * y[static_cast<std::size_t>(c)] *
                phase.conjugate().asDiagonal();
            const Eigen::MatrixXcd full = v * z * v.adjoint();
            Operator reduced = Operator::Zero(2, 2);
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    reduced(p, q) = full.block(p * dim_env, q * dim_env, dim_env, dim_env)
                                        .trace();
            phi.matrix.col(c) = vec(reduced);
        }
        series.maps.push_back(std::move(phi));
    }
    return series;
}

std::vector<SuperOperator> generator_from_map(const DynamicalMapSeries& series) {
    const std::size_t n = series.times.size();
    if (n < 2) throw std::invalid_argument("generator_from_map: need at least two times");
    const double h = series.times[1] - series.times[0];
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(series.times[i] - series.times[i - 1] - h) > 1e-9 * std::max(1.0, h))
            throw std::invalid_argument("generator_from_map: times must be uniform");

    auto phi = [&](std::size_t i) -> const Eigen::MatrixXcd& {
        return series.maps[i].matrix;
    };
    std::vector<SuperOperator> generators;
    generators.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::MatrixXcd dphi;
        if (i >= 2 && i + 2 < n) {
            dphi = (-phi(i + 2) + 8.0 * phi(i + 1) - 8.0 * phi(i - 1) + phi(i - 2)) /
                   (12.0 * h);
        } else if (i >= 1 && i + 1 < n) {
            dphi = (phi(i + 1) - phi(i - 1)) / (2.0 * h);
        } else if (i == 0) {
            dphi = (-3.0 * phi(0) + 4.0 * phi(1) - phi(2)) / (2.0 * h);
        } else {
            dphi = (3.0 * phi(i) - 4.0 * phi(i - 1) + phi(i - 2)) / (2.0 * h);
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(phi(i),
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double sv_min = svd.singularValues().minCoeff();
        if (sv_min <= 1e-8)
            throw std::runtime_error(
                "generator_from_map: dynamical map singular at t = " +
                std::to_string(series.times[i]) + " (smallest singular value " +
                std::to_string(sv_min) + ")");
        // L = dPhi * Phi^{-1}, solved as Phi^T L^T = dPhi^T
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd_t(
            phi(i).transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::MatrixXcd l_t = svd_t.solve(dphi.transpose());
        generators.push_back({series.maps[i].dim, l_t.transpose()});
    }
    return generators;
}

DynamicalMapSeries simulate_with_generators(const DiscreteBathSim& sim,
                                            const SpinModel& model,
                                            std::span<const double> times, double fd_step) {
    if (fd_step <= 0.0)
        throw std::invalid_argument("simulate_with_generators: fd_step must be positive");
    std::vector<double> cluster_times;
    std::vector<std::size_t> center(times.size());
    cluster_times.reserve(5 * times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        double base = t - 2.0 * fd_step;
        std::size_t pick = 2;
        if (base < 0.0) {
            base = 0.0;
            pick = static_cast<std::size_t>(std::llround(t / fd_step));
            if (std::abs(pick * fd_step - t) > 1e-9)
                throw std::invalid_argument(
                    "simulate_with_generators: times below 2*fd_step must be multiples "
                    "of fd_step");
        }
        center[i] = cluster_times.size() + pick;
        for (int j = 0; j < 5; ++j) cluster_times.push_back(base + j * fd_step);
    }

    const DynamicalMapSeries all = simulate_map(sim, model, cluster_times);
    DynamicalMapSeries out;
    out.times.assign(times.begin(), times.end());
    for (std::size_t i = 0; i < times.size(); ++i) {
        DynamicalMapSeries cluster;
        const std::size_t base = 5 * i;
        cluster.times.assign(all.times.begin() + base, all.times.begin() + base + 5);
        cluster.maps.assign(all.maps.begin() + base, all.maps.begin() + base + 5);
        const std::vector<SuperOperator> gens = generator_from_map(cluster);
        out.maps.push_back(all.maps[center[i]]);
        out.generators.push_back(gens[center[i] - base]);
    }
    return out;
}

SuperOperator exact_dephasing_generator(const BathSpec& bath, const SpinModel& model,
                                        double t) {
    if ((model.coupling_op - pauli_z()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("exact_dephasing_generator: requires A = sigma_z");
    if (!bath.zero_mean())
        throw std::invalid_argument("exact_dephasing_generator: requires a zero-mean bath");
    double integral = 0.0;
    if (bath.j.kind == SpectralDensity::Kind::DiscreteModes) {
        for (const auto& m : bath.j.modes) {
            const double th =
                std::isinf(bath.beta) ? 1.0 : 1.0 / std::tanh(0.5 * bath.beta * m.omega);
            integral += m.g * m.g * th * std::sin(m.omega * t) / m.omega;
        }
    } else if (t > 0.0) {
        integral = quad::integrate(
                       [&](double s) -> Complex {
                           return thermal_correlation(bath, s).real();
                       },
                       0.0, t, 1e-10, 1e-14)
                       .real();
    }
    const double gamma = 2.0 * model.lambda * model.lambda * integral;
    const Operator id = identity_op(2);
    SuperOperator l = commutator_generator(0.5 * model.omega * pauli_z());
    l += superop_from_sandwich({{gamma, pauli_z(), pauli_z()}, {-gamma, id, id}});
    return l;
}

OracleReport oracle_compare(const DynamicalMapSeries& series, const KSeries& kseries) {
    if (series.times.size() != kseries.times.size())
        throw std::invalid_argument("oracle_compare: time grid mismatch");
    for (std::size_t i = 0; i < series.times.size(); ++i)
        if (std::abs(series.times[i] - kseries.times[i]) > 1e-9)
            throw std::invalid_argument("oracle_compare: time grid mismatch");

    const std::vector<SuperOperator> generators =
        series.generators.size() == series.times.size() ? series.generators
                                                        : generator_from_map(series);
    OracleReport report;
    report.times = series.times;
    report.lambda = kseries.metadata.lambda;
    report.k_exact.reserve(generators.size());
    for (const auto& l : generators) report.k_exact.push_back(effective_hamiltonian(l));
    for (const auto& [order, sums] : kseries.partial_sums) {
        auto& res = report.residuals[order];
        res.resize(report.times.size());
        for (std::size_t i = 0; i < res.size(); ++i)
            res[i] = (report.k_exact[i] - sums[i]).norm();
    }
    return report;
}

std::vector<double> scaling_exponents(const OracleReport& at_lambda,
                                      const OracleReport& at_half_lambda, int order) {
    const auto full = at_lambda.residuals.find(order);
    const auto half = at_half_lambda.residuals.find(order);
    if (full == at_lambda.residuals.end() || half == at_half_lambda.residuals.end())
        throw std::invalid_argument("scaling_exponents: order missing from report");
    std::vector<double> exponents(full->second.size());
    for (std::size_t i = 0; i < exponents.size(); ++i)
        exponents[i] = std::log2(full->second[i] / half->second[i]);
    return exponents;
}

double truncation_change(const DiscreteBathSim& sim, const SpinModel& model,
                         std::span<const double> times) {
    DiscreteBathSim doubled = sim;
    doubled.fock_cutoff = 2 * sim.fock_cutoff;
    const DynamicalMapSeries coarse = simulate_map(sim, model, times);
    const DynamicalMapSeries fine = simulate_map(doubled, model, times);
    double change = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        change = std::max(change,
                          (coarse.maps[i].matrix - fine.maps[i].matrix).cwiseAbs().maxCoeff());
    return change;
}

}  // namespace effham
