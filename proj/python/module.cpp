#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "effham/bath.hpp"
#include "effham/oracle.hpp"
#include "effham/perturbation.hpp"
#include "effham/splitting.hpp"

namespace py = pybind11;
using namespace effham;

namespace {

BasisKind basis_kind(const std::string& kind) {
    if (kind == "elementary") return BasisKind::ElementaryUnits;
    if (kind == "gell_mann") return BasisKind::GeneralizedGellMann;
    throw std::invalid_argument("kind must be 'elementary' or 'gell_mann'");
}

std::vector<SandwichTerm> to_terms(
    const std::vector<std::tuple<Complex, Operator, Operator>>& raw) {
    std::vector<SandwichTerm> terms;
    terms.reserve(raw.size());
    for (const auto& [w, l, r] : raw) terms.push_back({w, l, r});
    return terms;
}

std::vector<Jump> to_jumps(const std::vector<std::pair<double, Operator>>& raw) {
    std::vector<Jump> jumps;
    jumps.reserve(raw.size());
    for (const auto& [rate, op] : raw) jumps.push_back({rate, op});
    return jumps;
}

}  // namespace

PYBIND11_MODULE(_effham, m) {
    m.doc() = "Minimal-dissipation effective Hamiltonians for open quantum systems";

    py::class_<SuperOperator>(m, "SuperOperator")
        .def(py::init<int, Eigen::MatrixXcd>(), py::arg("dim"), py::arg("matrix"))
        .def_readonly("dim", &SuperOperator::dim)
        .def_readonly("matrix", &SuperOperator::matrix)
        .def("apply", &SuperOperator::apply)
        .def("__add__", [](const SuperOperator& a, const SuperOperator& b) { return a + b; })
        .def("__sub__", [](const SuperOperator& a, const SuperOperator& b) { return a - b; });

    m.def("make_basis", [](int d, const std::string& kind) {
        return make_basis(d, basis_kind(kind)).elements;
    }, py::arg("d"), py::arg("kind") = "gell_mann");
    m.def("hs_inner", &hs_inner);
    m.def("superop_from_sandwich",
          [](const std::vector<std::tuple<Complex, Operator, Operator>>& terms) {
              return superop_from_sandwich(to_terms(terms));
          });
    m.def("commutator_generator", &commutator_generator);
    m.def("lindblad_generator",
          [](const Operator& h, const std::vector<std::pair<double, Operator>>& jumps) {
              return lindblad_generator(h, to_jumps(jumps));
          }, py::arg("h"), py::arg("jumps") = std::vector<std::pair<double, Operator>>{});
    m.def("check_htp", [](const SuperOperator& l) {
        const HtpReport r = check_htp(l);
        return py::make_tuple(r.hermiticity_preserving, r.trace_annihilating,
                              r.hermiticity_residual, r.trace_residual);
    });

    py::class_<GeneratorSplit>(m, "GeneratorSplit")
        .def_readonly("k", &GeneratorSplit::k)
        .def_readonly("dissipator", &GeneratorSplit::dissipator)
        .def_readonly("kossakowski", &GeneratorSplit::kossakowski)
        .def_property_readonly("jumps", [](const GeneratorSplit& s) {
            std::vector<std::pair<double, Operator>> out;
            for (const auto& j : s.jumps) out.emplace_back(j.rate, j.op);
            return out;
        });

    m.def("effective_hamiltonian", &effective_hamiltonian);
    m.def("effective_hamiltonian_su", &effective_hamiltonian_su);
    m.def("effective_hamiltonian_pseudokraus",
          [](const std::vector<std::tuple<Complex, Operator, Operator>>& terms) {
              return effective_hamiltonian_pseudokraus(to_terms(terms));
          });
    m.def("split", &split);
    m.def("reconstruct", &reconstruct);
    m.def("haar_mc_effective_hamiltonian",
          [](const SuperOperator& l, long samples, std::uint64_t seed) {
              const HaarMcEstimate e = haar_mc_effective_hamiltonian(l, samples, seed);
              return py::make_tuple(e.estimate, e.std_error);
          }, py::arg("l"), py::arg("samples"), py::arg("seed"));
    m.def("fidelity_weights", &fidelity_weights);
    m.def("k_from_fidelity_weights", &k_from_fidelity_weights);

    py::class_<BathSpec>(m, "BathSpec")
        .def_static("ohmic_exp", [](double alpha, double omega_c, double beta) {
            return BathSpec{SpectralDensity::ohmic_exp(alpha, omega_c), beta, {}};
        }, py::arg("alpha"), py::arg("omega_c"),
           py::arg("beta") = std::numeric_limits<double>::infinity())
        .def_static("drude", [](double lambda, double gamma, double beta) {
            return BathSpec{SpectralDensity::drude(lambda, gamma), beta, {}};
        }, py::arg("lambda_reorg"), py::arg("gamma"), py::arg("beta"))
        .def_static("discrete_modes",
            [](const std::vector<std::pair<double, double>>& modes, double beta) {
                std::vector<Mode> ms;
                for (const auto& [g, w] : modes) ms.push_back({g, w});
                return BathSpec{SpectralDensity::discrete_modes(std::move(ms)), beta, {}};
            }, py::arg("modes"), py::arg("beta") = std::numeric_limits<double>::infinity())
        .def("with_coherent_mean", [](BathSpec bath, double g, double omega, Complex alpha) {
            bath.mean.push_back(BathSpec::coherent_mean(g, omega, alpha));
            return bath;
        })
        .def_readonly("beta", &BathSpec::beta)
        .def("mean_at", &BathSpec::mean_at);

    m.def("thermal_correlation", &thermal_correlation);
    m.def("noise_and_response", [](const BathSpec& bath, double t, double s) {
        const NoiseResponse nr = noise_and_response(bath, t, s);
        return py::make_tuple(nr.s, nr.chi);
    });
    m.def("wick_moment", [](const BathSpec& bath, const std::vector<double>& left,
                            const std::vector<double>& right) {
        return wick_moment(bath, left, right);
    });
    m.def("ordered_cumulant", [](const BathSpec& bath, double t,
                                 const std::vector<double>& left,
                                 const std::vector<double>& right) {
        return ordered_cumulant(bath, t, left, right);
    });

    py::class_<CorrelationTable>(m, "CorrelationTable")
        .def_readonly("step", &CorrelationTable::step)
        .def_readonly("t_max", &CorrelationTable::t_max)
        .def_readonly("values", &CorrelationTable::c)
        .def("value", &CorrelationTable::value);
    m.def("build_correlation_table", &build_correlation_table);

    py::class_<SpinModel>(m, "SpinModel")
        .def_static("dephasing", &SpinModel::dephasing, py::arg("omega"), py::arg("lambda"))
        .def_static("unbiased", &SpinModel::unbiased, py::arg("omega"), py::arg("lambda"))
        .def_static("with_coupling", &SpinModel::with_coupling)
        .def_readonly("omega", &SpinModel::omega)
        .def_readonly("lambda_", &SpinModel::lambda)
        .def_readonly("coupling_op", &SpinModel::coupling_op);

    m.def("interaction_picture_a", &interaction_picture_a);
    m.def("a_product", [](const SpinModel& model, const std::vector<double>& times) {
        return a_product(model, times);
    });
    m.def("x_operator", [](const SpinModel& model, const std::vector<double>& left,
                           const std::vector<double>& right) {
        return x_operator(model, left, right);
    });
    m.def("k_order", [](const SpinModel& model, const BathSpec& bath, int n, double t,
                        double step) {
        return k_order(model, bath, n, t, {step});
    });
    m.def("k2_closed_form", [](const SpinModel& model, const BathSpec& bath, double t,
                               double step) {
        return k2_closed_form(model, bath, t, {step});
    });
    m.def("k_order_symmetry_resolved", [](const SpinModel& model, const BathSpec& bath,
                                          int n, double t, double step) {
        return k_order_symmetry_resolved(model, bath, n, t, {step});
    });

    py::class_<KSeries>(m, "KSeries")
        .def_readonly("times", &KSeries::times)
        .def_readonly("orders", &KSeries::orders)
        .def_readonly("partial_sums", &KSeries::partial_sums);
    m.def("k_series", [](const SpinModel& model, const BathSpec& bath, int max_order,
                         const std::vector<double>& times, double step) {
        return k_series(model, bath, max_order, times, {step});
    });
    m.def("report_observables", [](const KSeries& series) {
        std::vector<std::tuple<double, double, double, double, double>> rows;
        for (const auto& r : report_observables(series))
            rows.emplace_back(r.t, r.omega_r, r.kx, r.ky, r.rotation_angle);
        return rows;
    });

    py::class_<DiscreteBathSim>(m, "DiscreteBathSim")
        .def(py::init([](const std::vector<std::pair<double, double>>& modes,
                         int fock_cutoff, double beta,
                         const std::vector<Complex>& displacement) {
                 DiscreteBathSim sim;
                 for (const auto& [g, w] : modes) sim.modes.push_back({g, w});
                 sim.fock_cutoff = fock_cutoff;
                 sim.beta = beta;
                 sim.displacement = displacement;
                 return sim;
             }),
             py::arg("modes"), py::arg("fock_cutoff") = 8,
             py::arg("beta") = std::numeric_limits<double>::infinity(),
             py::arg("displacement") = std::vector<Complex>{})
        .def("total_dim", &DiscreteBathSim::total_dim)
        .def("bath_spec", &DiscreteBathSim::bath_spec);

    py::class_<DynamicalMapSeries>(m, "DynamicalMapSeries")
        .def_readonly("times", &DynamicalMapSeries::times)
        .def_readonly("maps", &DynamicalMapSeries::maps)
        .def_readonly("generators", &DynamicalMapSeries::generators);
    m.def("simulate_map", [](const DiscreteBathSim& sim, const SpinModel& model,
                             const std::vector<double>& times) {
        return simulate_map(sim, model, times);
    });
    m.def("generator_from_map", &generator_from_map);
    m.def("simulate_with_generators",
          [](const DiscreteBathSim& sim, const SpinModel& model,
             const std::vector<double>& times, double fd_step) {
              return simulate_with_generators(sim, model, times, fd_step);
          });
    m.def("exact_dephasing_generator", &exact_dephasing_generator);

    py::class_<OracleReport>(m, "OracleReport")
        .def_readonly("times", &OracleReport::times)
        .def_readonly("k_exact", &OracleReport::k_exact)
        .def_readonly("residuals", &OracleReport::residuals)
        .def_readonly("lambda_", &OracleReport::lambda);
    m.def("oracle_compare", &oracle_compare);
    m.def("scaling_exponents", &scaling_exponents);
    m.def("truncation_change", [](const DiscreteBathSim& sim, const SpinModel& model,
                                  const std::vector<double>& times) {
        return truncation_change(sim, model, times);
    });
}
