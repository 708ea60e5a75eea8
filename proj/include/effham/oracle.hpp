#ifndef EFFHAM_ORACLE_HPP
#define EFFHAM_ORACLE_HPP

#include <map>
#include <span>
#include <vector>

#include "effham/algebra.hpp"
#include "effham/bath.hpp"
#include "effham/perturbation.hpp"

namespace effham {

// Qubit + truncated bosonic modes, evolved exactly by dense diagonalization.
struct DiscreteBathSim {
    std::vector<Mode> modes;
    int fock_cutoff = 8;  // states per mode
    double beta = std::numeric_limits<double>::infinity();
    std::vector<Complex> displacement;  // optional coherent offset per mode

    long total_dim() const;
    // The bath specification this simulator realizes (discrete spectral
    // density, temperature and coherent mean), for feeding the series.
    BathSpec bath_spec() const;
};

constexpr long kMaxSimDim = 4096;

struct DynamicalMapSeries {
    std::vector<double> times;
    std::vector<SuperOperator> maps;        // reduced qubit maps Phi_t
    std::vector<SuperOperator> generators;  // L_t, filled by generator_from_map
};

// Propagates each qubit basis element |a><b| (x) rho_E under the full unitary
// and partial-traces the environment. rho_E is the (renormalized) truncated
// thermal state, coherently displaced when requested.
DynamicalMapSeries simulate_map(const DiscreteBathSim& sim, const SpinModel& model,
                                std::span<const double> times);

// L_t = dPhi/dt Phi^{-1} on a uniform time grid: centered differences inside
// (4th order where the stencil fits), one-sided at the endpoints. Inversion is
// singular-value thresholded; a smallest singular value below 1e-8 aborts with
// the offending time.
std::vector<SuperOperator> generator_from_map(const DynamicalMapSeries& series);

// Maps and generators at arbitrary times: each generator comes from a local
// 5-point stencil of width fd_step around its time.
DynamicalMapSeries simulate_with_generators(const DiscreteBathSim& sim,
                                            const SpinModel& model,
                                            std::span<const double> times, double fd_step);

// Exact TCL generator of the pure-dephasing model (A = sigma_z, Fock-diagonal
// bath state):  -i[(omega/2) sigma_z, .] + gamma(t) (sigma_z . sigma_z - .)
// with gamma(t) = 2 lambda^2 int_0^t Re C(s) ds.
SuperOperator exact_dephasing_generator(const BathSpec& bath, const SpinModel& model,
                                        double t);

struct OracleReport {
    std::vector<double> times;
    std::vector<Operator> k_exact;            // from the simulated generator
    std::map<int, std::vector<double>> residuals;  // ||K_exact - partial_sum_n||_F
    double lambda = 0.0;
};

// K_exact(t) against the lab-frame partial sums of a KSeries on the same grid.
OracleReport oracle_compare(const DynamicalMapSeries& series, const KSeries& kseries);

// Per-time scaling exponents log2( r(lambda) / r(lambda/2) ) of the residual
// after the given order; an exponent near n+... identifies the first missing
// order of the expansion.
std::vector<double> scaling_exponents(const OracleReport& at_lambda,
                                      const OracleReport& at_half_lambda, int order);

// Max entrywise change of the maps when the Fock cutoff doubles (truncation
// adequacy; the desk-scale invariant requires <= 1e-8).
double truncation_change(const DiscreteBathSim& sim, const SpinModel& model,
                         std::span<const double> times);

}  // namespace effham

#endif
