#ifndef EFFHAM_PERTURBATION_HPP
#define EFFHAM_PERTURBATION_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "effham/algebra.hpp"
#include "effham/bath.hpp"

namespace effham {

// Qubit with H_S = (omega/2) sigma_z coupled through lambda * A (x) B.
struct SpinModel {
    double omega = 1.0;
    Operator coupling_op;  // 2x2 Hermitian
    double lambda = 0.0;

    static SpinModel dephasing(double omega, double lambda);   // A = sigma_z
    static SpinModel unbiased(double omega, double lambda);    // A = sigma_x
    static SpinModel with_coupling(double omega, double lambda, Operator a);
};

// Iterated trapezoid rule over the ordered simplices of each time list.
struct QuadratureScheme {
    double step = 0.0;
};

constexpr int kMaxSeriesOrder = 4;

// e^{i H_S t} A e^{-i H_S t}
Operator interaction_picture_a(const SpinModel& model, double t);

// A(t_1) A(t_2) ... A(t_k) for a descending time list; empty list gives 1.
Operator a_product(const SpinModel& model, std::span<const double> times);

// X = (Tr{A(s_1..s_q)^dag} / d) * A(tau_1..tau_k), both lists descending.
Operator x_operator(const SpinModel& model, std::span<const double> left_times,
                    std::span<const double> right_times);

struct KOrderOptions {
    // Route sigma_z / sigma_x couplings through the generic matrix-product
    // path instead of their closed forms (cross-validation hook).
    bool force_generic = false;
};

// n-th order contribution to the effective Hamiltonian in the interaction
// picture,
//   K_n = i^{n+1}/2 sum_k (-1)^k int [ Dcal X - (-1)^n h.c. ],
// with one outermost time pinned at t per delta branch. Returned Hermitian
// and traceless; n = 0 gives the traceless part of H_S.
Operator k_order(const SpinModel& model, const BathSpec& bath, int n, double t,
                 const QuadratureScheme& quad, const KOrderOptions& opts = {});

// Second-order closed form for zero-mean Gaussian baths,
//   K_2 = int_0^t dtau [ S/(2i) [A(t),A(tau)]
//                        - chi/4 ({A(t),A(tau)} - <{A(t),A(tau)}>_{1/d}) ].
Operator k2_closed_form(const SpinModel& model, const BathSpec& bath, double t,
                        const QuadratureScheme& quad);

// Same order-n contribution assembled from the symmetry-resolved components
// (Re/Im of the cumulant against the Hermitian/anti-Hermitian parts of X).
Operator k_order_symmetry_resolved(const SpinModel& model, const BathSpec& bath, int n,
                                   double t, const QuadratureScheme& quad,
                                   const KOrderOptions& opts = {});

struct KSeriesMetadata {
    int max_order = 0;
    double quad_step = 0.0;
    double lambda = 0.0;
    std::string model;
    std::string bath;
};

// Per-order effective-Hamiltonian contributions on a time grid. The stored
// operators are rotated to the lab frame (K_n(t) -> e^{-iH_S t} K_n e^{iH_S t})
// so that partial sums compare directly against generators extracted from
// Schroedinger-picture dynamical maps.
struct KSeries {
    std::vector<double> times;
    std::map<int, std::vector<Operator>> orders;
    std::map<int, std::vector<Operator>> partial_sums;  // sum_{m<=n} lambda^m K_m
    KSeriesMetadata metadata;
};

KSeries k_series(const SpinModel& model, const BathSpec& bath, int max_order,
                 std::span<const double> times, const QuadratureScheme& quad);

// Re-weights the partial sums for a different coupling strength; the per-order
// coefficients do not depend on lambda.
KSeries with_lambda(const KSeries& series, double lambda);

struct ObservableRow {
    double t = 0.0;
    double omega_r = 0.0;         // Tr{K sigma_z}
    double kx = 0.0;              // Tr{K sigma_x}
    double ky = 0.0;              // Tr{K sigma_y}
    double rotation_angle = 0.0;  // Bloch polar angle atan2(|transverse|, omega_r)
};

// Observables of the highest partial sum of a qubit series.
std::vector<ObservableRow> report_observables(const KSeries& series);

}  // namespace effham

#endif
