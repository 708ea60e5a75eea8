#ifndef EFFHAM_SPLITTING_HPP
#define EFFHAM_SPLITTING_HPP

#include <cstdint>
#include <vector>

#include "effham/algebra.hpp"

namespace effham {

// Canonical minimal-dissipation decomposition of an HTP generator:
// L = -i[k, .] + dissipator, with the dissipator written in first standard
// form over the traceless Gell-Mann sub-basis. Jump rates are Kossakowski
// eigenvalues and may be negative.
struct GeneratorSplit {
    Operator k;                    // Hermitian, traceless
    SuperOperator dissipator;      // L + i[k, .]
    Eigen::MatrixXcd kossakowski;  // (d^2-1) x (d^2-1), Hermitian
    std::vector<Jump> jumps;       // traceless, mutually HS-orthogonal ops
};

// Throws NotHtpError when the deterministic basis residuals exceed
// tol * max(1, ||L||_F). The default leaves room for generators extracted
// from finite differences.
void require_htp(const SuperOperator& l, double tol = 1e-7);

// K = 1/(2id) sum_jk [|j><k|, L[|k><j|]], reported Hermitian and traceless.
Operator effective_hamiltonian(const SuperOperator& l);

// Same projection evaluated over the traceless Gell-Mann elements only; the
// identity element drops out, so both routes agree to machine precision.
Operator effective_hamiltonian_su(const SuperOperator& l);

// K = 1/(2id) sum_ij w_ij (Tr(V_i) W_j - Tr(W_j) V_i) for
// L[X] = sum_ij w_ij V_i X W_j, evaluated without building the superoperator.
Operator effective_hamiltonian_pseudokraus(const std::vector<SandwichTerm>& terms);

GeneratorSplit split(const SuperOperator& l);

// -i[k, .] + dissipator rebuilt from the jump list.
SuperOperator reconstruct(const GeneratorSplit& s);

struct HaarMcEstimate {
    Operator estimate;   // Hermitian, traceless
    double std_error = 0.0;  // sqrt(sum of per-entry variances of the mean)
    long samples = 0;
};

// Monte-Carlo evaluation of K = (d+1) Im( avg |phi><phi| L[|phi><phi|] ) over
// Haar states drawn as normalized standard complex Gaussian vectors. Streams
// are counter-based: fixed (seed, samples) gives bit-identical results no
// matter how the sample loop is partitioned.
HaarMcEstimate haar_mc_effective_hamiltonian(const SuperOperator& l, long samples,
                                             std::uint64_t seed);

// Average generator fidelities F(H_j, L) against the traceless Gell-Mann
// basis; K = (d+1)/2 sum_j w_j H_j reconstructs the effective Hamiltonian.
std::vector<double> fidelity_weights(const SuperOperator& l);

Operator k_from_fidelity_weights(const std::vector<double>& weights, int d);

}  // namespace effham

#endif
