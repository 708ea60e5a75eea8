#include "effham/splitting.hpp"

#include <cmath>
#include <stdexcept>

#include "effham/rng.hpp"

namespace effham {

namespace {
const Complex I(0.0, 1.0);

Operator finalize(Operator k) {
    // The projection lands in the Hermitian traceless sector up to roundoff.
    return traceless_part(hermitian_part(std::move(k)));
}
}  // namespace

void require_htp(const SuperOperator& l, double tol) {
    if (l.dim < kMinDim || l.dim > kMaxDim)
        throw std::invalid_argument("generator dimension outside the supported range 2..8");
    const auto [herm, trace] = htp_basis_residuals(l);
    const double scale = std::max(1.0, l.matrix.norm());
    if (herm > tol * scale || trace > tol * scale) throw NotHtpError(herm, trace);
}

Operator effective_hamiltonian(const SuperOperator& l) {
    require_htp(l);
    const int d = l.dim;
    Operator k = Operator::Zero(d, d);
    Operator e = Operator::Zero(d, d);
    for (int j = 0; j < d; ++j)
        for (int m = 0; m < d; ++m) {
            e(m, j) = 1.0;  // |m><j| = (|j><m|)^dag
            const Operator image = l.apply(e);
            e(m, j) = 0.0;
            // [ |j><m|, L[|m><j|] ] accumulated row/column-wise
            Operator ejm = Operator::Zero(d, d);
            ejm(j, m) = 1.0;
            k += ejm * image - image * ejm;
        }
    k /= Complex(0.0, 2.0 * d);
    return finalize(std::move(k));
}

Operator effective_hamiltonian_su(const SuperOperator& l) {
    require_htp(l);
    const int d = l.dim;
    const OperatorBasis basis = make_basis(d, BasisKind::GeneralizedGellMann);
    Operator k = Operator::Zero(d, d);
    for (std::size_t j = 1; j < basis.elements.size(); ++j) {
        const Operator& f = basis.elements[j];
        k += commutator(f, l.apply(f));
    }
    k /= Complex(0.0, 2.0 * d);
    return finalize(std::move(k));
}

Operator effective_hamiltonian_pseudokraus(const std::vector<SandwichTerm>& terms) {
    if (terms.empty()) throw std::invalid_argument("pseudokraus: no terms");
    const int d = static_cast<int>(terms.front().left.rows());
    Operator k = Operator::Zero(d, d);
    for (const auto& t : terms) {
        if (t.left.rows() != d || t.right.rows() != d)
            throw std::invalid_argument("pseudokraus: dimension mismatch");
        k += t.weight * (t.left.trace() * t.right - t.right.trace() * t.left);
    }
    k /= Complex(0.0, 2.0 * d);
    return finalize(std::move(k));
}

GeneratorSplit split(const SuperOperator& l) {
    require_htp(l);
    const int d = l.dim;
    const long dd = static_cast<long>(d) * d;
    GeneratorSplit out;
    out.k = effective_hamiltonian(l);
    out.dissipator = l - commutator_generator(out.k);

    // First standard form: expand L[X] = sum c_ab F_a X F_b over the
    // Gell-Mann basis; the traceless block of c is the Kossakowski matrix.
    const OperatorBasis basis = make_basis(d, BasisKind::GeneralizedGellMann);
    Eigen::MatrixXcd a(dd - 1, dd - 1);
    for (long j = 1; j < dd; ++j)
        for (long k2 = 1; k2 < dd; ++k2) {
            const Eigen::MatrixXcd s =
                kron(basis.elements[k2].transpose(), basis.elements[j]);
            a(j - 1, k2 - 1) = (s.adjoint() * l.matrix).trace();
        }
    out.kossakowski = 0.5 * (a + a.adjoint());

    const double scale = out.kossakowski.norm();
    if (scale > 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.kossakowski);
        for (long m = 0; m < dd - 1; ++m) {
            const double rate = es.eigenvalues()(m);
            if (std::abs(rate) < 1e-12 * scale) continue;  // nullspace noise
            Operator op = Operator::Zero(d, d);
            for (long j = 1; j < dd; ++j)
                op += es.eigenvectors()(j - 1, m) * basis.elements[j];
            out.jumps.push_back({rate, std::move(op)});
        }
    }
    return out;
}

SuperOperator reconstruct(const GeneratorSplit& s) {
    SuperOperator l = commutator_generator(s.k);
    if (!s.jumps.empty()) l += jump_dissipator(s.jumps);
    return l;
}

HaarMcEstimate haar_mc_effective_hamiltonian(const SuperOperator& l, long samples,
                                             std::uint64_t seed) {
    if (samples < 1000)
        throw std::invalid_argument("haar_mc_effective_hamiltonian: samples must be >= 1000");
    const int d = l.dim;
    Operator sum = Operator::Zero(d, d);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXcd phi(d);
    for (long i = 0; i < samples; ++i) {
        for (int c = 0; c < d; ++c)
            phi(c) = rng::gaussian(seed, static_cast<std::uint64_t>(i) * d + c);
        phi.normalize();
        const Operator p = phi * phi.adjoint();
        const Operator m = p * l.apply(p);
        const Operator v = (d + 1) * (m - m.adjoint()) / (2.0 * I);
        sum += v;
        sum_sq += v.cwiseAbs2();
    }
    HaarMcEstimate est;
    est.samples = samples;
    const Operator mean = sum / static_cast<double>(samples);
    const Eigen::MatrixXd var =
        (sum_sq / static_cast<double>(samples) - mean.cwiseAbs2()).cwiseMax(0.0);
    est.std_error = std::sqrt(var.sum() / static_cast<double>(samples));
    est.estimate = traceless_part(mean);
    return est;
}

std::vector<double> fidelity_weights(const SuperOperator& l) {
    const int d = l.dim;
    const long dd = static_cast<long>(d) * d;
    const OperatorBasis basis = make_basis(d, BasisKind::GeneralizedGellMann);

    std::vector<Operator> images(static_cast<std::size_t>(dd));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            Operator e = Operator::Zero(d, d);
            e(a, b) = 1.0;
            images[static_cast<std::size_t>(a) * d + b] = l.apply(e);
        }

    // F(H_j, L) from the symmetric-subspace Haar average; the H_j[1] L[1]
    // term vanishes identically for commutator generators.
    std::vector<double> weights(static_cast<std::size_t>(dd - 1));
    for (long j = 1; j < dd; ++j) {
        const Operator& h = basis.elements[j];
        Complex acc = 0.0;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                Operator e = Operator::Zero(d, d);
                e(a, b) = 1.0;
                const Operator hj_e = -I * commutator(h, e);
                acc += (hj_e * images[static_cast<std::size_t>(b) * d + a]).trace();
            }
        weights[static_cast<std::size_t>(j - 1)] = (acc / (static_cast<double>(d) * (d + 1))).real();
    }
    return weights;
}

Operator k_from_fidelity_weights(const std::vector<double>& weights, int d) {
    const OperatorBasis basis = make_basis(d, BasisKind::GeneralizedGellMann);
    if (weights.size() != basis.elements.size() - 1)
        throw std::invalid_argument("k_from_fidelity_weights: wrong weight count");
    Operator k = Operator::Zero(d, d);
    for (std::size_t j = 0; j < weights.size(); ++j)
        k += weights[j] * basis.elements[j + 1];
    return 0.5 * (d + 1) * k;
}

}  // namespace effham
