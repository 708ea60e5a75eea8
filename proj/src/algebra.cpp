#include "effham/algebra.hpp"

#include <cmath>
#include <stdexcept>

#include "effham/rng.hpp"

namespace effham {

namespace {
const Complex I(0.0, 1.0);

void require_dim(int d) {
    if (d < kMinDim || d > kMaxDim)
        throw std::invalid_argument("unsupported dimension " + std::to_string(d) +
                                    " (supported range 2..8)");
}
}  // namespace

Operator identity_op(int d) { return Operator::Identity(d, d); }

Operator pauli_x() {
    Operator m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Operator pauli_y() {
    Operator m(2, 2);
    m << 0, -I, I, 0;
    return m;
}

Operator pauli_z() {
    Operator m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Operator sigma_plus() {
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 1;
    return m;
}

Operator sigma_minus() {
    Operator m = Operator::Zero(2, 2);
    m(1, 0) = 1;
    return m;
}

Eigen::VectorXcd vec(const Operator& x) {
    // Eigen is column-major, so this reshape is exactly column stacking.
    return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

Operator unvec(const Eigen::VectorXcd& v, int d) {
    if (v.size() != static_cast<long>(d) * d)
        throw std::invalid_argument("unvec: size mismatch");
    return Eigen::Map<const Operator>(v.data(), d, d);
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

OperatorBasis make_basis(int d, BasisKind kind) {
    require_dim(d);
    OperatorBasis basis;
    basis.dim = d;
    basis.kind = kind;
    basis.elements.reserve(static_cast<std::size_t>(d) * d);

    if (kind == BasisKind::ElementaryUnits) {
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                Operator e = Operator::Zero(d, d);
                e(j, k) = 1.0;
                basis.elements.push_back(std::move(e));
            }
        return basis;
    }

    basis.elements.push_back(Operator::Identity(d, d) / std::sqrt(static_cast<double>(d)));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            Operator sym = Operator::Zero(d, d);
            sym(j, k) = inv_sqrt2;
            sym(k, j) = inv_sqrt2;
            basis.elements.push_back(std::move(sym));
            Operator asym = Operator::Zero(d, d);
            asym(j, k) = -I * inv_sqrt2;
            asym(k, j) = I * inv_sqrt2;
            basis.elements.push_back(std::move(asym));
        }
    for (int l = 1; l < d; ++l) {
        Operator diag = Operator::Zero(d, d);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int m = 0; m < l; ++m) diag(m, m) = norm;
        diag(l, l) = -static_cast<double>(l) * norm;
        basis.elements.push_back(std::move(diag));
    }
    return basis;
}

Operator SuperOperator::apply(const Operator& x) const {
    if (x.rows() != dim || x.cols() != dim)
        throw std::invalid_argument("SuperOperator::apply: dimension mismatch");
    return unvec(matrix * vec(x), dim);
}

SuperOperator& SuperOperator::operator+=(const SuperOperator& o) {
    if (dim != o.dim) throw std::invalid_argument("SuperOperator: dimension mismatch");
    matrix += o.matrix;
    return *this;
}

SuperOperator& SuperOperator::operator-=(const SuperOperator& o) {
    if (dim != o.dim) throw std::invalid_argument("SuperOperator: dimension mismatch");
    matrix -= o.matrix;
    return *this;
}

SuperOperator& SuperOperator::operator*=(Complex c) {
    matrix *= c;
    return *this;
}

SuperOperator superop_from_sandwich(const std::vector<SandwichTerm>& terms) {
    if (terms.empty()) throw std::invalid_argument("superop_from_sandwich: no terms");
    const int d = static_cast<int>(terms.front().left.rows());
    SuperOperator out = SuperOperator::zero(d);
    for (const auto& t : terms) {
        if (t.left.rows() != d || t.left.cols() != d || t.right.rows() != d ||
            t.right.cols() != d)
            throw std::invalid_argument("superop_from_sandwich: dimension mismatch");
        out.matrix += t.weight * kron(t.right.transpose(), t.left);
    }
    return out;
}

SuperOperator commutator_generator(const Operator& h) {
    const int d = static_cast<int>(h.rows());
    return superop_from_sandwich({{-I, h, identity_op(d)}, {I, identity_op(d), h}});
}

SuperOperator jump_dissipator(const std::vector<Jump>& jumps) {
    if (jumps.empty()) throw std::invalid_argument("jump_dissipator: no jumps");
    const int d = static_cast<int>(jumps.front().op.rows());
    const Operator id = identity_op(d);
    SuperOperator out = SuperOperator::zero(d);
    for (const auto& j : jumps) {
        const Operator ldl = j.op.adjoint() * j.op;
        out += superop_from_sandwich({{j.rate, j.op, j.op.adjoint()},
                                      {-0.5 * j.rate, ldl, id},
                                      {-0.5 * j.rate, id, ldl}});
    }
    return out;
}

SuperOperator lindblad_generator(const Operator& h, const std::vector<Jump>& jumps) {
    if (!is_hermitian(h))
        throw std::invalid_argument("lindblad_generator: h is not Hermitian");
    SuperOperator out = commutator_generator(h);
    if (!jumps.empty()) out += jump_dissipator(jumps);
    return out;
}

HtpReport check_htp(const SuperOperator& l) {
    const int d = l.dim;
    constexpr std::uint64_t kSeed = 0x8f3c1e24u;
    HtpReport report;
    std::uint64_t ctr = 0;
    for (int probe = 0; probe < 20; ++probe) {
        Operator x(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) x(i, j) = rng::gaussian(kSeed, ctr++);
        Operator xh = hermitian_part(x);
        xh /= xh.norm();
        const Operator lx = l.apply(xh);
        report.hermiticity_residual =
            std::max(report.hermiticity_residual, (lx - lx.adjoint()).norm());

        x /= x.norm();
        report.trace_residual = std::max(report.trace_residual, std::abs(l.apply(x).trace()));
    }
    report.hermiticity_preserving = report.hermiticity_residual <= kRandomTol;
    report.trace_annihilating = report.trace_residual <= kRandomTol;
    return report;
}

std::pair<double, double> htp_basis_residuals(const SuperOperator& l) {
    const int d = l.dim;
    double herm = 0.0, trace = 0.0;
    std::vector<Operator> images(static_cast<std::size_t>(d) * d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            Operator e = Operator::Zero(d, d);
            e(j, k) = 1.0;
            images[static_cast<std::size_t>(j) * d + k] = l.apply(e);
        }
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            const Operator& ljk = images[static_cast<std::size_t>(j) * d + k];
            const Operator& lkj = images[static_cast<std::size_t>(k) * d + j];
            herm = std::max(herm, (ljk.adjoint() - lkj).norm());
            trace = std::max(trace, std::abs(ljk.trace()));
        }
    return {herm, trace};
}

}  // namespace effham
