#ifndef EFFHAM_ALGEBRA_HPP
#define EFFHAM_ALGEBRA_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace effham {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

constexpr int kMinDim = 2;
constexpr int kMaxDim = 8;

// Structural tolerances: exact inputs vs randomly generated ones.
constexpr double kStructTol = 1e-12;
constexpr double kRandomTol = 1e-10;

Operator identity_op(int d);
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator sigma_plus();
Operator sigma_minus();

inline Complex hs_inner(const Operator& a, const Operator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("hs_inner: dimension mismatch");
    return (a.adjoint() * b).trace();
}

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }
inline Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

inline bool is_hermitian(const Operator& m, double tol = kStructTol) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}
inline bool is_traceless(const Operator& m, double tol = kStructTol) {
    return std::abs(m.trace()) <= tol;
}

// Drops the trace part; the identity component of an effective Hamiltonian is
// unobservable and all reported generators use traceless operators.
inline Operator traceless_part(const Operator& m) {
    const int d = static_cast<int>(m.rows());
    return m - (m.trace() / static_cast<double>(d)) * Operator::Identity(d, d);
}

inline Operator hermitian_part(const Operator& m) { return 0.5 * (m + m.adjoint()); }

// Column-stacking vectorization, fixed globally: vec(X)[i + d*j] = X(i,j),
// so the map X -> A X B has matrix transpose(B) (x) A.
Eigen::VectorXcd vec(const Operator& x);
Operator unvec(const Eigen::VectorXcd& v, int d);
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

enum class BasisKind { ElementaryUnits, GeneralizedGellMann };

struct OperatorBasis {
    int dim = 0;
    BasisKind kind = BasisKind::ElementaryUnits;
    std::vector<Operator> elements;  // d^2 entries, Hilbert-Schmidt orthonormal
};

// ElementaryUnits: |j><k| in row-major (j,k) order.
// GeneralizedGellMann: 1/sqrt(d), then the symmetric/antisymmetric pairs, then
// the diagonal elements; for d = 2 this is {1, sx, sy, sz}/sqrt(2).
OperatorBasis make_basis(int d, BasisKind kind);

struct SuperOperator {
    int dim = 0;                // Hilbert space dimension d
    Eigen::MatrixXcd matrix;    // d^2 x d^2, column-stacking convention

    SuperOperator() = default;
    SuperOperator(int d, Eigen::MatrixXcd m) : dim(d), matrix(std::move(m)) {}

    static SuperOperator zero(int d) {
        return {d, Eigen::MatrixXcd::Zero(static_cast<long>(d) * d, static_cast<long>(d) * d)};
    }
    static SuperOperator identity(int d) {
        return {d, Eigen::MatrixXcd::Identity(static_cast<long>(d) * d, static_cast<long>(d) * d)};
    }

    Operator apply(const Operator& x) const;

    SuperOperator& operator+=(const SuperOperator& o);
    SuperOperator& operator-=(const SuperOperator& o);
    SuperOperator& operator*=(Complex c);
    friend SuperOperator operator+(SuperOperator a, const SuperOperator& b) { return a += b; }
    friend SuperOperator operator-(SuperOperator a, const SuperOperator& b) { return a -= b; }
    friend SuperOperator operator*(Complex c, SuperOperator a) { return a *= c; }
};

struct SandwichTerm {
    Complex weight;
    Operator left;
    Operator right;
};

// L[X] = sum_i w_i * left_i * X * right_i
SuperOperator superop_from_sandwich(const std::vector<SandwichTerm>& terms);

// -i[h, .]
SuperOperator commutator_generator(const Operator& h);

struct Jump {
    double rate = 0.0;
    Operator op;
};

// gamma (L X Ldag - 1/2 {Ldag L, X}); rates may be negative.
SuperOperator jump_dissipator(const std::vector<Jump>& jumps);

// -i[h, .] + sum_i gamma_i (L_i X L_i^dag - 1/2 {L_i^dag L_i, X})
SuperOperator lindblad_generator(const Operator& h, const std::vector<Jump>& jumps);

struct HtpReport {
    bool hermiticity_preserving = false;
    bool trace_annihilating = false;
    double hermiticity_residual = 0.0;  // max over probes of ||L[X] - L[X]^dag||_F
    double trace_residual = 0.0;        // max over probes of |Tr L[X]|
};

// Spot check on 20 seeded random unit-norm probes (Hermitian probes for the
// hermiticity-preservation part), thresholds at 1e-10.
HtpReport check_htp(const SuperOperator& l);

// Deterministic residuals over the complete elementary-unit basis:
// hermiticity preservation is max ||L[E_jk]^dag - L[E_kj]||_F, trace
// annihilation is max |Tr L[E_jk]|. Zero exactly iff L is HTP.
std::pair<double, double> htp_basis_residuals(const SuperOperator& l);

class NotHtpError : public std::invalid_argument {
  public:
    NotHtpError(double herm_res, double trace_res)
        : std::invalid_argument("generator is not Hermiticity-preserving/trace-annihilating"
                                " (residuals " + std::to_string(herm_res) + ", " +
                                std::to_string(trace_res) + ")"),
          hermiticity_residual(herm_res), trace_residual(trace_res) {}
    double hermiticity_residual;
    double trace_residual;
};

}  // namespace effham

#endif
