#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ialab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when a caller violates an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

struct EigResult {
  RealVector values;          // ascending
  ComplexMatrix vectors;      // column i pairs with values[i]
};

/// Thin SVD with a = w * diag(lambda) * f^*.
///
/// w is rows x rows, lambda has min(rows, cols) entries in descending order
/// and f is cols x min(rows, cols). Each column of f has its last entry real
/// and nonnegative; w absorbs the compensating phase.
struct SvdResult {
  ComplexMatrix w;
  RealVector lambda;
  ComplexMatrix f;
};

struct GivensRotation {
  double c;
  double s;
  double r;
};

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending. Every eigenvector is rotated so that its
/// largest-magnitude component (first one on ties) is real and positive.
/// Throws ContractViolation for non-square or non-Hermitian input
/// (tolerance 1e-10 in max norm).
EigResult hermitian_eig(const ComplexMatrix& a);

SvdResult svd(const ComplexMatrix& a);

/// Real rotation (c, s) with c*a + s*b = r >= 0 and -s*a + c*b = 0.
GivensRotation givens_zero(double a, double b);

// Small helpers shared across modules.
bool all_finite(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);
ComplexMatrix identity(Eigen::Index n);

/// Modified Gram-Schmidt on the columns of a; columns must be independent.
ComplexMatrix orthonormalize_columns(const ComplexMatrix& a);

/// Rotate x so that its largest-magnitude entry (first on ties) is real >= 0.
void normalize_phase_by_peak(Eigen::Ref<ComplexVector> x);

}  // namespace ialab
