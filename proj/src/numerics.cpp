#include "ialab/numerics.hpp"

#include <cmath>

namespace ialab {

namespace {

constexpr double kHermitianTol = 1e-10;

}  // namespace

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Complex z = a.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

void normalize_phase_by_peak(Eigen::Ref<ComplexVector> x) {
  Eigen::Index peak = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // strict comparison keeps the first index among exact ties
    const double mag = std::abs(x[i]);
    if (mag > best) {
      best = mag;
      peak = i;
    }
  }
  if (best <= 0.0) return;
  const Complex rot = std::conj(x[peak]) / best;
  x *= rot;
  x[peak] = Complex(best, 0.0);
}

ComplexMatrix orthonormalize_columns(const ComplexMatrix& a) {
  ComplexMatrix q = a;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const Complex proj = q.col(i).dot(q.col(j));  // conjugates the left operand
      q.col(j) -= proj * q.col(i);
    }
    const double n = q.col(j).norm();
    if (n == 0.0) throw ContractViolation("orthonormalize_columns: dependent columns");
    q.col(j) /= n;
  }
  return q;
}

EigResult hermitian_eig(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw ContractViolation("hermitian_eig: matrix must be square and non-empty");
  }
  if (!all_finite(a)) throw ContractViolation("hermitian_eig: non-finite entries");
  if (max_abs(a - a.adjoint()) > kHermitianTol) {
    throw ContractViolation("hermitian_eig: matrix is not Hermitian");
  }
  const ComplexMatrix sym = (a + a.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ContractViolation("hermitian_eig: eigensolver did not converge");
  }
  EigResult out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    normalize_phase_by_peak(out.vectors.col(j));
  }
  return out;
}

SvdResult svd(const ComplexMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw ContractViolation("svd: empty matrix");
  if (!all_finite(a)) throw ContractViolation("svd: non-finite entries");

  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeThinV);
  SvdResult out{solver.matrixU(), solver.singularValues(), solver.matrixV()};

  const Eigen::Index last = out.f.rows() - 1;
  for (Eigen::Index j = 0; j < out.f.cols(); ++j) {
    Eigen::Index pivot = last;
    if (out.f(last, j) == Complex(0.0, 0.0)) {
      // fall back to the peak entry when the last one vanishes
      out.f.col(j).cwiseAbs().maxCoeff(&pivot);
    }
    const Complex anchor = out.f(pivot, j);
    const double mag = std::abs(anchor);
    if (mag == 0.0) continue;
    // f_j -> f_j e^{-i t}, w_j -> w_j e^{-i t} leaves w diag(l) f^* unchanged
    const Complex rot = std::conj(anchor) / mag;
    out.f.col(j) *= rot;
    out.f(pivot, j) = Complex(mag, 0.0);
    out.w.col(j) *= rot;
  }
  return out;
}

GivensRotation givens_zero(double a, double b) {
  if (a == 0.0 && b == 0.0) return {1.0, 0.0, 0.0};
  const double r = std::hypot(a, b);
  return {a / r, b / r, r};
}

}  // namespace ialab
