#pragma once

// Dense complex linear algebra kernel. Every operator, vector and power in the
// library is carried as an Eigen::MatrixXcd; the functions here add the shape
// checks, singularity detection and norm conventions the rest of the code
// relies on. The operator norm is the spectral (2-)norm throughout.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "hk/error.hpp"

namespace hk {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

inline bool all_finite(const CMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

inline void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(Errc::ShapeMismatch, std::string(what) + " must be a nonempty square matrix, got " +
                                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows())
    throw Error(Errc::ShapeMismatch, "matmul: " + std::to_string(a.rows()) + "x" +
                                         std::to_string(a.cols()) + " times " +
                                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  CMatrix c = a * b;
  return c;
}

/// LU factorization with a working-precision singularity test. Factor once,
/// apply to many right-hand sides (resolvent quadrature needs one factor per node).
class LuFactor {
 public:
  explicit LuFactor(const CMatrix& a) {
    require_square(a, "LuFactor");
    if (!all_finite(a)) throw Error(Errc::SingularMatrix, "matrix has non-finite entries");
    lu_.compute(a);
    const double rc = lu_.rcond();
    if (!(rc > static_cast<double>(a.rows()) * kEps))
      throw Error(Errc::SingularMatrix, "reciprocal condition estimate " + std::to_string(rc));
  }

  CMatrix solve(const CMatrix& rhs) const {
    if (rhs.rows() != lu_.rows())
      throw Error(Errc::ShapeMismatch, "solve: right-hand side has wrong row count");
    CMatrix x = lu_.solve(rhs);
    if (!all_finite(x)) throw Error(Errc::SingularMatrix, "solution is not finite");
    return x;
  }

  CMatrix inverse() const { return solve(identity(lu_.rows())); }

  double rcond() const { return lu_.rcond(); }

 private:
  Eigen::PartialPivLU<CMatrix> lu_;
};

inline CMatrix solve(const CMatrix& a, const CMatrix& rhs) { return LuFactor(a).solve(rhs); }

inline CMatrix inverse(const CMatrix& a) { return LuFactor(a).inverse(); }

inline Eigen::VectorXd singular_values(const CMatrix& a) {
  if (a.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues();
}

inline double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

/// Two-norm condition number; +inf for numerically singular input.
inline double condition_number(const CMatrix& a) {
  const Eigen::VectorXd sv = singular_values(a);
  if (sv.size() == 0) return 1.0;
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

inline bool is_hermitian(const CMatrix& a, double rel_tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= rel_tol * std::max(1.0, a.norm());
}

inline bool is_hermitian_positive_definite(const CMatrix& a, double rel_tol = 1e-12) {
  if (!is_hermitian(a, rel_tol)) return false;
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > rel_tol * std::max(1.0, es.eigenvalues().maxCoeff());
}

struct EigDecomposition {
  CVector eigenvalues;
  CMatrix vectors;    // unit-norm columns
  double condition;   // cond2 of `vectors`
  double residual;    // ||A V - V diag(lambda)||_F / max(||A||_F, tiny)
};

inline constexpr double kDefaultCondMax = 1e12;

/// Eigendecomposition for the oracle path. Rejects near-defective input.
inline EigDecomposition eig(const CMatrix& a, double cond_max = kDefaultCondMax) {
  require_square(a, "eig");
  if (!all_finite(a)) throw Error(Errc::InvalidArgument, "eig: non-finite entries");
  Eigen::ComplexEigenSolver<CMatrix> es(a, true);
  if (es.info() != Eigen::Success) throw Error(Errc::NonDiagonalizable, "eigensolver did not converge");

  EigDecomposition out;
  out.eigenvalues = es.eigenvalues();
  out.vectors = es.eigenvectors();
  if (!all_finite(out.vectors) || !all_finite(out.eigenvalues))
    throw Error(Errc::NonDiagonalizable, "eigenvectors are not finite");
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    const double nrm = out.vectors.col(j).norm();
    if (nrm > 0) out.vectors.col(j) /= nrm;
  }
  out.condition = condition_number(out.vectors);
  if (!(out.condition <= cond_max))
    throw Error(Errc::NonDiagonalizable,
                "eigenvector condition " + std::to_string(out.condition) + " exceeds limit");
  const CMatrix r = a * out.vectors - out.vectors * out.eigenvalues.asDiagonal();
  out.residual = r.norm() / std::max(a.norm(), std::numeric_limits<double>::min());
  return out;
}

}  // namespace hk
