#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ctid/polynomial.hpp"

namespace ctid {

// Covariance-weighted projection onto the fixed-relative-degree subspace.
//
// Parameter vectors follow the [numerator high->low, denominator high->low]
// layout, so relative degree r means the first r-1 entries vanish. All
// factorizations run on Jacobi-scaled copies; the projection and the
// covariance relations are equivariant under positive diagonal scaling.

template <typename Derived>
Matrix<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& M) {
  return (M + M.transpose()) / typename Derived::Scalar(2);
}

/// T = [0_{(p-m) x m}  I_{p-m}] for m = r - 1 constrained coordinates.
template <typename Scalar = double>
Matrix<Scalar> selection_matrix(Eigen::Index p, int r) {
  require(r >= 1 && r - 1 < p, Errc::InvalidArgument, "relative degree out of range");
  const Eigen::Index m = r - 1;
  Matrix<Scalar> T = Matrix<Scalar>::Zero(p - m, p);
  T.rightCols(p - m).setIdentity();
  return T;
}

namespace detail {

/// X^{-1} for symmetric positive definite X through D^{-1} chol(S)^{-1} D^{-1},
/// S = D^{-1} X D^{-1} with D = sqrt(diag X).
template <typename Scalar>
bool scaled_spd_inverse(const Matrix<Scalar>& X, Matrix<Scalar>& inverse) {
  const Eigen::Index p = X.rows();
  if (!(X.diagonal().array() > Scalar(0)).all()) return false;
  const Vector<Scalar> dinv = X.diagonal().cwiseSqrt().cwiseInverse();
  const Matrix<Scalar> S = dinv.asDiagonal() * X * dinv.asDiagonal();
  Eigen::LLT<Matrix<Scalar>> llt(S);
  if (llt.info() != Eigen::Success) return false;
  const Matrix<Scalar> Sinv = llt.solve(Matrix<Scalar>::Identity(p, p));
  inverse = symmetrized(Matrix<Scalar>(dinv.asDiagonal() * Sinv * dinv.asDiagonal()));
  return inverse.allFinite();
}

}  // namespace detail

/// Sigma_c^{-1} = J^T Sigma_d^{-1} J, with Sigma_d inverted through its
/// Cholesky factor. A diagonal jitter of 1e-12 trace/p (on the scaled
/// matrix) is tried once before reporting SingularCovariance.
template <typename DerivedJ, typename DerivedS>
Matrix<typename DerivedJ::Scalar> ct_info_matrix(const Eigen::MatrixBase<DerivedJ>& J,
                                                 const Eigen::MatrixBase<DerivedS>& cov_d) {
  using Scalar = typename DerivedJ::Scalar;
  const Eigen::Index p = cov_d.rows();
  require(cov_d.cols() == p && J.rows() == p, Errc::InvalidArgument,
          "dimension mismatch between Jacobian and covariance");
  require(J.allFinite(), Errc::DegenerateMap, "Jacobian has non-finite entries");
  const Matrix<Scalar> S0 = symmetrized(cov_d);
  require((S0.diagonal().array() > Scalar(0)).all(), Errc::SingularCovariance,
          "covariance diagonal must be positive");
  const Vector<Scalar> dinv = S0.diagonal().cwiseSqrt().cwiseInverse();
  Matrix<Scalar> S = dinv.asDiagonal() * S0 * dinv.asDiagonal();
  Eigen::LLT<Matrix<Scalar>> llt(S);
  if (llt.info() != Eigen::Success) {
    S.diagonal().array() += Scalar(1e-12) * S.trace() / static_cast<Scalar>(p);
    llt.compute(S);
    require(llt.info() == Eigen::Success, Errc::SingularCovariance,
            "covariance Cholesky failed after jitter");
  }
  const Matrix<Scalar> X = llt.matrixL().solve(Matrix<Scalar>(dinv.asDiagonal() * J));
  return symmetrized(Matrix<Scalar>(X.transpose() * X));
}

template <typename Scalar = double>
struct ProjectionProblem {
  Vector<Scalar> theta_hat_c;
  Matrix<Scalar> info_c;  // Sigma^{-1}
  int r = 1;
  /// Allowed relative disagreement between the Cholesky and Lagrange routes.
  Scalar path_tolerance = Scalar(1e-10);

  Matrix<Scalar> T() const { return selection_matrix<Scalar>(theta_hat_c.size(), r); }
};

template <typename Scalar = double>
struct Projection {
  Vector<Scalar> theta_tilde_c;
  Vector<Scalar> lambda;
  Matrix<Scalar> cov_c;  // Sigma = info_c^{-1}
  Scalar path_discrepancy = Scalar(0);
};

/// theta_tilde = C blockdiag(0_{r-1}, I) C^{-1} theta_hat with Sigma = C C^T,
/// cross-checked against theta_hat - Sigma [I;0] Sigma_11^{-1} [I 0] theta_hat.
template <typename Scalar>
Projection<Scalar> project_rd(const ProjectionProblem<Scalar>& problem) {
  const Eigen::Index p = problem.theta_hat_c.size();
  const int r = problem.r;
  require(problem.info_c.rows() == p && problem.info_c.cols() == p, Errc::InvalidArgument,
          "information matrix dimension mismatch");
  require(r >= 1 && r - 1 < p, Errc::InvalidArgument,
          "relative degree out of range");
  const Eigen::Index m = r - 1;
  const Vector<Scalar>& theta_hat = problem.theta_hat_c;

  Projection<Scalar> out;
  require(detail::scaled_spd_inverse(symmetrized(problem.info_c), out.cov_c),
          Errc::NotPositiveDefinite, "information matrix is not positive definite");
  const Matrix<Scalar>& sigma = out.cov_c;
  if (m == 0) {
    out.theta_tilde_c = theta_hat;
    out.lambda = Vector<Scalar>(0);
    return out;
  }

  // Cholesky route in coordinates where Sigma has unit diagonal.
  const Vector<Scalar> e = sigma.diagonal().cwiseSqrt().cwiseInverse();
  const Matrix<Scalar> sigma_s = e.asDiagonal() * sigma * e.asDiagonal();
  Eigen::LLT<Matrix<Scalar>> llt(sigma_s);
  require(llt.info() == Eigen::Success, Errc::NotPositiveDefinite,
          "covariance Cholesky factorization failed");
  const auto C = llt.matrixL();
  Vector<Scalar> w = C.solve(Vector<Scalar>(e.asDiagonal() * theta_hat));
  w.head(m).setZero();
  Vector<Scalar> theta_tilde = e.cwiseInverse().asDiagonal() * (C * w);

  // Lagrange route on partitions of Sigma.
  out.lambda = sigma.topLeftCorner(m, m).llt().solve(theta_hat.head(m));
  const Vector<Scalar> theta_lagrange = theta_hat - sigma.leftCols(m) * out.lambda;

  // Compared in the unit-diagonal coordinates of Sigma.
  const Scalar scale = std::max({Vector<Scalar>(e.asDiagonal() * theta_hat).norm(),
                                 Vector<Scalar>(e.asDiagonal() * theta_tilde).norm(),
                                 std::numeric_limits<Scalar>::min()});
  out.path_discrepancy =
      Vector<Scalar>(e.asDiagonal() * (theta_tilde - theta_lagrange)).norm() / scale;
  require(out.path_discrepancy <= problem.path_tolerance, Errc::PathMismatch,
          "Cholesky and Lagrange projections disagree");

  theta_tilde.head(m).setZero();
  out.theta_tilde_c = theta_tilde;
  return out;
}

/// Asymptotic covariance of the projected estimate:
/// (T Sigma^{-1} T^T)^{-1} embedded with zero rows/columns for the
/// constrained coordinates.
template <typename Derived>
Matrix<typename Derived::Scalar> projected_covariance(const Eigen::MatrixBase<Derived>& cov_c,
                                                      int r) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index p = cov_c.rows();
  require(cov_c.cols() == p, Errc::InvalidArgument, "covariance must be square");
  require(r >= 1 && r - 1 < p, Errc::InvalidArgument, "relative degree out of range");
  const Matrix<Scalar> sigma = symmetrized(cov_c);
  if (r == 1) return sigma;
  const Eigen::Index m = r - 1;
  Matrix<Scalar> info;
  require(detail::scaled_spd_inverse(sigma, info), Errc::SingularCovariance,
          "covariance is not positive definite");
  const Matrix<Scalar> T = selection_matrix<Scalar>(p, r);
  const Matrix<Scalar> reduced_info = T * info * T.transpose();
  Matrix<Scalar> reduced;
  require(detail::scaled_spd_inverse(reduced_info, reduced), Errc::SingularCovariance,
          "reduced information matrix is not positive definite");
  Matrix<Scalar> out = Matrix<Scalar>::Zero(p, p);
  out.bottomRightCorner(p - m, p - m) = reduced;
  return out;
}

}  // namespace ctid
