#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "ctid/models.hpp"

namespace ctid {

/// Controllable canonical realization in the ascending-state convention
/// (x_{k+1} = d/dt x_k): the last row of A holds [-a_0 ... -a_{n-1}],
/// B = e_n and C = [b_0 ... b_{n-1}].
template <typename Scalar>
StateSpace<Scalar> companion_realization(const RationalModel<Scalar>& model) {
  const Eigen::Index n = model.order();
  StateSpace<Scalar> ss;
  ss.A = Matrix<Scalar>::Zero(n, n);
  if (n > 1) ss.A.diagonal(1).setOnes();
  ss.A.row(n - 1) = -model.denominator_tail().reverse().transpose();
  ss.B = Vector<Scalar>::Zero(n);
  ss.B(n - 1) = Scalar(1);
  ss.C = model.numerator().reverse().transpose();
  ss.D = Scalar(0);
  return ss;
}

template <typename Scalar>
StateSpace<Scalar> ct_to_ss(const CtModel<Scalar>& model) {
  StateSpace<Scalar> ss = companion_realization(model);
  ss.domain = Domain::Continuous;
  return ss;
}

template <typename Scalar>
StateSpace<Scalar> dt_to_ss(const DtModel<Scalar>& model) {
  StateSpace<Scalar> ss = companion_realization(model);
  ss.domain = Domain::Discrete;
  ss.h = model.h();
  return ss;
}

/// Zero-initial-state response of H(z) to the input sequence.
///
/// y(k) = sum_j num_j u(k-1-j) - sum_j den_j y(k-1-j), j = 0..n-1, where
/// num/den are the high-to-low coefficient vectors of the model.
template <typename Scalar, typename Derived>
Vector<Scalar> simulate_dt(const DtModel<Scalar>& model,
                           const Eigen::MatrixBase<Derived>& u) {
  const Eigen::Index n = model.order();
  const Eigen::Index len = u.size();
  const auto& b = model.numerator();
  const auto& a = model.denominator_tail();
  Vector<Scalar> y = Vector<Scalar>::Zero(len);
  for (Eigen::Index k = 1; k < len; ++k) {
    Scalar acc = Scalar(0);
    const Eigen::Index span = std::min(n, k);
    for (Eigen::Index j = 0; j < span; ++j) {
      acc += b(j) * u(k - 1 - j) - a(j) * y(k - 1 - j);
    }
    y(k) = acc;
  }
  return y;
}

template <typename Scalar>
bool is_stable(const CtModel<Scalar>& model) {
  const auto p = model.poles();
  return (p.real().array() < Scalar(0)).all();
}

template <typename Scalar>
bool is_stable(const DtModel<Scalar>& model) {
  const auto p = model.poles();
  return (p.array().abs() < Scalar(1)).all();
}

template <typename Scalar>
ComplexVector<Scalar> poles(const RationalModel<Scalar>& model) {
  return model.poles();
}

/// Solves A P + P A^T + Q = 0 through the Kronecker-sum linear system.
template <typename Scalar>
Matrix<Scalar> lyapunov_continuous(const Matrix<Scalar>& A, const Matrix<Scalar>& Q) {
  const Eigen::Index n = A.rows();
  const Matrix<Scalar> I = Matrix<Scalar>::Identity(n, n);
  Matrix<Scalar> K = Matrix<Scalar>::Zero(n * n, n * n);
  // vec(A P) = (I kron A) vec(P); vec(P A^T) = (A kron I) vec(P)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += I(i, j) * A + A(i, j) * I;
    }
  }
  Vector<Scalar> rhs = -Eigen::Map<const Vector<Scalar>>(Q.data(), n * n);
  Vector<Scalar> p = K.fullPivLu().solve(rhs);
  Matrix<Scalar> P = Eigen::Map<Matrix<Scalar>>(p.data(), n, n);
  return (P + P.transpose()) / Scalar(2);
}

/// Squared H2 norm C P C^T of a stable continuous-time realization.
template <typename Scalar>
Scalar l2_norm_sq(const StateSpace<Scalar>& ss) {
  require(ss.domain == Domain::Continuous, Errc::InvalidArgument,
          "H2 norm implemented for continuous-time realizations");
  require(ss.D == Scalar(0), Errc::MalformedModel, "H2 norm needs D = 0");
  Eigen::EigenSolver<Matrix<Scalar>> eig(ss.A, false);
  require((eig.eigenvalues().real().array() < Scalar(0)).all(),
          Errc::UnstableSystem, "H2 norm of an unstable system");
  const Matrix<Scalar> BBt = ss.B * ss.B.transpose();
  const Matrix<Scalar> P = lyapunov_continuous<Scalar>(ss.A, BBt);
  return std::max(Scalar(0), Scalar((ss.C * P * ss.C.transpose())(0, 0)));
}

namespace detail {

/// Realization of G(w0 s') for the frequency-normalized variable s'.
/// ||G||^2 = w0 ||G'||^2, and the normalized companion form is far better
/// conditioned for systems with large constant coefficients.
template <typename Scalar>
StateSpace<Scalar> scaled_realization(const CtModel<Scalar>& model, Scalar w0) {
  const Eigen::Index n = model.order();
  Vector<Scalar> num = model.numerator();
  Vector<Scalar> den = model.denominator_tail();
  // entry j holds the coefficient of s^{n-1-j}; scale by w0^{(n-1-j) - n}
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar f = std::pow(w0, static_cast<Scalar>(-(j + 1)));
    num(j) *= f;
    den(j) *= f;
  }
  Vector<Scalar> theta(2 * n);
  theta << num, den;
  return ct_to_ss(CtModel<Scalar>::from_theta(theta));
}

template <typename Scalar>
Scalar frequency_scale(const CtModel<Scalar>& model) {
  const Scalar a0 = std::abs(model.denominator_tail()(model.order() - 1));
  if (!(a0 > Scalar(0))) return Scalar(1);
  return std::pow(a0, Scalar(1) / static_cast<Scalar>(model.order()));
}

}  // namespace detail

/// ||G||_2^2 of a strictly proper, asymptotically stable G(s).
template <typename Scalar>
Scalar l2_norm_sq(const CtModel<Scalar>& model) {
  require(is_stable(model), Errc::UnstableSystem, "H2 norm of an unstable system");
  const Scalar w0 = detail::frequency_scale(model);
  return w0 * l2_norm_sq(detail::scaled_realization(model, w0));
}

/// ||G_a - G_b||_2^2, the difference realized as a parallel connection.
template <typename Scalar>
Scalar l2_distance_sq(const CtModel<Scalar>& a, const CtModel<Scalar>& b) {
  require(is_stable(a) && is_stable(b), Errc::UnstableSystem,
          "H2 distance between unstable systems");
  const Scalar w0 = detail::frequency_scale(b);
  const auto sa = detail::scaled_realization(a, w0);
  const auto sb = detail::scaled_realization(b, w0);
  const Eigen::Index na = sa.states(), nb = sb.states();
  StateSpace<Scalar> diff;
  diff.A = Matrix<Scalar>::Zero(na + nb, na + nb);
  diff.A.topLeftCorner(na, na) = sa.A;
  diff.A.bottomRightCorner(nb, nb) = sb.A;
  diff.B.resize(na + nb);
  diff.B << sa.B, sb.B;
  diff.C.resize(na + nb);
  diff.C << sa.C, -sb.C;
  return w0 * l2_norm_sq(diff);
}

template <typename Scalar, typename Derived>
ComplexVector<Scalar> freq_response(const CtModel<Scalar>& model,
                                    const Eigen::MatrixBase<Derived>& omega) {
  using C = std::complex<Scalar>;
  const auto num = model.num();
  const auto den = model.den();
  ComplexVector<Scalar> out(omega.size());
  for (Eigen::Index k = 0; k < omega.size(); ++k) {
    const C s(Scalar(0), omega(k));
    out(k) = num(s) / den(s);
  }
  return out;
}

template <typename Scalar, typename Derived>
ComplexVector<Scalar> freq_response(const DtModel<Scalar>& model,
                                    const Eigen::MatrixBase<Derived>& omega) {
  using C = std::complex<Scalar>;
  const auto num = model.num();
  const auto den = model.den();
  ComplexVector<Scalar> out(omega.size());
  for (Eigen::Index k = 0; k < omega.size(); ++k) {
    const C z = std::polar(Scalar(1), omega(k) * model.h());
    out(k) = num(z) / den(z);
  }
  return out;
}

/// C (xI - A)^{-1} B + D with x = j w (CT) or exp(j w h) (DT).
template <typename Scalar, typename Derived>
ComplexVector<Scalar> freq_response(const StateSpace<Scalar>& ss,
                                    const Eigen::MatrixBase<Derived>& omega) {
  using C = std::complex<Scalar>;
  const Eigen::Index n = ss.states();
  const Matrix<C> A = ss.A.template cast<C>();
  const Vector<C> B = ss.B.template cast<C>();
  const Eigen::Matrix<C, 1, Eigen::Dynamic> Cm = ss.C.template cast<C>();
  ComplexVector<Scalar> out(omega.size());
  for (Eigen::Index k = 0; k < omega.size(); ++k) {
    const C x = ss.domain == Domain::Continuous
                    ? C(Scalar(0), omega(k))
                    : std::polar(Scalar(1), omega(k) * ss.h);
    const Matrix<C> M = x * Matrix<C>::Identity(n, n) - A;
    out(k) = (Cm * M.partialPivLu().solve(B))(0, 0) + C(ss.D);
  }
  return out;
}

}  // namespace ctid
