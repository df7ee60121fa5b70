#pragma once

#include <complex>
#include <initializer_list>

#include <Eigen/Dense>

#include "ctid/error.hpp"

namespace ctid {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVector = Vector<std::complex<Scalar>>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// Real polynomial with coefficients stored in descending powers.
///
/// Leading zeros are stripped on construction, so `degree()` is always the
/// index arithmetic on the stored coefficients. The zero polynomial is kept
/// as the single coefficient 0 and reports degree 0.
template <typename Scalar>
class Polynomial {
 public:
  using Coefficients = Vector<Scalar>;

  Polynomial() : coeffs_(Coefficients::Zero(1)) {}

  explicit Polynomial(const Coefficients& descending) {
    require(descending.size() > 0, Errc::MalformedModel,
            "polynomial needs at least one coefficient");
    Eigen::Index first = 0;
    while (first + 1 < descending.size() && descending(first) == Scalar(0)) {
      ++first;
    }
    coeffs_ = descending.tail(descending.size() - first);
  }

  Polynomial(std::initializer_list<Scalar> descending)
      : Polynomial(Coefficients(Eigen::Map<const Coefficients>(
            descending.begin(), static_cast<Eigen::Index>(descending.size())))) {}

  /// Monic polynomial with the given roots. Complex roots must come in
  /// conjugate pairs; the imaginary residue of the expansion is dropped.
  static Polynomial from_roots(const ComplexVector<Scalar>& roots) {
    using C = std::complex<Scalar>;
    Vector<C> c = Vector<C>::Zero(roots.size() + 1);
    c(0) = C(1);
    for (Eigen::Index k = 0; k < roots.size(); ++k) {
      for (Eigen::Index j = k + 1; j >= 1; --j) c(j) -= roots(k) * c(j - 1);
    }
    return Polynomial(Coefficients(c.real()));
  }

  Eigen::Index degree() const { return coeffs_.size() - 1; }
  const Coefficients& coeffs() const { return coeffs_; }
  Scalar leading() const { return coeffs_(0); }
  bool is_zero() const { return degree() == 0 && coeffs_(0) == Scalar(0); }

  /// Horner evaluation at a real or complex point.
  template <typename T>
  T operator()(const T& x) const {
    T acc = T(coeffs_(0));
    for (Eigen::Index k = 1; k < coeffs_.size(); ++k) acc = acc * x + T(coeffs_(k));
    return acc;
  }

  /// Coefficients left-padded with zeros to `length` entries.
  Coefficients padded(Eigen::Index length) const {
    require(length >= coeffs_.size(), Errc::InvalidArgument,
            "padding length shorter than polynomial");
    Coefficients out = Coefficients::Zero(length);
    out.tail(coeffs_.size()) = coeffs_;
    return out;
  }

  /// Roots via eigenvalues of the companion matrix.
  ComplexVector<Scalar> roots() const {
    const Eigen::Index n = degree();
    if (n == 0) return ComplexVector<Scalar>(0);
    Matrix<Scalar> companion = Matrix<Scalar>::Zero(n, n);
    companion.row(0) = -coeffs_.tail(n).transpose() / coeffs_(0);
    if (n > 1) companion.diagonal(-1).setOnes();
    Eigen::EigenSolver<Matrix<Scalar>> solver(companion, false);
    return solver.eigenvalues();
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Coefficients c = Coefficients::Zero(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (Eigen::Index i = 0; i < a.coeffs_.size(); ++i) {
      c.segment(i, b.coeffs_.size()) += a.coeffs_(i) * b.coeffs_;
    }
    return Polynomial(c);
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    const Eigen::Index len = std::max(a.coeffs_.size(), b.coeffs_.size());
    return Polynomial(Coefficients(a.padded(len) + b.padded(len)));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    const Eigen::Index len = std::max(a.coeffs_.size(), b.coeffs_.size());
    return Polynomial(Coefficients(a.padded(len) - b.padded(len)));
  }

  friend Polynomial operator*(Scalar s, const Polynomial& p) {
    return Polynomial(Coefficients(s * p.coeffs_));
  }

 private:
  Coefficients coeffs_;
};

using Polynomiald = Polynomial<double>;

}  // namespace ctid
