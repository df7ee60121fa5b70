#pragma once

#include <cmath>
#include <string>

#include "ctid/polynomial.hpp"

namespace ctid {

/// Strictly proper SISO rational model of order n with a monic denominator.
///
/// The parameter-vector view is
///   theta = [num_{n-1} ... num_0, den_{n-1} ... den_0]
/// i.e. numerator high to low (zero padded to n entries) followed by the
/// non-leading denominator coefficients high to low.
template <typename Scalar>
class RationalModel {
 public:
  using VectorType = Vector<Scalar>;

  /// Placeholder first-order model 0 / (x + 0).
  RationalModel() : num_(VectorType::Zero(1)), den_(VectorType::Zero(1)) {}

  RationalModel(const Polynomial<Scalar>& num, const Polynomial<Scalar>& den) {
    require(den.degree() >= 1, Errc::MalformedModel,
            "denominator must have degree >= 1");
    require(den.leading() != Scalar(0), Errc::MalformedModel,
            "denominator leading coefficient is zero");
    require(num.degree() < den.degree(), Errc::MalformedModel,
            "model must be strictly proper");
    const Eigen::Index n = den.degree();
    const Scalar lead = den.leading();
    num_ = num.padded(n) / lead;
    den_ = den.coeffs().tail(n) / lead;
    require(num_.allFinite() && den_.allFinite(), Errc::MalformedModel,
            "non-finite coefficient");
  }

  int order() const { return static_cast<int>(den_.size()); }

  /// Numerator coefficients, high to low, padded to n entries.
  const VectorType& numerator() const { return num_; }
  /// Denominator coefficients after the leading 1, high to low.
  const VectorType& denominator_tail() const { return den_; }

  Polynomial<Scalar> num() const { return Polynomial<Scalar>(num_); }
  Polynomial<Scalar> den() const {
    VectorType c(den_.size() + 1);
    c << Scalar(1), den_;
    return Polynomial<Scalar>(c);
  }

  VectorType theta() const {
    VectorType t(2 * den_.size());
    t << num_, den_;
    return t;
  }

  ComplexVector<Scalar> poles() const { return den().roots(); }
  ComplexVector<Scalar> zeros() const { return num().roots(); }

 protected:
  static Polynomial<Scalar> num_from_theta(const VectorType& theta) {
    check_theta(theta);
    return Polynomial<Scalar>(VectorType(theta.head(theta.size() / 2)));
  }
  static Polynomial<Scalar> den_from_theta(const VectorType& theta) {
    check_theta(theta);
    const Eigen::Index n = theta.size() / 2;
    VectorType c(n + 1);
    c << Scalar(1), theta.tail(n);
    return Polynomial<Scalar>(c);
  }

 private:
  static void check_theta(const VectorType& theta) {
    require(theta.size() >= 2 && theta.size() % 2 == 0, Errc::MalformedModel,
            "parameter vector must have even length >= 2");
  }

  VectorType num_;
  VectorType den_;
};

/// Continuous-time transfer function G(s) with declared relative degree.
///
/// A model flagged `rd_enforced` has its first r-1 numerator entries exactly
/// zero; models produced by inverse sampling carry a full numerator (r = 1).
template <typename Scalar>
class CtModel : public RationalModel<Scalar> {
 public:
  using Base = RationalModel<Scalar>;
  using typename Base::VectorType;

  CtModel() = default;

  /// `relative_degree` 0 selects the structural relative degree of `num`.
  CtModel(const Polynomial<Scalar>& num, const Polynomial<Scalar>& den,
          int relative_degree = 0, bool rd_enforced = false)
      : Base(num, den), rd_enforced_(rd_enforced) {
    const int n = this->order();
    r_ = relative_degree > 0
             ? relative_degree
             : (num.is_zero() ? n : n - static_cast<int>(num.degree()));
    require(r_ >= 1 && r_ <= n, Errc::MalformedModel,
            "relative degree must be in [1, n]");
    if (rd_enforced_) {
      require(this->numerator().head(r_ - 1).isZero(0), Errc::MalformedModel,
              "enforced relative degree with nonzero leading numerator");
    }
  }

  static CtModel from_theta(const VectorType& theta, int relative_degree = 1,
                            bool rd_enforced = false) {
    return CtModel(Base::num_from_theta(theta), Base::den_from_theta(theta),
                   relative_degree, rd_enforced);
  }

  int relative_degree() const { return r_; }
  bool rd_enforced() const { return rd_enforced_; }

 private:
  int r_ = 1;
  bool rd_enforced_ = false;
};

/// Discrete-time transfer function H(z) with sampling period h.
template <typename Scalar>
class DtModel : public RationalModel<Scalar> {
 public:
  using Base = RationalModel<Scalar>;
  using typename Base::VectorType;

  DtModel() = default;

  DtModel(const Polynomial<Scalar>& num, const Polynomial<Scalar>& den, Scalar h)
      : Base(num, den), h_(h) {
    require(h > Scalar(0) && std::isfinite(static_cast<double>(h)),
            Errc::MalformedModel, "sampling period must be positive");
  }

  static DtModel from_theta(const VectorType& theta, Scalar h) {
    return DtModel(Base::num_from_theta(theta), Base::den_from_theta(theta), h);
  }

  Scalar h() const { return h_; }

 private:
  Scalar h_ = Scalar(1);
};

enum class Domain { Continuous, Discrete };

/// SISO state-space realization (A, B, C, D).
template <typename Scalar>
struct StateSpace {
  Matrix<Scalar> A;
  Vector<Scalar> B;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> C;
  Scalar D = Scalar(0);
  Domain domain = Domain::Continuous;
  Scalar h = Scalar(0);

  Eigen::Index states() const { return A.rows(); }
};

/// ZOH-held input samples and the measured output at the same instants.
struct SampledDataset {
  VectorXd u;
  VectorXd y;
  double h = 0.0;

  SampledDataset() = default;
  SampledDataset(VectorXd input, VectorXd output, double period)
      : u(std::move(input)), y(std::move(output)), h(period) {
    require(u.size() == y.size(), Errc::InvalidArgument,
            "input and output lengths differ");
    require(u.size() >= 1, Errc::InvalidArgument, "empty dataset");
    require(h > 0.0, Errc::InvalidArgument, "sampling period must be positive");
  }

  Eigen::Index size() const { return u.size(); }
};

using CtModeld = CtModel<double>;
using DtModeld = DtModel<double>;
using StateSpaced = StateSpace<double>;

}  // namespace ctid
