#include "ctid/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

namespace ctid {

namespace {

/// Numerator of C (xI - A)^{-1} B given the monic denominator tail and the
/// Markov parameters m_k = C A^{k-1} B, k = 1..n. Entry j of the result is
/// the coefficient of x^{n-1-j}.
VectorXd numerator_from_markov(const VectorXd& den_tail, const VectorXd& markov) {
  const Eigen::Index n = den_tail.size();
  VectorXd num(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = markov(j);
    for (Eigen::Index i = 1; i <= j; ++i) acc += den_tail(i - 1) * markov(j - i);
    num(j) = acc;
  }
  return num;
}

VectorXd markov_parameters(const MatrixXd& A, const VectorXd& B,
                           const Eigen::RowVectorXd& C) {
  const Eigen::Index n = A.rows();
  VectorXd m(n);
  VectorXd x = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    m(k) = C.dot(x);
    x = A * x;
  }
  return m;
}

// theta of G(c s) / c^n: the coefficient of s^k is multiplied by c^(n-k).
VectorXd time_scaled(const VectorXd& theta, double c) {
  const Eigen::Index n = theta.size() / 2;
  VectorXd out = theta;
  double f = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    f *= c;
    out(j) *= f;
    out(n + j) *= f;
  }
  return out;
}

}  // namespace

DtModeld c2d_zoh(const CtModeld& model, double h) {
  require(h > 0.0 && std::isfinite(h), Errc::InvalidArgument,
          "sampling period must be positive");
  // Work in time units of h, where the sampling period is 1.
  const CtModeld unit = CtModeld::from_theta(time_scaled(model.theta(), h));
  const StateSpaced ss = ct_to_ss(unit);
  const Eigen::Index n = ss.states();

  MatrixXd M = MatrixXd::Zero(n + 1, n + 1);
  M.topLeftCorner(n, n) = ss.A;
  M.topRightCorner(n, 1) = ss.B;
  const MatrixXd E = M.exp();
  const MatrixXd Ad = E.topLeftCorner(n, n);
  const VectorXd Bd = E.topRightCorner(n, 1);

  const ComplexVector<double> z = unit.poles().array().exp();
  const Polynomiald den = Polynomiald::from_roots(z);
  const VectorXd den_tail = den.coeffs().tail(n);
  const VectorXd num = numerator_from_markov(den_tail, markov_parameters(Ad, Bd, ss.C));

  VectorXd theta(2 * n);
  theta << num, den_tail;
  return DtModeld::from_theta(theta, h);
}

CtModeld d2c_zoh(const DtModeld& model) {
  const double h = model.h();
  const Eigen::Index n = model.order();
  const ComplexVector<double> z = model.poles();
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double mag = std::abs(z(k));
    const bool on_negative_axis =
        z(k).real() <= 0.0 && std::abs(z(k).imag()) <= 1e-12 * std::max(1.0, mag);
    require(mag > 0.0 && !on_negative_axis, Errc::NonPrincipalLog,
            "discrete pole on the closed negative real axis");
  }

  const StateSpaced ss = dt_to_ss(model);
  MatrixXd Phi = MatrixXd::Identity(n + 1, n + 1);
  Phi.topLeftCorner(n, n) = ss.A;
  Phi.topRightCorner(n, 1) = ss.B;
  const MatrixXd L = Phi.log();
  require(L.allFinite(), Errc::SingularMap, "matrix logarithm is not finite");
  const MatrixXd A = L.topLeftCorner(n, n);
  const VectorXd B = L.topRightCorner(n, 1);

  const ComplexVector<double> s = z.array().log();
  const Polynomiald den = Polynomiald::from_roots(s);
  const VectorXd den_tail = den.coeffs().tail(n);
  const VectorXd num = numerator_from_markov(den_tail, markov_parameters(A, B, ss.C));
  require(num.allFinite() && den_tail.allFinite(), Errc::SingularMap,
          "inverse sampling produced non-finite coefficients");

  VectorXd theta(2 * n);
  theta << num, den_tail;
  return CtModeld::from_theta(time_scaled(theta, 1.0 / h), 1, false);
}

CtModeld naive_truncate(const CtModeld& model, int r) {
  require(r >= 1 && r <= model.order(), Errc::InvalidArgument,
          "relative degree must be in [1, n]");
  VectorXd theta = model.theta();
  theta.head(r - 1).setZero();
  return CtModeld::from_theta(theta, r, true);
}

VectorXd zoh_map(const VectorXd& theta_c, double h) {
  return c2d_zoh(CtModeld::from_theta(theta_c), h).theta();
}

MatrixXd zoh_jacobian(const VectorXd& theta_c, double h) {
  const Eigen::Index p = theta_c.size();
  const double base_step = std::cbrt(std::numeric_limits<double>::epsilon());
  MatrixXd J(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double step = base_step * std::max(1.0, std::abs(theta_c(i)));
    VectorXd plus = theta_c, minus = theta_c;
    plus(i) += step;
    minus(i) -= step;
    const double span = plus(i) - minus(i);
    try {
      J.col(i) = (zoh_map(plus, h) - zoh_map(minus, h)) / span;
    } catch (const Error& e) {
      raise(Errc::DegenerateMap, std::string("perturbed evaluation failed: ") + e.what());
    }
  }
  require(J.allFinite(), Errc::DegenerateMap, "non-finite Jacobian entry");
  return J;
}

ZohMapPoint zoh_map_point(const VectorXd& theta_c, double h) {
  return ZohMapPoint{theta_c, h, zoh_map(theta_c, h), zoh_jacobian(theta_c, h)};
}

bool sampling_condition_holds(const CtModeld& model, double h) {
  const ComplexVector<double> p = model.poles();
  const double max_imag = p.size() == 0 ? 0.0 : p.imag().cwiseAbs().maxCoeff();
  return 2.0 * std::numbers::pi / h > 2.0 * max_imag;
}

VectorXd zoh_response(const CtModeld& model, const VectorXd& u, double h) {
  return simulate_dt(c2d_zoh(model, h), u);
}

VectorXd white_noise(const NoiseSpec& noise, Eigen::Index length) {
  require(noise.sigma >= 0.0, Errc::InvalidArgument, "noise sigma must be >= 0");
  VectorXd e = VectorXd::Zero(length);
  if (noise.sigma == 0.0) return e;
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, noise.sigma);
  for (Eigen::Index k = 0; k < length; ++k) e(k) = normal(rng);
  return e;
}

SampledDataset simulate_ct_zoh(const CtModeld& model, const VectorXd& u, double h,
                               const NoiseSpec& noise) {
  VectorXd y = zoh_response(model, u, h);
  y += white_noise(noise, u.size());
  return SampledDataset(u, std::move(y), h);
}

double sample_variance(const VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n == 0) return 0.0;
  const double mean = x.mean();
  const double ss = (x.array() - mean).square().sum();
  return n > 1 ? ss / static_cast<double>(n - 1) : ss;
}

double sigma_for_snr(const VectorXd& y_clean, double snr_db) {
  return std::sqrt(sample_variance(y_clean) / std::pow(10.0, snr_db / 10.0));
}

double snr_db(const VectorXd& y_clean, const VectorXd& noise) {
  return 10.0 * std::log10(sample_variance(y_clean) / sample_variance(noise));
}

}  // namespace ctid
