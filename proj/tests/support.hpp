#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ctid/lti.hpp"

namespace ctid::test {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double rel_err(const VectorXd& a, const VectorXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

/// Random stable CT system with real poles and complex pairs in the band
/// [-pole_max, -pole_min] and a random numerator of degree < n.
inline CtModeld random_stable(std::mt19937_64& rng, int n, double pole_min = 0.2,
                              double pole_max = 5.0, int num_degree = -1) {
  std::uniform_real_distribution<double> re(pole_min, pole_max), im(0.2, 3.0), coin(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::complex<double>> roots;
  while (static_cast<int>(roots.size()) < n) {
    const double a = -re(rng);
    if (n - static_cast<int>(roots.size()) >= 2 && coin(rng) < 0.5) {
      const double b = im(rng) * std::abs(a);
      roots.emplace_back(a, b);
      roots.emplace_back(a, -b);
    } else {
      roots.emplace_back(a, 0.0);
    }
  }
  ComplexVector<double> r(n);
  for (int i = 0; i < n; ++i) r(i) = roots[static_cast<std::size_t>(i)];
  const Polynomiald den = Polynomiald::from_roots(r);
  const int m = num_degree >= 0 ? num_degree : std::uniform_int_distribution<int>(0, n - 1)(rng);
  VectorXd num(m + 1);
  for (int i = 0; i <= m; ++i) num(i) = g(rng);
  if (std::abs(num(0)) < 0.1) num(0) = 0.5;
  return CtModeld(Polynomiald(num), den);
}

/// (1/pi) int_0^inf |G(jw)|^2 dw by adaptive Gauss-Kronrod, split at the
/// pole natural frequencies.
inline double h2_by_quadrature(const CtModeld& g) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> cuts{0.0};
  const auto p = g.poles();
  for (Eigen::Index i = 0; i < p.size(); ++i) cuts.push_back(std::abs(p(i)));
  std::sort(cuts.begin(), cuts.end());
  auto f = [&](double w) { return std::norm(g.num()(std::complex<double>(0, w)) /
                                            g.den()(std::complex<double>(0, w))); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) total += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 20, 1e-12);
  }
  total += gauss_kronrod<double, 61>::integrate(f, cuts.back(), std::numeric_limits<double>::infinity(), 20, 1e-12);
  return total / std::numbers::pi;
}

}  // namespace ctid::test
