#include <gtest/gtest.h>

#include <numbers>
#include <set>
#include <unsupported/Eigen/FFT>

#include "ctid/io.hpp"
#include "support.hpp"

using namespace ctid;

TEST(Prbs, BenchmarkLengthsAndLevels) {
  const VectorXd a = gen_prbs(10, 7, 0.0, 2.0);
  EXPECT_EQ(a.size(), 7161);
  EXPECT_EQ(gen_prbs(9, 3, 0.0, 2.0).size(), 1533);
  std::set<double> levels(a.begin(), a.end());
  EXPECT_EQ(levels, (std::set<double>{0.0, 2.0}));
  for (Eigen::Index k = 0; k < a.size(); k += 7) {
    EXPECT_EQ(a.segment(k, 7), VectorXd::Constant(7, a(k)));
  }
  EXPECT_EQ(a, gen_prbs(10, 7, 0.0, 2.0));
}

TEST(Prbs, UnsupportedRegisterLength) {
  for (int n : {0, 1, 17}) {
    try {
      gen_prbs(n, 1, 0.0, 1.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::UnsupportedRegisterLength);
    }
  }
}

TEST(Prbs, TwoValuedAutocorrelationEveryRegisterLength) {
  for (int n = 2; n <= 16; ++n) {
    const auto bits = lfsr_sequence(n);
    const std::size_t period = (std::size_t{1} << n) - 1;
    ASSERT_EQ(bits.size(), period);
    std::vector<int> s(period);
    for (std::size_t k = 0; k < period; ++k) s[k] = bits[k] ? 1 : -1;
    std::vector<std::size_t> lags;
    if (n <= 12) {
      for (std::size_t l = 1; l < period; ++l) lags.push_back(l);
    } else {
      std::mt19937_64 rng(static_cast<std::uint64_t>(n));
      for (int i = 0; i < 100; ++i) lags.push_back(1 + rng() % (period - 1));
    }
    for (std::size_t lag : lags) {
      long long acc = 0;
      for (std::size_t k = 0; k < period; ++k) acc += s[k] * s[(k + lag) % period];
      ASSERT_EQ(acc, -1) << "n=" << n << " lag=" << lag;
    }
  }
}

TEST(Multisine, DefinitionAndAliasing) {
  const std::vector<double> one{3.0};
  const VectorXd u = gen_multisine(one, 1.0, 500, 0.01);
  EXPECT_LE(u.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_NEAR(u(17), std::sin(3.0 * 0.17), 1e-15);
  EXPECT_EQ(u, gen_multisine(one, 1.0, 500, 0.01));
  try {
    gen_multisine({400.0}, 1.0, 10, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AliasedFrequency);
  }
}

TEST(Multisine, DftPeaksSitAtTheNearestBins) {
  const std::vector<double> w{0.5, 1, 5, 8, 10, 12, 15, 20, 25, 30};
  const double h = 0.01;
  const Eigen::Index N = 2000;
  const VectorXd u = gen_multisine(w, 1.0, N, h);
  Eigen::FFT<double> fft;
  std::vector<double> in(u.data(), u.data() + N);
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  std::vector<std::pair<double, int>> mags;
  for (int k = 0; k <= N / 2; ++k) mags.emplace_back(std::abs(out[static_cast<std::size_t>(k)]), k);
  std::sort(mags.rbegin(), mags.rend());
  std::vector<int> peaks;
  for (int i = 0; i < 10; ++i) peaks.push_back(mags[static_cast<std::size_t>(i)].second);
  std::sort(peaks.begin(), peaks.end());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double exact = w[i] * N * h / (2 * std::numbers::pi);
    EXPECT_LT(std::abs(peaks[i] - exact), 1.0) << "omega " << w[i];
  }
}

TEST(RandomSystem, Contract) {
  std::mt19937_64 rng(123);
  RandomSystemSpec spec;
  double worst = -1e300;
  for (int i = 0; i < 500; ++i) {
    const CtModeld g = gen_random_system(spec, rng);
    EXPECT_TRUE(is_stable(g));
    EXPECT_EQ(g.order(), 3);
    EXPECT_EQ(g.num().degree(), 1);
    EXPECT_EQ(g.relative_degree(), 2);
    const double dc = std::abs(g.num()(0.0) / g.den()(0.0));
    EXPECT_GE(dc, 0.5 - 1e-12);
    EXPECT_LE(dc, 2.0 + 1e-12);
    const auto p = g.poles();
    worst = std::max(worst, p.real().maxCoeff());
    EXPECT_GE(p.real().minCoeff(), -50.0 - 1e-9);
  }
  EXPECT_LE(worst, -0.1);
  std::mt19937_64 a(5), b(5);
  EXPECT_EQ(gen_random_system(spec, a).theta(), gen_random_system(spec, b).theta());
}

TEST(Metrics, Examples) {
  const CtModeld g0 = rao_garnier();
  EXPECT_NEAR(mse_g(g0, g0), 0.0, 1e-12);
  const CtModeld twice(Polynomiald(VectorXd(2.0 * g0.num().coeffs())), g0.den());
  EXPECT_NEAR(mse_g(twice, g0), 1.0, 1e-10);
  EXPECT_EQ(mse_theta(g0.theta(), g0.theta()), 0.0);
  VectorXd padded(8);
  padded << 0, 0, -6400, 1600, 5, 408, 416, 1600;
  VectorXd shortv = padded.tail(6);
  EXPECT_EQ(mse_theta(shortv, padded), 0.0);

  VectorXd y(4);
  y << 1.0, 2.0, 3.0, 6.0;
  EXPECT_EQ(fit_percent(y, y), 100.0);
  EXPECT_NEAR(fit_percent(VectorXd::Constant(4, y.mean()), y), 0.0, 1e-12);
  EXPECT_LT(fit_percent(VectorXd(-y), y), 0.0);
}

namespace {

ExperimentConfig rao_config(int M, double sigma) {
  ExperimentConfig c;
  c.system = rao_garnier();
  c.h = 0.05;
  c.noise = {NoiseLevel::Kind::Sigma, sigma};
  c.M = M;
  c.seed = 99;
  c.threads = 1;
  return c;
}

}  // namespace

TEST(MonteCarlo, NoiselessRunsAreExact) {
  const McReport rep = run_monte_carlo(rao_config(2, 0.0));
  ASSERT_EQ(rep.per_run.size(), 4u);
  for (const auto& r : rep.per_run) {
    EXPECT_EQ(r.status, RunStatus::Ok) << r.detail;
    EXPECT_NEAR(r.metrics.fit, 100.0, 1e-6);
  }
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  ExperimentConfig c = rao_config(4, 0.0);
  c.noise = {NoiseLevel::Kind::SnrDb, 10.0};
  const McReport a = run_monte_carlo(c);
  c.threads = 3;
  const McReport b = run_monte_carlo(c);
  ASSERT_EQ(a.per_run.size(), b.per_run.size());
  for (std::size_t i = 0; i < a.per_run.size(); ++i) {
    EXPECT_EQ(a.per_run[i].run, b.per_run[i].run);
    EXPECT_EQ(a.per_run[i].status, b.per_run[i].status);
    EXPECT_EQ(a.per_run[i].theta_c, b.per_run[i].theta_c);
    EXPECT_EQ(a.per_run[i].metrics.fit, b.per_run[i].metrics.fit);
    EXPECT_EQ(a.per_run[i].metrics.mse_g, b.per_run[i].metrics.mse_g);
  }
  std::ostringstream sa, sb;
  write_report_csv(sa, a);
  write_report_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  for (const auto& agg : a.aggregate) EXPECT_EQ(agg.successes + agg.failure_count(), c.M);
}

TEST(MonteCarlo, RandomSystemsStudy) {
  ExperimentConfig c;
  c.system.reset();
  c.input.kind = InputSpec::Kind::WhiteNoise;
  c.h = 0.0;
  c.N = 2000;
  c.noise = {NoiseLevel::Kind::MaxFraction, 0.05};
  c.M = 6;
  c.seed = 3;
  c.threads = 1;
  const McReport rep = run_monte_carlo(c);
  EXPECT_LE(rep.per_run.size(), 12u);
  for (const auto& agg : rep.aggregate) EXPECT_EQ(agg.successes + agg.failure_count(), c.M);
  EXPECT_GT(rep.stats(Estimator::PEMrd).successes, 0);
  const RunData d0 = make_run_data(c, 0), d1 = make_run_data(c, 1);
  EXPECT_NE(d0.system.theta(), d1.system.theta());
  EXPECT_NE(d0.data.u, d1.data.u);
}

TEST(MonteCarlo, FixedSystemSharesInputAcrossRuns) {
  const ExperimentConfig c = rao_config(2, 1.0);
  const RunData a = make_run_data(c, 0), b = make_run_data(c, 1);
  EXPECT_EQ(a.data.u, b.data.u);
  EXPECT_NE(a.data.y, b.data.y);
}

TEST(MonteCarlo, ConfigValidation) {
  ExperimentConfig c = rao_config(0, 1.0);
  EXPECT_THROW(c.validate(), Error);
  c.M = 1;
  c.N = 1000;
  EXPECT_THROW(c.validate(), Error);
  c.N = 7161;
  EXPECT_NO_THROW(c.validate());
  c.estimators.clear();
  EXPECT_THROW(c.validate(), Error);
}

TEST(MonteCarlo, SeedDerivation) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
}
