#include "ctid/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace ctid {

std::string to_string(Estimator e) { return e == Estimator::PEM ? "PEM" : "PEMrd"; }

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::NegativeRealPole: return "negative_real_pole";
    case RunStatus::NegativeFit: return "negative_fit";
    case RunStatus::Crash: return "crash";
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& name) {
  if (name == "PEM") return Estimator::PEM;
  if (name == "PEMrd") return Estimator::PEMrd;
  raise(Errc::InvalidArgument, "unknown estimator '" + name + "'");
}

void ExperimentConfig::validate() const {
  require(M >= 1, Errc::InvalidArgument, "M must be >= 1");
  require(!estimators.empty(), Errc::InvalidArgument, "no estimator selected");
  require(noise.value >= 0.0 || noise.kind == NoiseLevel::Kind::SnrDb, Errc::InvalidArgument,
          "noise level must be >= 0");
  if (system) {
    require(r >= 0 && r <= system->order(), Errc::InvalidArgument,
            "relative degree exceeds the system order");
    require(h > 0.0, Errc::InvalidArgument, "a fixed system needs h > 0");
  } else {
    require(r >= 0 && r <= random.order, Errc::InvalidArgument,
            "relative degree exceeds the random system order");
  }
  if (input.kind == InputSpec::Kind::Prbs) {
    prbs_taps(input.n_stages);
    require(input.p >= 1, Errc::InvalidArgument, "PRBS chip length must be >= 1");
    const Eigen::Index period =
        static_cast<Eigen::Index>(input.p) * ((Eigen::Index{1} << input.n_stages) - 1);
    require(N == 0 || N == period, Errc::InvalidArgument,
            "N must equal the PRBS period p (2^n - 1) = " + std::to_string(period));
  } else {
    require(N > 0, Errc::InvalidArgument, "N must be set for non-PRBS inputs");
  }
}

int Aggregate::failure_count() const {
  int total = 0;
  for (const auto& [status, count] : failures) total += count;
  return total;
}

const Aggregate& McReport::stats(Estimator e) const {
  for (const auto& a : aggregate) {
    if (a.estimator == e) return a;
  }
  raise(Errc::InvalidArgument, "estimator not part of the report");
}

bool McReport::all_failed() const {
  return std::all_of(aggregate.begin(), aggregate.end(),
                     [](const Aggregate& a) { return a.successes == 0; });
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

VectorXd make_input(const InputSpec& spec, Eigen::Index length, double h, std::uint64_t seed) {
  switch (spec.kind) {
    case InputSpec::Kind::Prbs: return gen_prbs(spec.n_stages, spec.p, spec.low, spec.high);
    case InputSpec::Kind::Multisine: return gen_multisine(spec.freqs, spec.amplitude, length, h);
    case InputSpec::Kind::WhiteNoise: return gen_white_noise(spec.variance, length, seed);
  }
  raise(Errc::InvalidArgument, "unknown input kind");
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

RunRecord failed(int run, Estimator e, RunStatus status, double h, std::string detail) {
  RunRecord rec;
  rec.run = run;
  rec.estimator = e;
  rec.status = status;
  rec.h = h;
  rec.metrics = {std::nan(""), std::nan(""), std::nan("")};
  rec.detail = std::move(detail);
  return rec;
}

RunRecord scored(int run, Estimator e, double h, const CtModeld& g_hat, const CtModeld& g0,
                 const VectorXd& y_hat, const VectorXd& y0) {
  RunRecord rec;
  rec.run = run;
  rec.estimator = e;
  rec.h = h;
  rec.theta_c = g_hat.theta();
  try {
    rec.metrics.fit = fit_percent(y_hat, y0);
    rec.metrics.mse_theta = mse_theta(g_hat.theta(), g0.theta());
    rec.metrics.mse_g = mse_g(g_hat, g0);
  } catch (const Error& err) {
    return failed(run, e, RunStatus::Crash, h, err.what());
  }
  if (!(rec.metrics.fit >= 0.0)) {
    rec.status = RunStatus::NegativeFit;
    rec.detail = "fit " + std::to_string(rec.metrics.fit);
  }
  return rec;
}

std::vector<RunRecord> run_once(const ExperimentConfig& cfg, int run) {
  std::vector<RunRecord> out;
  RunData rd;
  try {
    rd = make_run_data(cfg, run);
  } catch (const Error& err) {
    const double h = cfg.h > 0.0 ? cfg.h : std::nan("");
    for (Estimator e : cfg.estimators) out.push_back(failed(run, e, RunStatus::Crash, h, err.what()));
    return out;
  }
  const CtModeld& g0 = rd.system;
  const double h = rd.h;
  const VectorXd& u = rd.data.u;
  const VectorXd& y0 = rd.y_clean;
  const SampledDataset& data = rd.data;
  const int n = g0.order();
  const int r = cfg.r > 0 ? cfg.r : g0.relative_degree();

  auto fail_all = [&](RunStatus status, const std::string& detail) {
    for (Estimator e : cfg.estimators) out.push_back(failed(run, e, status, h, detail));
    return out;
  };

  EstimationResult fit;
  CtModeld pem_ct;
  try {
    const OeOrders orders = OeOrders::full(n);
    fit = oe_fit(data, orders, init_multirate(data, orders));
    pem_ct = d2c_zoh(fit.model);
  } catch (const Error& err) {
    return fail_all(err.code() == Errc::NonPrincipalLog ? RunStatus::NegativeRealPole
                                                        : RunStatus::Crash,
                    err.what());
  } catch (const std::exception& err) {
    return fail_all(RunStatus::Crash, err.what());
  }

  for (Estimator e : cfg.estimators) {
    if (e == Estimator::PEM) {
      out.push_back(scored(run, e, h, pem_ct, g0, predict(fit.model, u), y0));
      continue;
    }
    try {
      PemrdOptions options;
      options.jacobian_point = cfg.jacobian_point;
      const PemrdResult rd = pemrd_from_fit(fit, r, options);
      const CtModeld model = rd.model();
      out.push_back(scored(run, e, h, model, g0, zoh_response(model, u, h), y0));
    } catch (const std::exception& err) {
      out.push_back(failed(run, e, RunStatus::Crash, h, err.what()));
    }
  }
  return out;
}

Aggregate aggregate_for(Estimator e, const std::vector<RunRecord>& records) {
  Aggregate agg;
  agg.estimator = e;
  std::vector<double> g, t, f;
  std::vector<const VectorXd*> thetas;
  for (const auto& rec : records) {
    if (rec.estimator != e) continue;
    if (rec.status != RunStatus::Ok) {
      ++agg.failures[rec.status];
      continue;
    }
    ++agg.successes;
    g.push_back(rec.metrics.mse_g);
    t.push_back(rec.metrics.mse_theta);
    f.push_back(rec.metrics.fit);
    thetas.push_back(&rec.theta_c);
  }
  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  agg.mean = {mean(g), mean(t), mean(f)};
  agg.median = {median(g), median(t), median(f)};
  if (!thetas.empty()) {
    const Eigen::Index p = thetas.front()->size();
    agg.theta_mean = VectorXd::Zero(p);
    for (const VectorXd* th : thetas) agg.theta_mean += *th;
    agg.theta_mean /= static_cast<double>(thetas.size());
    agg.theta_std = VectorXd::Zero(p);
    if (thetas.size() > 1) {
      for (const VectorXd* th : thetas) agg.theta_std += (*th - agg.theta_mean).cwiseAbs2();
      agg.theta_std = (agg.theta_std / static_cast<double>(thetas.size() - 1)).cwiseSqrt();
    }
  }
  return agg;
}

}  // namespace

RunData make_run_data(const ExperimentConfig& cfg, int run) {
  const std::uint64_t run_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(run) + 1);
  RunData rd;
  std::mt19937_64 system_rng(derive_seed(run_seed, 1));
  rd.system = cfg.system ? *cfg.system : gen_random_system(cfg.random, system_rng);
  rd.h = cfg.h > 0.0 ? cfg.h
                     : 2.0 * std::numbers::pi / (10.0 * max_natural_frequency(rd.system));
  // A fixed system keeps one input for the whole study.
  const std::uint64_t input_seed = cfg.system ? derive_seed(cfg.seed, 0) : derive_seed(run_seed, 2);
  const VectorXd u = make_input(cfg.input, cfg.N, rd.h, input_seed);
  rd.y_clean = zoh_response(rd.system, u, rd.h);
  switch (cfg.noise.kind) {
    case NoiseLevel::Kind::SnrDb: rd.sigma = sigma_for_snr(rd.y_clean, cfg.noise.value); break;
    case NoiseLevel::Kind::Sigma: rd.sigma = cfg.noise.value; break;
    case NoiseLevel::Kind::MaxFraction:
      rd.sigma = cfg.noise.value * rd.y_clean.cwiseAbs().maxCoeff();
      break;
  }
  rd.noise_seed = derive_seed(run_seed, 3);
  rd.data = SampledDataset(u, rd.y_clean + white_noise({rd.sigma, rd.noise_seed}, u.size()), rd.h);
  return rd;
}

McReport run_monte_carlo(const ExperimentConfig& config) {
  config.validate();
  McReport report;
  report.config = config;
  report.seed = config.seed;

  std::vector<std::vector<RunRecord>> results(static_cast<std::size_t>(config.M));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < config.M; i = next++) {
      results[static_cast<std::size_t>(i)] = run_once(config, i);
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int threads = std::min(config.M, config.threads > 0 ? config.threads : static_cast<int>(hw));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (auto& run : results) {
    for (auto& rec : run) report.per_run.push_back(std::move(rec));
  }
  for (Estimator e : config.estimators) report.aggregate.push_back(aggregate_for(e, report.per_run));
  return report;
}

}  // namespace ctid
