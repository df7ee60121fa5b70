#include "ctid/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ctid {

namespace {

Errc constexpr kConfig = Errc::InvalidArgument;

const Json& field(const Json& j, const char* key) {
  require(j.is_object() && j.contains(key), kConfig, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T value_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    raise(kConfig, std::string("field '") + key + "': " + e.what());
  }
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string csv_number(double x) { return std::isfinite(x) ? format_double(x) : "nan"; }

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Json to_json(const VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v(i)));
  return out;
}

Json to_json_row_major(const MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(number_or_null(m(i, j)));
  }
  return out;
}

VectorXd vector_from_json(const Json& j) {
  require(j.is_array(), kConfig, "expected a JSON array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), kConfig, "expected a finite number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    require(std::isfinite(v(static_cast<Eigen::Index>(i))), kConfig, "expected a finite number");
  }
  return v;
}

MatrixXd matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  const VectorXd flat = vector_from_json(j);
  require(flat.size() == rows * cols, kConfig, "matrix has the wrong number of entries");
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = flat(i * cols + k);
  }
  return m;
}

Json to_json(const CtModeld& model) {
  return Json{{"num", to_json(model.num().coeffs())},
              {"den", to_json(model.den().coeffs())},
              {"relative_degree", model.relative_degree()}};
}

CtModeld ct_model_from_json(const Json& j) {
  if (j.is_object() && j.contains("preset")) {
    require(j.at("preset") == "rao-garnier", kConfig, "unknown system preset");
    return rao_garnier();
  }
  const VectorXd num = vector_from_json(field(j, "num"));
  const VectorXd den = vector_from_json(field(j, "den"));
  try {
    return CtModeld(Polynomiald(num), Polynomiald(den), value_or<int>(j, "relative_degree", 0));
  } catch (const Error& e) {
    raise(kConfig, e.what());
  }
}

CtModeld rao_garnier() {
  return CtModeld(Polynomiald{-6400.0, 1600.0}, Polynomiald{1.0, 5.0, 408.0, 416.0, 1600.0});
}

void write_dataset_csv(std::ostream& os, const SampledDataset& data) {
  os << "k,t,u,y\n";
  for (Eigen::Index k = 0; k < data.size(); ++k) {
    os << k << ',' << format_double(static_cast<double>(k) * data.h) << ','
       << format_double(data.u(k)) << ',' << format_double(data.y(k)) << '\n';
  }
}

SampledDataset read_dataset_csv(std::istream& is, std::optional<double> h) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), kConfig, "empty dataset file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "k,t,u,y", kConfig, "dataset header must be 'k,t,u,y'");
  std::vector<double> t, u, y;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    double row[4];
    for (double& v : row) {
      require(static_cast<bool>(std::getline(ss, cell, ',')), kConfig, "short dataset row");
      try {
        v = std::stod(cell);
      } catch (const std::exception&) {
        raise(kConfig, "bad number '" + cell + "' in dataset");
      }
    }
    t.push_back(row[1]);
    u.push_back(row[2]);
    y.push_back(row[3]);
  }
  require(!u.empty(), kConfig, "dataset has no rows");
  double period = h.value_or(0.0);
  if (!h) {
    require(t.size() >= 2, kConfig, "cannot infer h from a single sample");
    period = t[1] - t[0];
  }
  return SampledDataset(Eigen::Map<VectorXd>(u.data(), static_cast<Eigen::Index>(u.size())),
                        Eigen::Map<VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())),
                        period);
}

Json dataset_sidecar(const SampledDataset& data, double sigma, std::uint64_t seed,
                     const CtModeld& system) {
  return Json{{"h", data.h},
              {"N", data.size()},
              {"sigma", sigma},
              {"seed", seed},
              {"system", to_json(system)}};
}

Json fit_report_to_json(const EstimationResult& result) {
  return Json{{"theta_d", to_json(result.model.theta())},
              {"h", result.model.h()},
              {"sigma2_hat", result.sigma2_hat},
              {"covariance", to_json_row_major(result.covariance)},
              {"cost", result.cost},
              {"iterations", result.iterations},
              {"converged", result.converged}};
}

EstimationResult fit_report_from_json(const Json& j) {
  const VectorXd theta = vector_from_json(field(j, "theta_d"));
  require(theta.size() >= 2 && theta.size() % 2 == 0, kConfig,
          "theta_d must have even length");
  const double h = field(j, "h").get<double>();
  EstimationResult r;
  try {
    r.model = DtModeld::from_theta(theta, h);
  } catch (const Error& e) {
    raise(kConfig, e.what());
  }
  const Eigen::Index p = theta.size();
  r.orders = OeOrders::full(static_cast<int>(p / 2));
  r.sigma2_hat = field(j, "sigma2_hat").get<double>();
  const Json& cov = field(j, "covariance");
  if (cov.size() > 0) r.covariance = matrix_from_json(cov, p, p);
  r.cost = value_or<double>(j, "cost", 0.0);
  r.iterations = value_or<int>(j, "iterations", 0);
  r.converged = value_or<bool>(j, "converged", false);
  return r;
}

Json pemrd_to_json(const PemrdResult& result) {
  return Json{{"theta_tilde_c", to_json(result.theta_tilde_c)},
              {"cov_tilde", to_json_row_major(result.cov_tilde)},
              {"lambda", to_json(result.lambda)},
              {"r", result.r},
              {"diagnostics",
               {{"theta_hat_c", to_json(result.theta_hat_c)},
                {"jacobian_condition", result.jacobian_condition},
                {"path_discrepancy", result.path_discrepancy}}}};
}

Json pemrd_discarded_json(int r, const std::string& reason) {
  return Json{{"theta_tilde_c", Json::array()},
              {"cov_tilde", Json::array()},
              {"lambda", Json::array()},
              {"r", r},
              {"diagnostics", {{"discarded_reason", reason}}}};
}

ExperimentConfig config_from_json(const Json& j) {
  require(j.is_object(), kConfig, "config must be a JSON object");
  ExperimentConfig c;
  const Json& sys = field(j, "system");
  if (sys.contains("random")) {
    const Json& rnd = sys.at("random");
    c.system.reset();
    c.random.order = value_or<int>(rnd, "order", 3);
    c.random.reldeg = value_or<int>(rnd, "reldeg", 2);
    c.random.slowest_pole_bound = value_or<double>(rnd, "slowest_pole", -0.1);
    c.random.fastest_pole_bound = value_or<double>(rnd, "fastest_pole", -50.0);
  } else {
    c.system = ct_model_from_json(sys);
  }

  const Json& in = field(j, "input");
  const std::string type = value_or<std::string>(in, "type", "prbs");
  if (type == "prbs") {
    c.input.kind = InputSpec::Kind::Prbs;
    c.input.n_stages = value_or<int>(in, "n_stages", 10);
    c.input.p = value_or<int>(in, "p", 7);
    c.input.low = value_or<double>(in, "low", 0.0);
    c.input.high = value_or<double>(in, "high", 2.0);
  } else if (type == "multisine") {
    c.input.kind = InputSpec::Kind::Multisine;
    const VectorXd f = vector_from_json(field(in, "freqs"));
    c.input.freqs.assign(f.data(), f.data() + f.size());
    c.input.amplitude = value_or<double>(in, "amplitude", 1.0);
  } else if (type == "white_noise") {
    c.input.kind = InputSpec::Kind::WhiteNoise;
    c.input.variance = value_or<double>(in, "variance", 1.0);
  } else {
    raise(kConfig, "unknown input type '" + type + "'");
  }

  if (j.contains("h") && j.at("h").is_string()) {
    require(j.at("h") == "auto", kConfig, "h must be a number or \"auto\"");
    c.h = 0.0;
  } else {
    c.h = value_or<double>(j, "h", 0.05);
  }
  c.N = value_or<Eigen::Index>(j, "N", 0);

  const Json& noise = field(j, "noise");
  const int levels = static_cast<int>(noise.contains("snr_db")) +
                     static_cast<int>(noise.contains("sigma")) +
                     static_cast<int>(noise.contains("max_fraction"));
  require(levels == 1, kConfig, "noise needs exactly one of snr_db, sigma, max_fraction");
  if (noise.contains("snr_db")) {
    c.noise = {NoiseLevel::Kind::SnrDb, noise.at("snr_db").get<double>()};
  } else if (noise.contains("sigma")) {
    c.noise = {NoiseLevel::Kind::Sigma, noise.at("sigma").get<double>()};
  } else {
    c.noise = {NoiseLevel::Kind::MaxFraction, noise.at("max_fraction").get<double>()};
  }

  c.M = value_or<int>(j, "M", 1);
  c.r = value_or<int>(j, "r", 0);
  c.seed = value_or<std::uint64_t>(j, "seed", 1);
  if (j.contains("estimators")) {
    c.estimators.clear();
    for (const auto& e : j.at("estimators")) c.estimators.push_back(parse_estimator(e.get<std::string>()));
  }
  const std::string point = value_or<std::string>(j, "jacobian_point", "truncated");
  require(point == "truncated" || point == "full", kConfig,
          "jacobian_point must be 'truncated' or 'full'");
  c.jacobian_point = point == "full" ? JacobianPoint::Full : JacobianPoint::Truncated;
  c.threads = value_or<int>(j, "threads", 0);
  c.validate();
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  if (c.system) {
    j["system"] = to_json(*c.system);
  } else {
    j["system"] = {{"random",
                    {{"order", c.random.order},
                     {"reldeg", c.random.reldeg},
                     {"slowest_pole", c.random.slowest_pole_bound},
                     {"fastest_pole", c.random.fastest_pole_bound}}}};
  }
  switch (c.input.kind) {
    case InputSpec::Kind::Prbs:
      j["input"] = {{"type", "prbs"}, {"n_stages", c.input.n_stages}, {"p", c.input.p},
                    {"low", c.input.low}, {"high", c.input.high}};
      break;
    case InputSpec::Kind::Multisine:
      j["input"] = {{"type", "multisine"}, {"freqs", c.input.freqs}, {"amplitude", c.input.amplitude}};
      break;
    case InputSpec::Kind::WhiteNoise:
      j["input"] = {{"type", "white_noise"}, {"variance", c.input.variance}};
      break;
  }
  j["h"] = c.h > 0.0 ? Json(c.h) : Json("auto");
  j["N"] = c.N;
  switch (c.noise.kind) {
    case NoiseLevel::Kind::SnrDb: j["noise"] = {{"snr_db", c.noise.value}}; break;
    case NoiseLevel::Kind::Sigma: j["noise"] = {{"sigma", c.noise.value}}; break;
    case NoiseLevel::Kind::MaxFraction: j["noise"] = {{"max_fraction", c.noise.value}}; break;
  }
  j["M"] = c.M;
  j["r"] = c.r;
  j["seed"] = c.seed;
  j["estimators"] = Json::array();
  for (Estimator e : c.estimators) j["estimators"].push_back(to_string(e));
  j["jacobian_point"] = c.jacobian_point == JacobianPoint::Full ? "full" : "truncated";
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = config_to_json(config).dump();
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void write_report_csv(std::ostream& os, const McReport& report) {
  os << "run,estimator,status,mse_g,mse_theta,fit\n";
  for (const auto& rec : report.per_run) {
    os << rec.run << ',' << to_string(rec.estimator) << ',' << to_string(rec.status) << ','
       << csv_number(rec.metrics.mse_g) << ',' << csv_number(rec.metrics.mse_theta) << ','
       << csv_number(rec.metrics.fit) << '\n';
  }
}

void write_aggregate_csv(std::ostream& os, const McReport& report) {
  os << "estimator,stat,mse_g,mse_theta,fit,failures\n";
  for (const auto& a : report.aggregate) {
    for (const auto& [stat, m] : {std::pair{"mean", a.mean}, std::pair{"median", a.median}}) {
      os << to_string(a.estimator) << ',' << stat << ',' << csv_number(m.mse_g) << ','
         << csv_number(m.mse_theta) << ',' << csv_number(m.fit) << ',' << a.failure_count()
         << '\n';
    }
  }
}

Json report_to_json(const McReport& report) {
  Json runs = Json::array();
  for (const auto& rec : report.per_run) {
    Json r{{"run", rec.run},
           {"estimator", to_string(rec.estimator)},
           {"status", to_string(rec.status)},
           {"h", rec.h},
           {"mse_g", number_or_null(rec.metrics.mse_g)},
           {"mse_theta", number_or_null(rec.metrics.mse_theta)},
           {"fit", number_or_null(rec.metrics.fit)},
           {"theta_c", to_json(rec.theta_c)}};
    if (!rec.detail.empty()) r["detail"] = rec.detail;
    runs.push_back(std::move(r));
  }
  Json aggregates = Json::array();
  for (const auto& a : report.aggregate) {
    Json failures = Json::object();
    for (const auto& [status, count] : a.failures) failures[to_string(status)] = count;
    auto metrics = [](const Metrics& m) {
      return Json{{"mse_g", number_or_null(m.mse_g)},
                  {"mse_theta", number_or_null(m.mse_theta)},
                  {"fit", number_or_null(m.fit)}};
    };
    aggregates.push_back({{"estimator", to_string(a.estimator)},
                          {"successes", a.successes},
                          {"failures", failures},
                          {"mean", metrics(a.mean)},
                          {"median", metrics(a.median)},
                          {"theta_mean", to_json(a.theta_mean)},
                          {"theta_std", to_json(a.theta_std)}});
  }
  return Json{{"seed", report.seed},
              {"config_hash", config_hash(report.config)},
              {"config", config_to_json(report.config)},
              {"aggregate", aggregates},
              {"per_run", runs}};
}

void write_bode_csv(std::ostream& os, const VectorXd& omega, const ComplexVector<double>& response) {
  require(omega.size() == response.size(), Errc::InvalidArgument, "grid/response size mismatch");
  os << "omega,mag_db,phase_deg\n";
  double previous = 0.0;
  double offset = 0.0;
  for (Eigen::Index k = 0; k < omega.size(); ++k) {
    double phase = std::arg(response(k)) * 180.0 / std::numbers::pi;
    if (k > 0) {
      while (phase + offset - previous > 180.0) offset -= 360.0;
      while (phase + offset - previous < -180.0) offset += 360.0;
    }
    previous = phase + offset;
    os << format_double(omega(k)) << ',' << format_double(20.0 * std::log10(std::abs(response(k))))
       << ',' << format_double(previous) << '\n';
  }
}

}  // namespace ctid
