#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ctid/io.hpp"

namespace fs = std::filesystem;
using namespace ctid;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kAllFailed = 2 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

template <typename Writer>
void write_file(const fs::path& dir, const std::string& name, Writer&& write) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / name);
  if (!out) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  write(out);
}

void write_json(const fs::path& dir, const std::string& name, const Json& j) {
  write_file(dir, name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  Json j = read_json(path);
  if (seed) j["seed"] = *seed;
  return config_from_json(j);
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const fs::path& out) {
  ExperimentConfig cfg = load_config(config_path, seed);
  const RunData rd = make_run_data(cfg, 0);
  write_file(out, "dataset.csv", [&](std::ostream& os) { write_dataset_csv(os, rd.data); });
  write_json(out, "dataset.json", dataset_sidecar(rd.data, rd.sigma, cfg.seed, rd.system));
  std::cout << "wrote " << rd.data.size() << " samples to " << (out / "dataset.csv").string()
            << '\n';
  return kOk;
}

int cmd_fit(const std::string& data_path, int order, std::optional<double> h,
            const fs::path& out) {
  std::ifstream in(data_path);
  if (!in) throw ConfigError("cannot open '" + data_path + "'");
  const SampledDataset data = read_dataset_csv(in, h);
  const OeOrders orders = OeOrders::full(order);
  EstimationResult fit = oe_fit(data, orders, init_multirate(data, orders));
  try {
    fit.covariance = dt_covariance(fit, data.u);
  } catch (const Error& e) {
    std::cerr << "warning: " << e.what() << '\n';
  }
  write_json(out, "fit.json", fit_report_to_json(fit));
  std::cout << "cost " << fit.cost << ", iterations " << fit.iterations
            << (fit.converged ? ", converged\n" : ", not converged\n");
  return kOk;
}

int cmd_project(const std::string& fit_path, int r, const std::string& point,
                const fs::path& out) {
  const EstimationResult fit = fit_report_from_json(read_json(fit_path));
  PemrdOptions options;
  options.jacobian_point = point == "full" ? JacobianPoint::Full : JacobianPoint::Truncated;
  try {
    const PemrdResult result = pemrd_from_fit(fit, r, options);
    write_json(out, "pemrd.json", pemrd_to_json(result));
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument) throw;
    write_json(out, "pemrd.json", pemrd_discarded_json(r, e.what()));
    std::cerr << "discarded: " << e.what() << '\n';
    return kAllFailed;
  }
  return kOk;
}

int cmd_montecarlo(const std::string& config_path, std::optional<std::uint64_t> seed,
                   const fs::path& out) {
  const ExperimentConfig cfg = load_config(config_path, seed);
  const McReport report = run_monte_carlo(cfg);
  write_file(out, "report.csv", [&](std::ostream& os) { write_report_csv(os, report); });
  write_file(out, "aggregate.csv", [&](std::ostream& os) { write_aggregate_csv(os, report); });
  write_json(out, "report.json", report_to_json(report));
  for (const auto& a : report.aggregate) {
    std::cout << to_string(a.estimator) << ": " << a.successes << " ok, " << a.failure_count()
              << " failed, mean fit " << a.mean.fit << ", mean mse_g " << a.mean.mse_g
              << ", median mse_g " << a.median.mse_g << '\n';
  }
  return report.all_failed() ? kAllFailed : kOk;
}

int cmd_bode(const std::string& model_path, double wmin, double wmax, int points,
             const fs::path& out) {
  if (!(wmin > 0.0 && wmax > wmin && points >= 2)) {
    throw ConfigError("grid needs 0 < wmin < wmax and at least 2 points");
  }
  const Json j = read_json(model_path);
  VectorXd omega(points);
  for (int k = 0; k < points; ++k) {
    omega(k) = wmin * std::pow(wmax / wmin, static_cast<double>(k) / (points - 1));
  }
  ComplexVector<double> response;
  if (j.contains("h")) {
    const DtModeld model(Polynomiald(vector_from_json(j.at("num"))),
                         Polynomiald(vector_from_json(j.at("den"))), j.at("h").get<double>());
    response = freq_response(model, omega);
  } else {
    response = freq_response(ct_model_from_json(j), omega);
  }
  write_file(out, "bode.csv", [&](std::ostream& os) { write_bode_csv(os, omega, response); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time transfer function identification from sampled data"};
  app.require_subcommand(1);

  std::string config_path, data_path, fit_path, model_path, point = "truncated";
  std::optional<std::uint64_t> seed;
  std::optional<double> h;
  std::string out_dir = ".";
  int order = 0, r = 0, points = 200;
  double wmin = 0.01, wmax = 100.0;

  auto* sim = app.add_subcommand("simulate", "system + input + noise -> dataset.csv");
  sim->add_option("--config", config_path, "experiment config JSON")->required();
  sim->add_option("--seed", seed, "override the config seed");
  sim->add_option("--out", out_dir, "output directory");

  auto* fit = app.add_subcommand("fit", "dataset.csv -> fit.json (output-error PEM)");
  fit->add_option("--data", data_path, "dataset CSV (k,t,u,y)")->required();
  fit->add_option("--order", order, "model order n")->required()->check(CLI::Range(1, 64));
  fit->add_option("--period", h, "sampling period; default from the t column");
  fit->add_option("--out", out_dir, "output directory");

  auto* proj = app.add_subcommand("project", "fit.json + r -> pemrd.json");
  proj->add_option("--fit", fit_path, "fit report JSON")->required();
  proj->add_option("--r", r, "enforced relative degree")->required()->check(CLI::PositiveNumber);
  proj->add_option("--jacobian-point", point, "truncated or full")
      ->check(CLI::IsMember({"truncated", "full"}));
  proj->add_option("--out", out_dir, "output directory");

  auto* mc = app.add_subcommand("montecarlo", "config JSON -> report CSV + JSON");
  mc->add_option("--config", config_path, "experiment config JSON")->required();
  mc->add_option("--seed", seed, "override the config seed");
  mc->add_option("--out", out_dir, "output directory");

  auto* bode = app.add_subcommand("bode", "model JSON + grid -> bode.csv");
  bode->add_option("--model", model_path, "model JSON {num, den[, h]}")->required();
  bode->add_option("--wmin", wmin, "lowest frequency, rad/s");
  bode->add_option("--wmax", wmax, "highest frequency, rad/s");
  bode->add_option("--points", points, "log-spaced grid size");
  bode->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) return cmd_simulate(config_path, seed, out_dir);
    if (*fit) return cmd_fit(data_path, order, h, out_dir);
    if (*proj) return cmd_project(fit_path, r, point, out_dir);
    if (*mc) return cmd_montecarlo(config_path, seed, out_dir);
    if (*bode) return cmd_bode(model_path, wmin, wmax, points, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == Errc::InvalidArgument || e.code() == Errc::MalformedModel ||
                   e.code() == Errc::UnsupportedRegisterLength ||
                   e.code() == Errc::AliasedFrequency
               ? kConfigError
               : kAllFailed;
  }
  return kOk;
}
