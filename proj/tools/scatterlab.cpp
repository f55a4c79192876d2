// scatterlab command-line front end.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error, 3 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "scatterlab/config.hpp"
#include "scatterlab/experiment.hpp"
#include "scatterlab/io.hpp"
#include "scatterlab/random_fields.hpp"
#include "scatterlab/regularity.hpp"
#include "scatterlab/specfun.hpp"
#include "scatterlab/validation.hpp"

namespace fs = std::filesystem;
using namespace scatterlab;

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kConfigError = 2, kRuntimeError = 3 };

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> trials;
  std::optional<int> workers;
};

void add_common(CLI::App* app, CommonOptions& o, bool trials) {
  app->add_option("--config", o.config, "experiment configuration file");
  app->add_option("--seed", o.seed, "base seed (overrides [run] base_seed)");
  app->add_option("--out", o.out, "output directory (overrides [run] output)");
  if (trials) {
    app->add_option("--trials", o.trials, "number of trials (overrides [run] trials)")->check(CLI::PositiveNumber);
    app->add_option("--workers", o.workers, "worker threads (default: SCATTERLAB_WORKERS or 1)");
  }
}

config::ExperimentConfig load_config(const CommonOptions& o) {
  config::ExperimentConfig c = o.config.empty() ? config::parse("", "<defaults>") : config::load(o.config);
  if (o.seed) c.base_seed = *o.seed;
  if (!o.out.empty()) c.output = o.out;
  if (o.trials) c.trials = *o.trials;
  return c;
}

fs::path prepare_output(const std::string& dir) {
  fs::path p = dir;
  fs::create_directories(p);
  return p;
}

void print_estimate_csv(std::ostream& os, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

int cmd_sample_field(const CommonOptions& o) {
  const auto c = load_config(o);
  const fs::path out = prepare_output(c.output);
  const SeedSpec seed = derive_stream(experiment::trial_seed(c, 0), "medium", 0);
  const FieldSample f = fields::sample_medium(c.medium_spec(), c.grid(), seed);
  io::write_field(out / "medium.rwf", f);
  std::cout << "wrote " << (out / "medium.rwf").string() << "\n";
  try {
    const auto e = regularity::estimate(f);
    std::cout << "spectral_order_hat=" << io::format_double(e.spectral_order_hat)
              << " holder_hat=" << io::format_double(e.holder_hat) << " r_squared=" << io::format_double(e.r_squared)
              << "\n";
  } catch (const Error& e) {
    std::cout << "estimate unavailable: " << e.what() << "\n";
  }
  return kOk;
}

int cmd_solve(const CommonOptions& o, config::ProblemKind kind) {
  const auto c = load_config(o);
  if (c.problem != kind) {
    throw Error(ErrorKind::ConfigInvalid, (o.config.empty() ? std::string("<defaults>") : o.config) +
                                              ": [problem] kind does not match the subcommand");
  }
  const fs::path out = prepare_output(c.output);
  const auto rec = experiment::run_trial(c, 0, out);
  io::write_csv(out / "estimates.csv", experiment::estimate_header(), {experiment::estimate_row(rec)});
  for (const auto& f : rec.files) std::cout << "wrote " << (out / f).string() << "\n";
  if (!rec.ok) {
    std::cerr << "solve failed: " << rec.error_kind << ": " << rec.error_message << "\n";
    return kRuntimeError;
  }
  std::cout << "iterations=" << rec.iterations << " final_residual=" << io::format_double(rec.final_residual)
            << " verdict=" << rec.verdict << "\n";
  return kOk;
}

int cmd_estimate(const std::string& file, const std::vector<double>& exclude, const std::string& out) {
  const FieldSample f = io::read_field(file);
  std::optional<Point> y;
  if (!exclude.empty()) {
    if (static_cast<int>(exclude.size()) != f.grid().dim()) {
      throw Error(ErrorKind::ConfigInvalid, "--exclude needs one coordinate per dimension");
    }
    Point p{};
    for (std::size_t i = 0; i < exclude.size(); ++i) p[i] = exclude[i];
    y = p;
  }
  const auto e = regularity::estimate(f, y);
  const std::vector<std::string> header{"file", "spectral_order_hat", "sobolev_sup_hat", "holder_hat", "r_squared",
                                        "band_lo", "band_hi"};
  const std::vector<std::string> row{file,
                                     io::format_double(e.spectral_order_hat),
                                     io::format_double(e.sobolev_sup_hat),
                                     io::format_double(e.holder_hat),
                                     io::format_double(e.r_squared),
                                     io::format_double(e.fit_band.lo),
                                     io::format_double(e.fit_band.hi)};
  print_estimate_csv(std::cout, header, {row});
  if (!out.empty()) io::write_csv(prepare_output(out) / "estimate.csv", header, {row});
  return kOk;
}

int cmd_mc_run(const CommonOptions& o, const std::string& manifest) {
  config::ExperimentConfig c;
  if (!manifest.empty()) {
    if (!o.config.empty()) throw Error(ErrorKind::ConfigInvalid, "--config and --manifest are exclusive");
    c = experiment::config_from_manifest(manifest);
    if (o.seed) c.base_seed = *o.seed;
    if (!o.out.empty()) c.output = o.out;
    if (o.trials) c.trials = *o.trials;
  } else {
    c = load_config(o);
  }
  const int workers = experiment::resolve_workers(o.workers);
  const auto m = experiment::run_experiment(c, workers);
  int failed = 0;
  for (const auto& t : m.trials) failed += t.ok ? 0 : 1;
  std::cout << "trials=" << m.trials.size() << " failed=" << failed << " workers=" << m.workers
            << " output=" << c.output << "\n";
  return kOk;
}

int cmd_validate(const std::string& level, const std::vector<int>& only, bool fault) {
  const auto lv = level == "full" ? validation::Level::Full : validation::Level::Quick;
  specfun::testing::inject_coefficient_fault(fault);
  std::vector<int> ids = only;
  if (ids.empty()) {
    for (int id = 1; id <= validation::kCriterionCount; ++id) ids.push_back(id);
  }
  int failed = 0;
  for (int id : ids) {
    const auto r = validation::run_criterion(id, lv);
    std::cout << validation::format(r) << std::endl;
    failed += r.passed ? 0 : 1;
  }
  std::cout << ids.size() - failed << "/" << ids.size() << " criteria passed\n";
  specfun::testing::inject_coefficient_fault(false);
  return failed == 0 ? kOk : kValidationFailed;
}

int cmd_info(const std::string& file) {
  std::cout << io::describe(io::read_header(file));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-media scattering experiments: sampling, Lippmann-Schwinger solves, regularity estimates"};
  app.require_subcommand(1);

  CommonOptions sample_opts, acoustic_opts, elastic_opts, mc_opts;
  auto* sample = app.add_subcommand("sample-field", "sample the configured medium and write it as RWF1");
  add_common(sample, sample_opts, false);
  auto* acoustic = app.add_subcommand("solve-acoustic", "solve one acoustic trial");
  add_common(acoustic, acoustic_opts, false);
  auto* elastic = app.add_subcommand("solve-elastic", "solve one elastic trial");
  add_common(elastic, elastic_opts, false);

  std::string est_file, est_out;
  std::vector<double> est_exclude;
  auto* estimate = app.add_subcommand("estimate-regularity", "estimate smoothness exponents of an RWF1 field");
  estimate->add_option("file", est_file, "RWF1 field")->required();
  estimate->add_option("--exclude", est_exclude, "point-source location to cut out (8h ball)");
  estimate->add_option("--out", est_out, "directory for estimate.csv");

  std::string manifest;
  auto* mc = app.add_subcommand("mc-run", "Monte Carlo run over independent trials");
  add_common(mc, mc_opts, true);
  mc->add_option("--manifest", manifest, "re-run the configuration recorded in a manifest");

  std::string level = "quick";
  std::vector<int> only;
  bool fault = false;
  auto* validate = app.add_subcommand("validate", "run the acceptance criteria");
  validate->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  validate->add_option("--criterion", only, "run only these criteria")->check(CLI::Range(1, 12));
  validate->add_flag("--inject-fault", fault, "corrupt a special-function coefficient (self-test)");

  std::string info_file;
  auto* info = app.add_subcommand("info", "print the header of an RWF1 field");
  info->add_option("file", info_file, "RWF1 field")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sample) return cmd_sample_field(sample_opts);
    if (*acoustic) return cmd_solve(acoustic_opts, config::ProblemKind::Acoustic);
    if (*elastic) return cmd_solve(elastic_opts, config::ProblemKind::Elastic);
    if (*estimate) return cmd_estimate(est_file, est_exclude, est_out);
    if (*mc) return cmd_mc_run(mc_opts, manifest);
    if (*validate) return cmd_validate(level, only, fault);
    if (*info) return cmd_info(info_file);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigInvalid ? kConfigError : kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
