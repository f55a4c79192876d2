#include "scatterlab/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "scatterlab/io.hpp"

namespace scatterlab::experiment {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::system_clock;

std::string timestamp() {
  const auto now = Clock::now();
  const std::time_t t = Clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string trial_stem(int trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%04d", trial);
  return buf;
}

ls::SourceSpec make_source(const config::ExperimentConfig& c, const Grid& grid, const SeedSpec& seed,
                           const std::filesystem::path& out, TrialRecord& rec) {
  if (c.source.kind == config::SourceKind::Point) {
    const int ncomp = c.problem == config::ProblemKind::Acoustic ? 1 : c.dim;
    return ls::SourceSpec::point_source(c.source.location, {c.source.amplitude.data(), static_cast<std::size_t>(ncomp)});
  }
  FieldSample f = fields::sample_medium(c.source_spec(), grid, derive_stream(seed, "source", 0));
  const std::string name = trial_stem(rec.trial) + "_source.rwf";
  io::write_field(out / name, f);
  rec.files.push_back(name);
  return ls::SourceSpec::random_field(std::move(f));
}

template <class Problem>
ls::SolveReport solve(const Problem& problem, const config::SolverConfig& s) {
  switch (s.method) {
    case ls::SolveMethod::Gmres: return ls::solve_gmres(problem, s.gmres);
    case ls::SolveMethod::Born: return ls::solve_born(problem, s.born_terms);
    case ls::SolveMethod::Dense: return ls::solve_dense_oracle(problem);
  }
  return ls::solve_gmres(problem, s.gmres);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
}

}  // namespace

SeedSpec trial_seed(const config::ExperimentConfig& config, int trial) {
  return derive_stream(SeedSpec{config.base_seed, 0}, "trial", static_cast<std::uint64_t>(trial));
}

TrialRecord run_trial(const config::ExperimentConfig& c, int trial, const std::filesystem::path& out) {
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = trial_seed(c, trial);
  rec.started_at = timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Grid grid = c.grid();
    FieldSample medium = fields::sample_medium(c.medium_spec(), grid, derive_stream(rec.seed, "medium", 0));
    const std::string medium_name = trial_stem(trial) + "_medium.rwf";
    io::write_field(out / medium_name, medium);
    rec.files.push_back(medium_name);
    ls::SourceSpec source = make_source(c, grid, rec.seed, out, rec);

    ls::SolveReport report;
    if (c.problem == config::ProblemKind::Acoustic) {
      const ls::AcousticProblem problem{grid, c.k, std::move(medium), std::move(source)};
      report = solve(problem, c.solver);
    } else {
      const ls::ElasticProblem problem{grid, c.elastic_params(), std::move(medium), std::move(source)};
      report = solve(problem, c.solver);
    }
    rec.iterations = report.iterations;
    rec.final_residual = report.final_residual;
    const std::string solution_name = trial_stem(trial) + "_solution.rwf";
    io::write_field(out / solution_name, report.u);
    rec.files.push_back(solution_name);
    rec.ok = true;

    try {
      std::optional<Point> y;
      if (c.source.kind == config::SourceKind::Point) y = c.source.location;
      rec.estimate = regularity::estimate(report.u, y);
      if (c.medium.order > c.dim - 1 && c.medium.order <= c.dim) {
        const auto window = regularity::admissible_window(c.dim, c.medium.order);
        rec.verdict = std::string(regularity::to_string(regularity::consistency_check(*rec.estimate, window, c.margin)));
      }
    } catch (const Error& e) {
      rec.estimate.reset();
      rec.estimate_error = e.what();
    }
  } catch (const Error& e) {
    rec.ok = false;
    rec.error_kind = std::string(to_string(e.kind()));
    rec.error_message = e.what();
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error_kind = "Runtime";
    rec.error_message = e.what();
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.finished_at = timestamp();
  return rec;
}

std::vector<std::string> estimate_header() {
  return {"trial",           "stream",      "status",          "iterations", "final_residual",
          "spectral_order_hat", "sobolev_sup_hat", "holder_hat", "r_squared",  "band_lo",
          "band_hi",         "verdict",     "error"};
}

std::vector<std::string> estimate_row(const TrialRecord& r) {
  std::vector<std::string> row{std::to_string(r.trial), std::to_string(r.seed.stream), r.ok ? "ok" : "failed",
                               std::to_string(r.iterations), io::format_double(r.final_residual)};
  if (r.estimate) {
    const auto& e = *r.estimate;
    for (double v : {e.spectral_order_hat, e.sobolev_sup_hat, e.holder_hat, e.r_squared, e.fit_band.lo, e.fit_band.hi}) {
      row.push_back(io::format_double(v));
    }
  } else {
    row.insert(row.end(), 6, "");
  }
  row.push_back(r.ok ? r.verdict : "excluded");
  row.push_back(r.ok ? r.estimate_error : r.error_kind + ": " + r.error_message);
  return row;
}

std::string RunManifest::to_json() const {
  json j;
  j["version"] = version;
  j["config"] = config_ini;
  j["workers"] = workers;
  j["timestamps"] = {{"started", started_at}, {"finished", finished_at}};
  json trials_json = json::array();
  for (const auto& t : trials) {
    json tj;
    tj["trial"] = t.trial;
    tj["seed"] = {{"base_seed", t.seed.base_seed}, {"stream", t.seed.stream}};
    tj["status"] = t.ok ? "ok" : "failed";
    if (!t.ok) tj["error"] = {{"kind", t.error_kind}, {"message", t.error_message}};
    tj["files"] = t.files;
    tj["iterations"] = t.iterations;
    tj["final_residual"] = t.final_residual;
    tj["verdict"] = t.verdict;
    tj["timestamps"] = {{"started", t.started_at}, {"finished", t.finished_at}, {"wall_time", t.wall_time}};
    trials_json.push_back(std::move(tj));
  }
  j["trials"] = std::move(trials_json);
  return j.dump(2) + "\n";
}

RunManifest run_experiment(const config::ExperimentConfig& c, int workers) {
  const std::filesystem::path out = c.output;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + out.string() + ": " + ec.message());

  RunManifest m;
  m.config_ini = config::to_ini(c);
  m.workers = std::max(1, std::min(workers, c.trials));
  m.started_at = timestamp();
  m.trials.resize(static_cast<std::size_t>(c.trials));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < c.trials; t = next++) m.trials[static_cast<std::size_t>(t)] = run_trial(c, t, out);
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < m.workers; ++w) pool.emplace_back(worker);
    worker();
  }
  m.finished_at = timestamp();

  std::vector<io::CsvRow> rows;
  for (const auto& t : m.trials) rows.push_back(estimate_row(t));
  io::write_csv(out / "estimates.csv", estimate_header(), rows);

  std::vector<double> order, sobolev, holder, r2;
  int ok = 0, counts[4] = {0, 0, 0, 0};
  for (const auto& t : m.trials) {
    if (!t.ok) continue;
    ++ok;
    if (t.estimate) {
      order.push_back(t.estimate->spectral_order_hat);
      sobolev.push_back(t.estimate->sobolev_sup_hat);
      holder.push_back(t.estimate->holder_hat);
      r2.push_back(t.estimate->r_squared);
    }
    if (t.verdict == "consistent") {
      ++counts[0];
    } else if (t.verdict == "inconsistent") {
      ++counts[1];
    } else if (t.verdict == "inconclusive") {
      ++counts[2];
    } else {
      ++counts[3];
    }
  }
  std::vector<io::CsvRow> agg;
  agg.push_back({"trials", std::to_string(c.trials)});
  agg.push_back({"trials_ok", std::to_string(ok)});
  agg.push_back({"trials_excluded", std::to_string(c.trials - ok)});
  agg.push_back({"estimates", std::to_string(order.size())});
  auto stat = [&](const char* name, const std::vector<double>& v) {
    agg.push_back({std::string("mean_") + name, io::format_double(mean_of(v))});
    agg.push_back({std::string("stddev_") + name, io::format_double(stddev_of(v))});
  };
  stat("spectral_order_hat", order);
  stat("sobolev_sup_hat", sobolev);
  stat("holder_hat", holder);
  stat("r_squared", r2);
  agg.push_back({"consistent", std::to_string(counts[0])});
  agg.push_back({"inconsistent", std::to_string(counts[1])});
  agg.push_back({"inconclusive", std::to_string(counts[2])});
  agg.push_back({"not_applicable", std::to_string(counts[3])});
  io::write_csv(out / "aggregate.csv", {"statistic", "value"}, agg);

  write_text(out / "manifest.json", m.to_json());
  return m;
}

int resolve_workers(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw Error(ErrorKind::ConfigInvalid, "--workers must be at least 1");
    return *flag;
  }
  if (const char* env = std::getenv("SCATTERLAB_WORKERS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw Error(ErrorKind::ConfigInvalid, "SCATTERLAB_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  return 1;
}

config::ExperimentConfig config_from_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorKind::ConfigInvalid, manifest.string() + ": cannot open manifest");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, manifest.string() + ": " + e.what());
  }
  if (!j.contains("config") || !j["config"].is_string()) {
    throw Error(ErrorKind::ConfigInvalid, manifest.string() + ": manifest has no config echo");
  }
  return config::parse(j["config"].get<std::string>(), manifest.string() + "#config");
}

}  // namespace scatterlab::experiment
