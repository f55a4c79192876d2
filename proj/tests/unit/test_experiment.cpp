#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "helpers.hpp"
#include "scatterlab/experiment.hpp"
#include "scatterlab/validation.hpp"
#include "scatterlab/specfun.hpp"

using namespace scatterlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

config::ExperimentConfig small_config(const fs::path& out) {
  auto c = config::parse("[problem]\nk = 4\n[grid]\nn = 32\n[source]\nlocation = 0.51 0.52\n[run]\ntrials = 4\nbase_seed = 3\n");
  c.output = out.string();
  return c;
}

class Scratch : public ::testing::Test {
 protected:
  fs::path dir = fs::temp_directory_path() / ("scatterlab_exp_" + std::to_string(::getpid()));
  void TearDown() override { fs::remove_all(dir); }
};

}  // namespace

TEST_F(Scratch, OutputsIndependentOfWorkerCount) {
  const auto a = experiment::run_experiment(small_config(dir / "a"), 1);
  const auto b = experiment::run_experiment(small_config(dir / "b"), 3);
  EXPECT_EQ(b.workers, 3);
  EXPECT_EQ(slurp(dir / "a" / "estimates.csv"), slurp(dir / "b" / "estimates.csv"));
  EXPECT_EQ(slurp(dir / "a" / "aggregate.csv"), slurp(dir / "b" / "aggregate.csv"));
  for (int t = 0; t < 4; ++t) {
    EXPECT_TRUE(a.trials[t].ok);
    EXPECT_EQ(a.trials[t].seed, b.trials[t].seed);
    EXPECT_EQ(slurp(dir / "a" / a.trials[t].files.back()), slurp(dir / "b" / b.trials[t].files.back()));
  }
  EXPECT_NE(a.trials[0].seed, a.trials[1].seed);
}

TEST_F(Scratch, ManifestEchoesConfig) {
  const auto c = small_config(dir / "m");
  experiment::run_experiment(c, 1);
  const auto back = experiment::config_from_manifest(dir / "m" / "manifest.json");
  EXPECT_EQ(config::to_ini(back), config::to_ini(c));
  const std::string manifest = slurp(dir / "m" / "manifest.json");
  EXPECT_NE(manifest.find(experiment::kVersion), std::string::npos);
}

TEST_F(Scratch, FailedTrialsAreRecorded) {
  auto c = small_config(dir / "f");
  c.trials = 2;
  c.solver.gmres = {1e-13, 1, 1};
  const auto m = experiment::run_experiment(c, 1);
  for (const auto& t : m.trials) {
    EXPECT_FALSE(t.ok);
    EXPECT_EQ(t.error_kind, "SolverDiverged");
  }
  EXPECT_NE(slurp(dir / "f" / "aggregate.csv").find("trials_excluded,2"), std::string::npos);
}

TEST(Workers, FlagThenEnvironmentThenOne) {
  ::unsetenv("SCATTERLAB_WORKERS");
  EXPECT_EQ(experiment::resolve_workers(std::nullopt), 1);
  ::setenv("SCATTERLAB_WORKERS", "3", 1);
  EXPECT_EQ(experiment::resolve_workers(std::nullopt), 3);
  EXPECT_EQ(experiment::resolve_workers(2), 2);
  ::setenv("SCATTERLAB_WORKERS", "zero", 1);
  test::expect_error(ErrorKind::ConfigInvalid, [] { experiment::resolve_workers(std::nullopt); });
  ::unsetenv("SCATTERLAB_WORKERS");
  test::expect_error(ErrorKind::ConfigInvalid, [] { experiment::resolve_workers(0); });
}

TEST(Validation, DetectsInjectedFault) {
  EXPECT_TRUE(validation::run_criterion(1, validation::Level::Quick).passed);
  specfun::testing::inject_coefficient_fault(true);
  const auto r = validation::run_criterion(1, validation::Level::Quick);
  specfun::testing::inject_coefficient_fault(false);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(validation::format(r).rfind("FAIL [1]", 0), 0u);
}
