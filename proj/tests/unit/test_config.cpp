#include <string>

#include "helpers.hpp"
#include "scatterlab/config.hpp"

using namespace scatterlab;
using namespace scatterlab::config;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse(text, "t.ini");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = parse("");
  EXPECT_EQ(c.problem, ProblemKind::Acoustic);
  EXPECT_EQ(c.dim, 2);
  EXPECT_EQ(c.grid().size(), 64u * 64u);
  EXPECT_DOUBLE_EQ(c.medium.support.lower[0], 0.25);
  EXPECT_DOUBLE_EQ(c.medium.support.upper[1], 0.75);
  EXPECT_DOUBLE_EQ(c.source.location[0], 0.5);
}

TEST(Config, ParsesAllSections) {
  const auto c = parse(R"(# elastic run
[problem]
kind = elastic
dim = 3
k = 6
lambda = 2
mu = 0.5

[grid]
lower = -1 -1 -1
upper = 1 1 1
n = 16 16 24

[medium]
order = 2.5
amplitude = 0.3

[source]
kind = random
order = 2
strength = 2

[solver]
method = born
born_terms = 12

[run]
trials = 7
base_seed = 99
output = results
margin = 0.2
)");
  EXPECT_EQ(c.problem, ProblemKind::Elastic);
  EXPECT_EQ(c.dim, 3);
  EXPECT_EQ(c.n[2], 24u);
  EXPECT_DOUBLE_EQ(c.medium.support.lower[2], -0.5);
  EXPECT_EQ(c.source.kind, SourceKind::RandomField);
  EXPECT_EQ(c.solver.method, ls::SolveMethod::Born);
  EXPECT_EQ(c.solver.born_terms, 12);
  EXPECT_EQ(c.trials, 7);
  EXPECT_EQ(c.base_seed, 99u);
  EXPECT_EQ(c.output, "results");
  EXPECT_EQ(c.medium_spec().components(), 9);
  EXPECT_EQ(c.source_spec().components(), 3);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("[problem]\nk = 2\nkind = fluid\n").find("t.ini:3:"), std::string::npos);
  EXPECT_NE(error_of("[problem]\nwavenumber = 2\n").find("t.ini:2:"), std::string::npos);
  EXPECT_NE(error_of("[problem]\nk = 2\nk = 3\n").find("t.ini:3:"), std::string::npos);
  EXPECT_NE(error_of("[nonsense]\n").find("t.ini:1:"), std::string::npos);
  EXPECT_NE(error_of("[grid]\nn = 4x\n").find("t.ini:2:"), std::string::npos);
  EXPECT_NE(error_of("k = 1\n").find("t.ini:1:"), std::string::npos);
  error_of("[medium]\nsupport_lower = 0.05 0.25\n");
  error_of("[problem]\nkind = elastic\nmu = -1\n");
  error_of("[medium]\norder = 7\n");
  error_of("[run]\ntrials = 0\n");
}

TEST(Config, RejectsSourceOnGridNode) {
  // 0.5 + h/2 is a node of the 64-point grid.
  error_of("[source]\nlocation = 0.5078125 0.5078125\n");
}

TEST(Config, CanonicalFormRoundTrips) {
  const auto c = parse("[problem]\nkind = elastic\nk = 3.3\n[grid]\nn = 32\n[source]\namplitude = 1 0.25\n[run]\nbase_seed = 18446744073709551615\n");
  const std::string ini = to_ini(c);
  const auto d = parse(ini);
  EXPECT_EQ(to_ini(d), ini);
  EXPECT_EQ(d.base_seed, c.base_seed);
  EXPECT_EQ(d.k, 3.3);
  EXPECT_EQ(d.source.amplitude[1], 0.25);
}

TEST(Config, LoadMissingFile) {
  test::expect_error(ErrorKind::ConfigInvalid, [] { load("/nonexistent/x.ini"); });
}
