#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "scatterlab/core.hpp"
#include "scatterlab/ls_solver.hpp"
#include "scatterlab/random_fields.hpp"

/// Experiment configuration files.
///
///     # comment
///     [section]
///     key = value
///
/// Lists are whitespace separated. Every problem is checked at load time and
/// errors carry the file and line of the offending key.
namespace scatterlab::config {

enum class ProblemKind { Acoustic, Elastic };
enum class SourceKind { Point, RandomField };

struct MediumConfig {
  double order = 1.5;
  double amplitude = 1.0;
  Box support{};
};

struct SourceConfig {
  SourceKind kind = SourceKind::Point;
  Point location{};
  std::array<double, 3> amplitude{1.0, 0.0, 0.0};
  // Random-field sources only.
  double order = 1.5;
  double strength = 1.0;
  Box support{};
};

struct SolverConfig {
  ls::SolveMethod method = ls::SolveMethod::Gmres;
  ls::GmresOptions gmres{};
  int born_terms = 30;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Acoustic;
  int dim = 2;
  double k = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  Box box{};
  std::array<std::size_t, 3> n{64, 64, 1};
  MediumConfig medium{};
  SourceConfig source{};
  SolverConfig solver{};
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::string output = "out";
  /// Margin handed to the regularity consistency check.
  double margin = 0.1;

  Grid grid() const;
  greens::ElasticKernelParams elastic_params() const { return {k, lambda, mu, dim}; }
  fields::RandomFieldSpec medium_spec() const;
  fields::RandomFieldSpec source_spec() const;
};

/// Parses and validates. Throws ConfigInvalid with "origin:line: message".
ExperimentConfig parse(std::string_view text, std::string_view origin = "<config>");
ExperimentConfig load(const std::filesystem::path& path);

/// Canonical text form; parse(to_ini(c)) reproduces c exactly.
std::string to_ini(const ExperimentConfig& config);

}  // namespace scatterlab::config
