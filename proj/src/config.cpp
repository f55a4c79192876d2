#include "scatterlab/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "scatterlab/io.hpp"

namespace scatterlab::config {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"problem", {"kind", "dim", "k", "lambda", "mu"}},
      {"grid", {"lower", "upper", "n"}},
      {"medium", {"order", "amplitude", "support_lower", "support_upper"}},
      {"source", {"kind", "location", "amplitude", "order", "strength", "support_lower", "support_upper"}},
      {"solver", {"method", "tol", "restart", "max_iter", "born_terms"}},
      {"run", {"trials", "base_seed", "output", "margin"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Parser {
 public:
  Parser(std::string_view text, std::string_view origin) : origin_(origin) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(line, "unterminated section header");
        section = trim(s.substr(1, s.size() - 2));
        if (!schema().contains(section)) fail(line, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(line, "expected key = value");
      if (section.empty()) fail(line, "key outside of any section");
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (!schema().at(section).contains(key)) fail(line, "unknown key '" + key + "' in [" + section + "]");
      if (value.empty()) fail(line, "empty value for '" + key + "'");
      const std::string full = section + "." + key;
      if (entries_.contains(full)) fail(line, "duplicate key '" + key + "' in [" + section + "]");
      entries_[full] = {value, line};
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    std::ostringstream os;
    os << origin_;
    if (line > 0) os << ":" << line;
    os << ": " << msg;
    throw Error(ErrorKind::ConfigInvalid, os.str());
  }

  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const Entry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  double number(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? to_double(e->value, e->line) : fallback;
  }

  long long integer(const std::string& key, long long fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    long long v = 0;
    const auto* end = e->value.data() + e->value.size();
    const auto res = std::from_chars(e->value.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) fail(e->line, "expected an integer, got '" + e->value + "'");
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::uint64_t v = 0;
    const auto* end = e->value.data() + e->value.size();
    const auto res = std::from_chars(e->value.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
      fail(e->line, "expected a non-negative integer, got '" + e->value + "'");
    }
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  std::vector<double> list(const std::string& key) const {
    const Entry* e = find(key);
    std::vector<double> out;
    if (!e) return out;
    std::istringstream in(e->value);
    std::string tok;
    while (in >> tok) out.push_back(to_double(tok, e->line));
    return out;
  }

  double to_double(const std::string& s, int line) const {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) fail(line, "expected a number, got '" + s + "'");
    return v;
  }

 private:
  std::string origin_;
  std::map<std::string, Entry> entries_;
};

Box box_from(const Parser& p, const std::string& lower_key, const std::string& upper_key, int dim,
             const Box& fallback) {
  auto lo = p.list(lower_key);
  auto hi = p.list(upper_key);
  if (lo.empty() && hi.empty()) return fallback;
  const int line = p.line_of(lo.empty() ? upper_key : lower_key);
  if (lo.empty()) lo.assign(fallback.lower.begin(), fallback.lower.begin() + dim);
  if (hi.empty()) hi.assign(fallback.upper.begin(), fallback.upper.begin() + dim);
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim) {
    p.fail(line, "corner lists need " + std::to_string(dim) + " entries");
  }
  try {
    return Box::make(lo, hi);
  } catch (const Error& e) {
    p.fail(line, e.what());
  }
}

Box scaled_box(const Box& outer, double lo, double hi) {
  Box b = outer;
  for (int i = 0; i < outer.dim; ++i) {
    b.lower[i] = outer.lower[i] + lo * outer.extent(i);
    b.upper[i] = outer.lower[i] + hi * outer.extent(i);
  }
  return b;
}

std::string join(const double* v, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? " " : "") + io::format_double(v[i]);
  return s;
}

}  // namespace

Grid ExperimentConfig::grid() const {
  std::vector<std::size_t> counts(n.begin(), n.begin() + dim);
  return Grid(box, counts);
}

fields::RandomFieldSpec ExperimentConfig::medium_spec() const {
  fields::RandomFieldSpec s;
  s.order = medium.order;
  s.dim = dim;
  s.shape = problem == ProblemKind::Acoustic ? FieldKind::Scalar : FieldKind::Matrix;
  s.strengths.push_back({medium.support, medium.amplitude});
  return s;
}

fields::RandomFieldSpec ExperimentConfig::source_spec() const {
  fields::RandomFieldSpec s;
  s.order = source.order;
  s.dim = dim;
  s.shape = problem == ProblemKind::Acoustic ? FieldKind::Scalar : FieldKind::Vector;
  s.strengths.push_back({source.support, source.strength});
  return s;
}

ExperimentConfig parse(std::string_view text, std::string_view origin) {
  const Parser p(text, origin);
  ExperimentConfig c;

  const std::string kind = p.text("problem.kind", "acoustic");
  if (kind == "acoustic") {
    c.problem = ProblemKind::Acoustic;
  } else if (kind == "elastic") {
    c.problem = ProblemKind::Elastic;
  } else {
    p.fail(p.line_of("problem.kind"), "problem kind must be acoustic or elastic");
  }
  c.dim = static_cast<int>(p.integer("problem.dim", 2));
  if (c.dim != 2 && c.dim != 3) p.fail(p.line_of("problem.dim"), "dim must be 2 or 3");
  c.k = p.number("problem.k", 1.0);
  if (!(c.k > 0.0)) p.fail(p.line_of("problem.k"), "k must be positive");
  c.lambda = p.number("problem.lambda", 1.0);
  c.mu = p.number("problem.mu", 1.0);
  if (c.problem == ProblemKind::Elastic) {
    try {
      greens::wavenumbers(c.k, c.lambda, c.mu);
    } catch (const Error& e) {
      p.fail(p.line_of(p.find("problem.mu") ? "problem.mu" : "problem.lambda"), e.what());
    }
  }

  c.box = box_from(p, "grid.lower", "grid.upper", c.dim, Box::cube(c.dim, 0.0, 1.0));
  if (const auto counts = p.list("grid.n"); !counts.empty()) {
    const int line = p.line_of("grid.n");
    if (counts.size() != 1 && static_cast<int>(counts.size()) != c.dim) {
      p.fail(line, "n needs 1 or " + std::to_string(c.dim) + " entries");
    }
    for (int i = 0; i < c.dim; ++i) {
      const double v = counts.size() == 1 ? counts[0] : counts[i];
      if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
        p.fail(line, "point counts must be positive integers");
      }
      c.n[i] = static_cast<std::size_t>(v);
    }
  } else {
    c.n = {64, 64, c.dim == 3 ? 64u : 1u};
  }
  Grid grid;
  try {
    grid = c.grid();
  } catch (const Error& e) {
    p.fail(p.line_of("grid.n"), e.what());
  }

  c.medium.order = p.number("medium.order", 1.5);
  c.medium.amplitude = p.number("medium.amplitude", 1.0);
  c.medium.support = box_from(p, "medium.support_lower", "medium.support_upper", c.dim, scaled_box(c.box, 0.25, 0.75));
  try {
    const auto spec = c.medium_spec();
    spec.validate();
    fields::localize(FieldSample(grid, FieldShape::scalar(c.dim), true), spec.strengths[0]);
  } catch (const Error& e) {
    const std::string key = e.kind() == ErrorKind::SupportNotContained ? "medium.support_lower" : "medium.order";
    p.fail(p.line_of(key) ? p.line_of(key) : p.line_of("medium.amplitude"), e.what());
  }
  if (!(c.medium.order >= 0.0 && c.medium.order < c.dim + 2.0)) {
    p.fail(p.line_of("medium.order"), "medium order must lie in [0, d + 2)");
  }

  const std::string skind = p.text("source.kind", "point");
  if (skind == "point") {
    c.source.kind = SourceKind::Point;
  } else if (skind == "random") {
    c.source.kind = SourceKind::RandomField;
  } else {
    p.fail(p.line_of("source.kind"), "source kind must be point or random");
  }
  const int ncomp = c.problem == ProblemKind::Acoustic ? 1 : c.dim;
  if (const auto a = p.list("source.amplitude"); !a.empty()) {
    if (static_cast<int>(a.size()) != ncomp) {
      p.fail(p.line_of("source.amplitude"), "amplitude needs " + std::to_string(ncomp) + " entries");
    }
    c.source.amplitude = {0.0, 0.0, 0.0};
    for (int i = 0; i < ncomp; ++i) c.source.amplitude[i] = a[i];
  }
  c.source.order = p.number("source.order", 1.5);
  c.source.strength = p.number("source.strength", 1.0);
  c.source.support = box_from(p, "source.support_lower", "source.support_upper", c.dim, scaled_box(c.box, 0.25, 0.75));
  if (c.source.kind == SourceKind::Point) {
    c.source.location = c.box.center();
    if (const auto y = p.list("source.location"); !y.empty()) {
      if (static_cast<int>(y.size()) != c.dim) {
        p.fail(p.line_of("source.location"), "location needs " + std::to_string(c.dim) + " entries");
      }
      for (int i = 0; i < c.dim; ++i) c.source.location[i] = y[i];
    }
    try {
      ls::AcousticProblem probe{grid, c.k, ls::zero_medium(grid, FieldKind::Scalar),
                                ls::SourceSpec::point_source(c.source.location, {c.source.amplitude.data(), 1})};
      probe.validate();
    } catch (const Error& e) {
      p.fail(p.line_of("source.location"), e.what());
    }
  } else {
    try {
      const auto spec = c.source_spec();
      spec.validate();
      fields::localize(FieldSample(grid, FieldShape::scalar(c.dim), true), spec.strengths[0]);
    } catch (const Error& e) {
      p.fail(p.line_of("source.support_lower") ? p.line_of("source.support_lower") : p.line_of("source.order"),
             e.what());
    }
    if (!(c.source.order >= 0.0 && c.source.order < c.dim + 2.0)) {
      p.fail(p.line_of("source.order"), "source order must lie in [0, d + 2)");
    }
  }

  const std::string method = p.text("solver.method", "gmres");
  if (method == "gmres") {
    c.solver.method = ls::SolveMethod::Gmres;
  } else if (method == "born") {
    c.solver.method = ls::SolveMethod::Born;
  } else if (method == "dense") {
    c.solver.method = ls::SolveMethod::Dense;
  } else {
    p.fail(p.line_of("solver.method"), "method must be gmres, born or dense");
  }
  c.solver.gmres.tol = p.number("solver.tol", 1e-8);
  if (!(c.solver.gmres.tol > 1e-14 && c.solver.gmres.tol < 1e-2)) {
    p.fail(p.line_of("solver.tol"), "tol must lie in (1e-14, 1e-2)");
  }
  c.solver.gmres.restart = static_cast<int>(p.integer("solver.restart", 50));
  if (c.solver.gmres.restart < 1) p.fail(p.line_of("solver.restart"), "restart must be at least 1");
  c.solver.gmres.max_iter = static_cast<int>(p.integer("solver.max_iter", 2000));
  if (c.solver.gmres.max_iter < 1) p.fail(p.line_of("solver.max_iter"), "max_iter must be at least 1");
  c.solver.born_terms = static_cast<int>(p.integer("solver.born_terms", 30));
  if (c.solver.born_terms < 1) p.fail(p.line_of("solver.born_terms"), "born_terms must be at least 1");

  c.trials = static_cast<int>(p.integer("run.trials", 1));
  if (c.trials < 1) p.fail(p.line_of("run.trials"), "trials must be at least 1");
  c.base_seed = p.unsigned_integer("run.base_seed", 0);
  c.output = p.text("run.output", "out");
  c.margin = p.number("run.margin", 0.1);
  if (!(c.margin >= 0.0)) p.fail(p.line_of("run.margin"), "margin must be non-negative");
  return c;
}

ExperimentConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigInvalid, path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string to_ini(const ExperimentConfig& c) {
  const int d = c.dim;
  const int ncomp = c.problem == ProblemKind::Acoustic ? 1 : d;
  std::ostringstream os;
  os << "[problem]\n";
  os << "kind = " << (c.problem == ProblemKind::Acoustic ? "acoustic" : "elastic") << "\n";
  os << "dim = " << d << "\n";
  os << "k = " << io::format_double(c.k) << "\n";
  os << "lambda = " << io::format_double(c.lambda) << "\n";
  os << "mu = " << io::format_double(c.mu) << "\n\n";
  os << "[grid]\n";
  os << "lower = " << join(c.box.lower.data(), d) << "\n";
  os << "upper = " << join(c.box.upper.data(), d) << "\n";
  os << "n =";
  for (int i = 0; i < d; ++i) os << ' ' << c.n[i];
  os << "\n\n[medium]\n";
  os << "order = " << io::format_double(c.medium.order) << "\n";
  os << "amplitude = " << io::format_double(c.medium.amplitude) << "\n";
  os << "support_lower = " << join(c.medium.support.lower.data(), d) << "\n";
  os << "support_upper = " << join(c.medium.support.upper.data(), d) << "\n\n";
  os << "[source]\n";
  os << "kind = " << (c.source.kind == SourceKind::Point ? "point" : "random") << "\n";
  os << "amplitude = " << join(c.source.amplitude.data(), ncomp) << "\n";
  if (c.source.kind == SourceKind::Point) {
    os << "location = " << join(c.source.location.data(), d) << "\n";
  } else {
    os << "order = " << io::format_double(c.source.order) << "\n";
    os << "strength = " << io::format_double(c.source.strength) << "\n";
    os << "support_lower = " << join(c.source.support.lower.data(), d) << "\n";
    os << "support_upper = " << join(c.source.support.upper.data(), d) << "\n";
  }
  os << "\n[solver]\n";
  os << "method = " << ls::to_string(c.solver.method) << "\n";
  os << "tol = " << io::format_double(c.solver.gmres.tol) << "\n";
  os << "restart = " << c.solver.gmres.restart << "\n";
  os << "max_iter = " << c.solver.gmres.max_iter << "\n";
  os << "born_terms = " << c.solver.born_terms << "\n\n";
  os << "[run]\n";
  os << "trials = " << c.trials << "\n";
  os << "base_seed = " << c.base_seed << "\n";
  os << "output = " << c.output << "\n";
  os << "margin = " << io::format_double(c.margin) << "\n";
  return os.str();
}

}  // namespace scatterlab::config
