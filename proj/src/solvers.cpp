#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <sstream>
#include <type_traits>

#include "scatterlab/ls_solver.hpp"

namespace scatterlab::ls {

std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::Gmres: return "gmres";
    case SolveMethod::Born: return "born";
    case SolveMethod::Dense: return "dense";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double residual_norm(const LippmannSchwingerSystem& sys, std::span<const cplx> x, std::span<const cplx> b,
                     std::vector<cplx>& work) {
  sys.apply(x, work);
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += std::norm(b[i] - work[i]);
  return std::sqrt(s);
}

// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
void gmres(const LippmannSchwingerSystem& sys, std::span<const cplx> b, std::span<cplx> x,
           const GmresOptions& opt, SolveReport& report) {
  const std::size_t n = b.size();
  const double bnorm = norm2(b);
  std::fill(x.begin(), x.end(), cplx{});
  report.residual_history.clear();
  report.iterations = 0;
  if (bnorm == 0.0) {
    report.residual_history.push_back(0.0);
    report.final_residual = 0.0;
    return;
  }
  const int m = std::max(1, opt.restart);
  std::vector<cplx> work(n);
  std::vector<std::vector<cplx>> basis(static_cast<std::size_t>(m) + 1, std::vector<cplx>(n));
  std::vector<cplx> hess(static_cast<std::size_t>((m + 1) * m));
  auto H = [&](int i, int j) -> cplx& { return hess[static_cast<std::size_t>(i * m + j)]; };
  std::vector<cplx> cs(m), sn(m), g(m + 1);

  double beta = residual_norm(sys, x, b, work);
  report.residual_history.push_back(beta / bnorm);
  while (true) {
    if (beta / bnorm <= opt.tol) break;
    if (report.iterations >= opt.max_iter) {
      std::ostringstream os;
      os << "GMRES reached max_iter=" << opt.max_iter << " with relative residual " << beta / bnorm;
      throw Error(ErrorKind::SolverDiverged, os.str());
    }
    sys.apply(x, work);
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = (b[i] - work[i]) / beta;
    std::fill(g.begin(), g.end(), cplx{});
    g[0] = beta;
    int used = 0;
    for (int j = 0; j < m && report.iterations < opt.max_iter; ++j) {
      auto& w = basis[j + 1];
      sys.apply(basis[j], w);
      ++report.iterations;
      for (int i = 0; i <= j; ++i) {
        H(i, j) = dot(basis[i], w);
        const cplx hij = H(i, j);
        for (std::size_t t = 0; t < n; ++t) w[t] -= hij * basis[i][t];
      }
      const double hnext = norm2(w);
      for (int i = 0; i < j; ++i) {
        const cplx t1 = std::conj(cs[i]) * H(i, j) + std::conj(sn[i]) * H(i + 1, j);
        const cplx t2 = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t1;
        H(i + 1, j) = t2;
      }
      // Rotation zeroing the subdiagonal entry hnext.
      const double a = std::abs(H(j, j));
      const double rr = std::hypot(a, hnext);
      if (rr == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        const cplx phase = a == 0.0 ? cplx{1.0, 0.0} : H(j, j) / a;
        cs[j] = phase * (a / rr);
        sn[j] = hnext / rr;
      }
      H(j, j) = std::conj(cs[j]) * H(j, j) + std::conj(sn[j]) * hnext;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = std::conj(cs[j]) * g[j];
      used = j + 1;
      const double est = std::abs(g[j + 1]) / bnorm;
      report.residual_history.push_back(est);
      if (est <= opt.tol || hnext <= 1e-300) break;
      for (std::size_t t = 0; t < n; ++t) w[t] /= hnext;
    }
    // Back substitution for the Krylov coefficients.
    std::vector<cplx> y(used);
    for (int i = used - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int j = i + 1; j < used; ++j) s -= H(i, j) * y[j];
      y[i] = s / H(i, i);
    }
    for (int j = 0; j < used; ++j)
      for (std::size_t t = 0; t < n; ++t) x[t] += y[j] * basis[j][t];
    beta = residual_norm(sys, x, b, work);
  }
  report.final_residual = beta / bnorm;
}

template <class Problem>
SolveReport gmres_impl(const Problem& problem, const GmresOptions& options) {
  if (!(options.tol > 1e-14 && options.tol < 1e-2)) {
    throw Error(ErrorKind::DomainError, "GMRES tolerance must lie in (1e-14, 1e-2)");
  }
  const auto t0 = Clock::now();
  const FieldSample rhs = assemble_rhs(problem);
  const LippmannSchwingerSystem sys(problem);
  SolveReport report;
  report.method = SolveMethod::Gmres;
  report.u = FieldSample(rhs.grid(), rhs.shape(), false);
  gmres(sys, rhs.values(), report.u.values(), options, report);
  report.wall_time = seconds_since(t0);
  return report;
}

template <class Problem>
SolveReport born_impl(const Problem& problem, int n_terms) {
  if (n_terms < 1) throw Error(ErrorKind::DomainError, "Born series needs at least one term");
  const auto t0 = Clock::now();
  const FieldSample rhs = assemble_rhs(problem);
  const LippmannSchwingerSystem sys(problem);
  SolveReport report;
  report.method = SolveMethod::Born;
  report.u = rhs;
  const double bnorm = norm2(rhs.values());
  std::vector<cplx> term(rhs.values().begin(), rhs.values().end());
  std::vector<cplx> next(term.size());
  report.term_norms.push_back(bnorm == 0.0 ? 0.0 : 1.0);
  double prev = bnorm;
  for (int n = 1; n < n_terms; ++n) {
    sys.apply_scattering(term, next);
    const double tn = norm2(next);
    report.term_norms.push_back(bnorm == 0.0 ? 0.0 : tn / bnorm);
    if (tn > prev) {
      std::ostringstream os;
      os << "Born term " << n << " grew from " << prev << " to " << tn;
      throw Error(ErrorKind::NonContractive, os.str());
    }
    prev = tn;
    term.swap(next);
    auto u = report.u.values();
    for (std::size_t i = 0; i < term.size(); ++i) u[i] += term[i];
    report.iterations = n;
  }
  std::vector<cplx> work(term.size());
  report.final_residual = bnorm == 0.0 ? 0.0 : residual_norm(sys, report.u.values(), rhs.values(), work) / bnorm;
  report.residual_history.push_back(report.final_residual);
  report.wall_time = seconds_since(t0);
  return report;
}

template <class Problem>
SolveReport dense_impl(const Problem& problem, const FieldSample& medium) {
  const auto t0 = Clock::now();
  const FieldSample rhs = assemble_rhs(problem);
  const LippmannSchwingerSystem sys(problem);
  const VolumeOperator& op = sys.volume_operator();
  const int nc = op.components();
  const std::size_t nodes = op.grid().size();
  const std::size_t n = op.unknowns();
  const bool acoustic = nc == 1;
  if ((acoustic && n > kDenseMaxAcoustic) || (!acoustic && nodes > kDenseMaxElasticNodes)) {
    throw Error(ErrorKind::ProblemTooLarge, "dense oracle limited to 4096 acoustic / 2048 elastic nodes");
  }
  double k2 = 0.0;
  if constexpr (std::is_same_v<Problem, AcousticProblem>) {
    k2 = problem.k * problem.k;
  } else {
    k2 = problem.params.k * problem.params.k;
  }

  // A = I - k^2 W diag(medium), assembled block by block.
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      const greens::Tensor w = op.weight(i, j);
      for (int a = 0; a < nc; ++a) {
        for (int c = 0; c < nc; ++c) {
          cplx acc{};
          for (int b = 0; b < nc; ++b) acc += w(a, b) * medium.at(j, acoustic ? 0 : b * nc + c);
          A(static_cast<Eigen::Index>(i * nc + a), static_cast<Eigen::Index>(j * nc + c)) -= k2 * acc;
        }
      }
    }
  }
  Eigen::VectorXcd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) b(static_cast<Eigen::Index>(i)) = rhs.values()[i];

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) throw Error(ErrorKind::SingularMatrix, "dense system is numerically singular");
  const Eigen::VectorXcd x = lu.solve(b);
  if (!x.allFinite()) throw Error(ErrorKind::SingularMatrix, "dense solve produced non-finite values");

  SolveReport report;
  report.method = SolveMethod::Dense;
  report.u = FieldSample(rhs.grid(), rhs.shape(), false);
  for (std::size_t i = 0; i < n; ++i) report.u.values()[i] = x(static_cast<Eigen::Index>(i));
  const double bnorm = b.norm();
  report.final_residual = bnorm == 0.0 ? 0.0 : (A * x - b).norm() / bnorm;
  report.residual_history.push_back(report.final_residual);
  report.iterations = 1;
  report.wall_time = seconds_since(t0);
  return report;
}

template <class Problem>
double relative_residual_impl(const Problem& problem, const FieldSample& u) {
  const FieldSample rhs = assemble_rhs(problem);
  require_compatible(rhs, u, "relative_residual");
  const LippmannSchwingerSystem sys(problem);
  std::vector<cplx> work(rhs.value_count());
  const double bnorm = norm2(rhs.values());
  const double r = residual_norm(sys, u.values(), rhs.values(), work);
  return bnorm == 0.0 ? r : r / bnorm;
}

}  // namespace

SolveReport solve_gmres(const AcousticProblem& problem, const GmresOptions& options) {
  return gmres_impl(problem, options);
}
SolveReport solve_gmres(const ElasticProblem& problem, const GmresOptions& options) {
  return gmres_impl(problem, options);
}
SolveReport solve_born(const AcousticProblem& problem, int n_terms) { return born_impl(problem, n_terms); }
SolveReport solve_born(const ElasticProblem& problem, int n_terms) { return born_impl(problem, n_terms); }
SolveReport solve_dense_oracle(const AcousticProblem& problem) { return dense_impl(problem, problem.rho); }
SolveReport solve_dense_oracle(const ElasticProblem& problem) { return dense_impl(problem, problem.M); }
double relative_residual(const AcousticProblem& problem, const FieldSample& u) {
  return relative_residual_impl(problem, u);
}
double relative_residual(const ElasticProblem& problem, const FieldSample& u) {
  return relative_residual_impl(problem, u);
}

}  // namespace scatterlab::ls
