#pragma once

#include "jgmc/conic.hpp"

#include <Eigen/SparseCholesky>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>

namespace jgmc {

struct SolverSettings {
  double eps_primal = 1e-6;
  double eps_dual = 1e-6;
  double eps_gap = 1e-6;
  int max_iters = 100000;
  double alpha = 1.5;  // over-relaxation, in (0, 2)
  int equilibration_iters = 10;
  double rho = 0.1;
  bool adaptive_rho = true;
  int check_every = 10;
  int adapt_every = 50;
  double eps_infeasible = 1e-7;
  int anderson_memory = 10;  // 0 disables acceleration
  double time_limit = 0.0;  // seconds, 0 = none
  std::uint64_t seed = 0;   // no randomized internals at present
  std::ostream* log = nullptr;  // CSV: iter,primal_res,dual_res,gap

  void validate() const {
    require(eps_primal > 0 && eps_dual > 0 && eps_gap > 0, "solver: tolerances must be positive");
    require(alpha > 0.0 && alpha < 2.0, "solver: over-relaxation must be in (0, 2)");
    require(max_iters > 0 && check_every > 0 && adapt_every > 0, "solver: iteration counts must be positive");
    require(rho > 0.0, "solver: rho must be positive");
    require(anderson_memory >= 0, "solver: anderson memory must be nonnegative");
  }

  /// Looser profile (1e-4) used for sweeps; rounding tolerates it.
  static SolverSettings fast() {
    SolverSettings s;
    s.eps_primal = s.eps_dual = s.eps_gap = 1e-4;
    return s;
  }
};

enum class SolveStatus { optimal, max_iters, primal_infeasible, dual_infeasible, numerical_failure };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::primal_infeasible: return "infeasible-certificate (primal)";
    case SolveStatus::dual_infeasible: return "infeasible-certificate (dual)";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

struct SolveReport {
  SolveStatus status = SolveStatus::max_iters;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double objective = 0.0;       // c^T x + offset
  double dual_objective = 0.0;  // b^T y + offset
  double seconds = 0.0;
  double rho = 0.0;
};

struct SolveResult {
  Vector x;  // primal, in the cone
  Vector y;  // equality multipliers; c - A^T y is the dual slack
  SolveReport report;
};

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

/// Residuals of (x, y) for min c^T x s.t. Ax = b, x in K, recomputed from scratch:
/// relative equality/cone violation, distance of c - A^T y from K, relative duality gap.
inline KktResiduals verify_kkt(const ConicProgram& p, const Vector& x, const Vector& y) {
  require(x.size() == p.variables() && y.size() == p.constraints(), "verify_kkt: vector sizes do not match");
  KktResiduals r;
  const Vector xk = project_cone(p.cones, x);
  r.primal = std::max((p.a * x - p.b).norm() / (1.0 + p.b.norm()), (x - xk).norm() / (1.0 + x.norm()));
  const Vector slack = p.c - p.a.transpose() * y;
  r.dual = (slack - project_dual_cone(p.cones, slack)).norm() / (1.0 + p.c.norm());
  const double pobj = p.c.dot(x), dobj = p.b.dot(y);
  r.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  return r;
}

namespace detail {

/// Ruiz equilibration: row scaling E and cone-respecting column scaling D
/// (one scalar per PSD block) so that E A D has rows and columns of unit inf-norm.
struct Scaling {
  Vector row;  // E
  Vector col;  // D
};

inline Scaling ruiz(const Eigen::SparseMatrix<double>& a, const ConeLayout& cones, int iters) {
  Scaling s{Vector::Ones(a.rows()), Vector::Ones(a.cols())};
  if (iters <= 0 || a.nonZeros() == 0) return s;
  Eigen::SparseMatrix<double> work = a;
  for (int it = 0; it < iters; ++it) {
    Vector rn = Vector::Zero(work.rows());
    Vector cn = Vector::Zero(work.cols());
    for (Eigen::Index k = 0; k < work.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator e(work, k); e; ++e) {
        const double v = std::abs(e.value());
        rn(e.row()) = std::max(rn(e.row()), v);
        cn(e.col()) = std::max(cn(e.col()), v);
      }
    Vector dr(work.rows()), dc(work.cols());
    for (Eigen::Index i = 0; i < rn.size(); ++i) dr(i) = rn(i) > 0 ? 1.0 / std::sqrt(rn(i)) : 1.0;
    for (Eigen::Index j = 0; j < cones.free + cones.nonneg; ++j) dc(j) = cn(j) > 0 ? 1.0 / std::sqrt(cn(j)) : 1.0;
    Eigen::Index off = cones.free + cones.nonneg;
    for (int m : cones.psd) {
      const auto len = svec_size(m);
      const double peak = cn.segment(off, len).maxCoeff();
      dc.segment(off, len).setConstant(peak > 0 ? 1.0 / std::sqrt(peak) : 1.0);
      off += len;
    }
    work = dr.asDiagonal() * work * dc.asDiagonal();
    s.row = s.row.cwiseProduct(dr);
    s.col = s.col.cwiseProduct(dc);
  }
  s.row = s.row.cwiseMax(1e-4).cwiseMin(1e4);
  s.col = s.col.cwiseMax(1e-4).cwiseMin(1e4);
  return s;
}

}  // namespace detail

/// Operator-splitting (ADMM) solver for min c^T x s.t. Ax = b, x in K.
/// Alternates a projection onto {Ax = b} (one sparse factorization of A A^T,
/// reused for every iteration and every rho) with a projection onto K.
inline SolveResult solve(const ConicProgram& p, const SolverSettings& settings = {}) {
  settings.validate();
  p.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  const Eigen::Index nvar = p.variables(), nrow = p.constraints();
  const detail::Scaling sc = detail::ruiz(p.a, p.cones, settings.equilibration_iters);
  const Eigen::SparseMatrix<double> a = sc.row.asDiagonal() * p.a * sc.col.asDiagonal();
  const Eigen::SparseMatrix<double> at = a.transpose();
  const Vector b = sc.row.cwiseProduct(p.b);
  Vector c = sc.col.cwiseProduct(p.c);
  const double cnorm = c.lpNorm<Eigen::Infinity>();
  const double gamma = cnorm > 0.0 ? 1.0 / cnorm : 1.0;
  c *= gamma;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  if (nrow > 0) {
    Eigen::SparseMatrix<double> aat = a * at;
    const double diag_max = aat.diagonal().cwiseAbs().maxCoeff();
    Eigen::SparseMatrix<double> reg(nrow, nrow);
    reg.setIdentity();
    aat += (1e-10 * std::max(1.0, diag_max)) * reg;
    ldlt.compute(aat);
    if (ldlt.info() != Eigen::Success) throw NumericalError("solve: factorization of A A^T failed");
  }
  const auto project_affine = [&](const Vector& v, Vector& w) -> Vector {
    if (nrow == 0) {
      w.resize(0);
      return v;
    }
    const Vector r = a * v - b;
    w = ldlt.solve(r);
    w += ldlt.solve(r - a * (at * w));
    return v - at * w;
  };

  double rho = settings.rho;
  Vector z = Vector::Zero(nvar), u = Vector::Zero(nvar), x(nvar), w, y = Vector::Zero(nrow);
  Matrix work;

  SolveResult out;
  auto& rep = out.report;
  const double bnorm = p.b.norm(), cnorm_raw = p.c.norm();
  Vector prev_y = Vector::Zero(nrow), prev_x = Vector::Zero(nvar);
  int primal_cert = 0, dual_cert = 0;

  const auto unscaled_x = [&] { return Vector(sc.col.cwiseProduct(z)); };
  const auto unscaled_y = [&] { return Vector(sc.row.cwiseProduct(y) / gamma); };

  // One operator-splitting step from (z, u); leaves x, y of the affine step behind.
  Vector v, xr;
  const auto step = [&](const Vector& zi, const Vector& ui, Vector& zo, Vector& uo) {
    v = zi - ui - c / rho;
    x = project_affine(v, w);
    y = -rho * w;
    xr = settings.alpha * x + (1.0 - settings.alpha) * zi;
    zo = xr + ui;
    project_cone(p.cones, zo, work);
    uo = ui + xr - zo;
  };

  // Safeguarded type-II Anderson acceleration on the state (z, u).
  const int mem = settings.anderson_memory;
  std::deque<Vector> dg, df;
  Matrix gram;  // df^T df
  Vector state(2 * nvar), g(2 * nvar), f(2 * nvar), prev_g, prev_f, safe_g;
  state << z, u;
  double safe_norm = std::numeric_limits<double>::infinity();
  bool extrapolated = false;
  Vector zn(nvar), un(nvar);
  const auto reset_anderson = [&] {
    dg.clear();
    df.clear();
    gram.resize(0, 0);
    prev_g.resize(0);
    prev_f.resize(0);
  };

  int it = 0;
  for (; it < settings.max_iters; ++it) {
    step(state.head(nvar), state.tail(nvar), zn, un);
    g << zn, un;
    f = g - state;
    const double fnorm = f.norm();
    if (extrapolated && fnorm > safe_norm) {
      // reject the extrapolated point and continue from the last plain iterate
      state = safe_g;
      reset_anderson();
      step(state.head(nvar), state.tail(nvar), zn, un);
      g << zn, un;
      f = g - state;
    }
    extrapolated = false;
    z = g.head(nvar);
    u = g.tail(nvar);
    if (mem > 0) {
      if (prev_g.size()) {
        dg.push_back(g - prev_g);
        df.push_back(f - prev_f);
        if (static_cast<int>(dg.size()) > mem) {
          dg.pop_front();
          df.pop_front();
          gram = Matrix(gram.bottomRightCorner(gram.rows() - 1, gram.cols() - 1));
        }
        const auto m = static_cast<Eigen::Index>(df.size());
        gram.conservativeResize(m, m);
        for (Eigen::Index j = 0; j < m; ++j) gram(m - 1, j) = gram(j, m - 1) = df[j].dot(df.back());
      }
      prev_g = g;
      prev_f = f;
      if (!dg.empty()) {
        const auto m = static_cast<Eigen::Index>(df.size());
        Vector rhs(m);
        for (Eigen::Index j = 0; j < m; ++j) rhs(j) = df[j].dot(f);
        Matrix reg = gram;
        reg.diagonal().array() += 1e-10 * (gram.trace() / m) + 1e-300;
        const Vector gam = reg.ldlt().solve(rhs);
        if (gam.allFinite()) {
          safe_g = g;
          safe_norm = f.norm();
          state = g;
          for (Eigen::Index j = 0; j < m; ++j) state -= gam(j) * dg[j];
          extrapolated = true;
        } else {
          reset_anderson();
          state = g;
        }
      } else {
        state = g;
      }
    } else {
      state = g;
    }

    if ((it + 1) % settings.check_every != 0 && it + 1 != settings.max_iters) continue;
    if (!z.allFinite() || !u.allFinite() || !y.allFinite()) {
      rep.status = SolveStatus::numerical_failure;
      ++it;
      break;
    }
    const Vector xo = unscaled_x();
    const Vector yo = unscaled_y();
    const Vector so = (-rho / gamma) * u.cwiseQuotient(sc.col);
    const Vector aty = p.a.transpose() * yo;
    rep.primal_residual = (p.a * xo - p.b).norm() / (1.0 + bnorm);
    rep.dual_residual = (p.c - aty - so).norm() / (1.0 + cnorm_raw);
    const double pobj = p.c.dot(xo), dobj = p.b.dot(yo);
    rep.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    rep.objective = pobj + p.objective_offset;
    rep.dual_objective = dobj + p.objective_offset;
    if (settings.log)
      *settings.log << it + 1 << ',' << rep.primal_residual << ',' << rep.dual_residual << ',' << rep.gap << '\n';
    if (rep.primal_residual <= settings.eps_primal && rep.dual_residual <= settings.eps_dual &&
        rep.gap <= settings.eps_gap) {
      rep.status = SolveStatus::optimal;
      ++it;
      break;
    }

    // Infeasibility certificates from iterate differences.
    const Vector dy = yo - prev_y;
    const double bdy = p.b.dot(dy);
    if (bdy > 0.0) {
      const Vector q = p.a.transpose() * (dy / bdy);
      primal_cert = project_cone(p.cones, q).norm() <= settings.eps_infeasible ? primal_cert + 1 : 0;
    } else {
      primal_cert = 0;
    }
    const Vector dx = xo - prev_x;
    const double cdx = p.c.dot(dx);
    if (cdx < 0.0) {
      const Vector d = dx / -cdx;
      const bool ok = (p.a * d).norm() <= settings.eps_infeasible &&
                      (d - project_cone(p.cones, d)).norm() <= settings.eps_infeasible;
      dual_cert = ok ? dual_cert + 1 : 0;
    } else {
      dual_cert = 0;
    }
    prev_y = yo;
    prev_x = xo;
    if (primal_cert >= 3) {
      rep.status = SolveStatus::primal_infeasible;
      ++it;
      break;
    }
    if (dual_cert >= 3) {
      rep.status = SolveStatus::dual_infeasible;
      ++it;
      break;
    }
    if (settings.time_limit > 0.0 && elapsed() > settings.time_limit) {
      rep.status = SolveStatus::max_iters;
      ++it;
      break;
    }

    if (settings.adaptive_rho && (it + 1) % settings.adapt_every == 0) {
      const Vector az = a * z;
      const Vector ss = -rho * u;
      const Vector aty_s = at * y;
      const double rp = (az - b).norm() / std::max({az.norm(), b.norm(), 1e-12});
      const double rd = (c - aty_s - ss).norm() / std::max({c.norm(), aty_s.norm(), ss.norm(), 1e-12});
      if (rp > 0.0 && rd > 0.0) {
        const double ratio = std::sqrt(rp / rd);
        if (ratio > 2.0 || ratio < 0.5) {
          const double next = std::clamp(rho * ratio, 1e-6, 1e6);
          u *= rho / next;
          rho = next;
          state << z, u;
          extrapolated = false;
          reset_anderson();
        }
      }
    }
  }
  rep.iterations = it;
  rep.seconds = elapsed();
  rep.rho = rho;
  out.x = unscaled_x();
  out.y = unscaled_y();
  return out;
}

/// Solver contract: any backend mapping (program, settings) to (primal, dual, report).
using ConicSolver = std::function<SolveResult(const ConicProgram&, const SolverSettings&)>;

inline ConicSolver default_solver() {
  return [](const ConicProgram& p, const SolverSettings& s) { return solve(p, s); };
}

}  // namespace jgmc
