#include <cmath>
#include <limits>

#include "oskit/sdp.hpp"

// Numeric path: log-det barrier / central path scheme maximizing the margin
// delta. Equalities are eliminated through a nullspace parameterization, a
// huge box on the reduced variables keeps the centering problem bounded, and
// the barrier parameter sweep yields both a certified lower bound (an actual
// strictly feasible point) and a dual upper bound delta* <= delta(t) + nu/t.

namespace oskit {
namespace {

constexpr double kBox = 1e8;

struct ReducedProblem {
  std::vector<Eigen::MatrixXcd> constant;                 // per block, at x0
  std::vector<std::vector<Eigen::MatrixXcd>> coeff;       // [block][reduced var]
  std::vector<Eigen::MatrixXcd> unit;                     // margin unit per block
  std::vector<bool> unit_is_identity;
  Eigen::VectorXd x0;
  Eigen::MatrixXd nullbasis;  // x = x0 + N v
  int nvars = 0;              // reduced count
  double cap = 1.0;
};

// Smallest generalized eigenvalue of (F, U): max s with F - s U >= 0.
double gen_min_eig(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& u, bool u_identity) {
  if (u_identity) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(f, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(u);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("solve: margin_unit not strictly positive");
  const Eigen::MatrixXcd l = llt.matrixL();
  const Eigen::MatrixXcd m =
      l.triangularView<Eigen::Lower>().solve(f) * l.adjoint().triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXcd::Identity(f.rows(), f.cols()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double block_margin(const ReducedProblem& rp, const Eigen::VectorXd& v) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < rp.constant.size(); ++b) {
    Eigen::MatrixXcd f = rp.constant[b];
    for (int k = 0; k < rp.nvars; ++k) f += v[k] * rp.coeff[b][k];
    margin = std::min(margin, gen_min_eig(f, rp.unit[b], rp.unit_is_identity[b]));
  }
  return margin;
}

struct BarrierState {
  Eigen::VectorXd v;  // reduced vars
  double delta = 0.0;
};

bool point_feasible(const ReducedProblem& rp, const BarrierState& s,
                    std::vector<Eigen::LLT<Eigen::MatrixXcd>>& llts) {
  if (s.delta >= rp.cap) return false;
  for (int k = 0; k < rp.nvars; ++k)
    if (std::abs(s.v[k]) >= kBox) return false;
  llts.clear();
  for (std::size_t b = 0; b < rp.constant.size(); ++b) {
    Eigen::MatrixXcd g = rp.constant[b] - s.delta * rp.unit[b];
    for (int k = 0; k < rp.nvars; ++k) g += s.v[k] * rp.coeff[b][k];
    llts.emplace_back(g);
    if (llts.back().info() != Eigen::Success) return false;
  }
  return true;
}

double barrier_value(const ReducedProblem& rp, const BarrierState& s, double t,
                     const std::vector<Eigen::LLT<Eigen::MatrixXcd>>& llts) {
  double phi = -t * s.delta - std::log(rp.cap - s.delta);
  for (int k = 0; k < rp.nvars; ++k)
    phi -= std::log(kBox - s.v[k]) + std::log(kBox + s.v[k]);
  for (const auto& llt : llts) {
    const Eigen::MatrixXcd& l = llt.matrixL();
    for (int i = 0; i < l.rows(); ++i) phi -= 2.0 * std::log(l(i, i).real());
  }
  return phi;
}

}  // namespace

namespace detail {

FeasibilityVerdict solve_barrier(const LmiProblem& p, double tol) {
  p.validate();
  FeasibilityVerdict verdict;
  verdict.tol_used = tol;
  verdict.exact = false;

  // Uniform scaling of (constant, coeffs, margin) leaves the feasible set in
  // (x, delta) untouched and conditions the barrier.
  double scale = 1.0;
  for (const auto& blk : p.blocks) {
    scale = std::max(scale, blk.constant.max_abs());
    scale = std::max(scale, blk.margin_unit.max_abs());
    for (const auto& a : blk.coeffs) scale = std::max(scale, a.max_abs());
  }
  const double inv_scale = 1.0 / scale;

  // Equality elimination: x = x0 + N v.
  ReducedProblem rp;
  rp.cap = p.delta_cap;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(p.num_vars);
  Eigen::MatrixXd nullbasis = Eigen::MatrixXd::Identity(p.num_vars, p.num_vars);
  if (!p.linear_eqs.empty()) {
    Eigen::MatrixXd e(p.linear_eqs.size(), p.num_vars);
    Eigen::VectorXd g(p.linear_eqs.size());
    for (std::size_t q = 0; q < p.linear_eqs.size(); ++q) {
      e.row(q) = p.linear_eqs[q].coeffs.transpose();
      g[q] = p.linear_eqs[q].rhs;
    }
    x0 = e.completeOrthogonalDecomposition().solve(g);
    const double resid = (e * x0 - g).cwiseAbs().maxCoeff();
    const double eq_scale = std::max({1.0, g.cwiseAbs().maxCoeff(), e.cwiseAbs().maxCoeff()});
    if (resid > 1e-9 * eq_scale) {
      verdict.status = FeasStatus::Infeasible;
      verdict.note = "linear equalities inconsistent (residual " + std::to_string(resid) + ")";
      verdict.delta_upper_bound = -std::numeric_limits<double>::infinity();
      return verdict;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
    lu.setThreshold(1e-10);
    Eigen::MatrixXd kernel = lu.kernel();
    if (kernel.cols() == 1 && kernel.isZero(0.0)) kernel.resize(p.num_vars, 0);
    if (kernel.cols() > 0) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
      nullbasis = qr.householderQ() * Eigen::MatrixXd::Identity(p.num_vars, kernel.cols());
    } else {
      nullbasis.resize(p.num_vars, 0);
    }
  }
  rp.x0 = x0;
  rp.nullbasis = nullbasis;
  rp.nvars = static_cast<int>(nullbasis.cols());

  int total_dim = 0;
  for (const auto& blk : p.blocks) {
    // Extension problems produce block-sparse coefficients: most variables
    // never touch a given block.
    std::vector<int> nonzero;
    for (int i = 0; i < p.num_vars; ++i)
      if (blk.coeffs[i].max_abs() != 0.0) nonzero.push_back(i);
    Eigen::MatrixXcd c = blk.constant.mat() * inv_scale;
    for (int i : nonzero)
      if (x0[i] != 0.0) c += x0[i] * inv_scale * blk.coeffs[i].mat();
    rp.constant.push_back(std::move(c));
    std::vector<Eigen::MatrixXcd> red;
    red.reserve(rp.nvars);
    for (int k = 0; k < rp.nvars; ++k) {
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(blk.constant.dim(), blk.constant.dim());
      for (int i : nonzero)
        if (nullbasis(i, k) != 0.0) a += nullbasis(i, k) * inv_scale * blk.coeffs[i].mat();
      red.push_back(std::move(a));
    }
    rp.coeff.push_back(std::move(red));
    Eigen::MatrixXcd u = blk.margin_unit.mat() * inv_scale;
    rp.unit_is_identity.push_back(
        (u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() == 0.0);
    rp.unit.push_back(std::move(u));
    total_dim += blk.constant.dim();
  }

  const double band = 10.0 * tol;
  auto finish = [&](double lb, double ub, const Eigen::VectorXd& best_x, bool box_hit) {
    verdict.best_delta = lb;
    verdict.delta_upper_bound = ub;
    if (lb > band) {
      Witness w;
      w.x = best_x;
      w.delta = std::min(lb, rp.cap);
      verdict.status = FeasStatus::Feasible;
      verdict.witness = std::move(w);
    } else if (ub < -band && !box_hit) {
      verdict.status = FeasStatus::Infeasible;
      if (verdict.note.empty())
        verdict.note = "no witness found above margin; dual bound " + std::to_string(ub);
    } else {
      verdict.status = FeasStatus::Unknown;
      verdict.note = "margin in tolerance band [" + std::to_string(lb) + ", " +
                     std::to_string(ub) + "]";
    }
    return verdict;
  };

  // No free variables: delta* is the block margin at x0.
  if (rp.nvars == 0) {
    const double margin = std::min(block_margin(rp, Eigen::VectorXd::Zero(0)), rp.cap);
    return finish(margin, margin, x0, false);
  }

  const double nu = total_dim + 1 + 2.0 * rp.nvars;
  BarrierState s;
  s.v = Eigen::VectorXd::Zero(rp.nvars);
  const double margin0 = block_margin(rp, s.v);
  s.delta = std::min(margin0, rp.cap) - 1.0;

  double lb = std::min(margin0, rp.cap);
  double ub = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x = x0;
  const double early_exit = std::max(100.0 * tol, 1e-6);
  if (lb > early_exit) return finish(lb, ub, best_x, false);

  std::vector<Eigen::LLT<Eigen::MatrixXcd>> llts;
  if (!point_feasible(rp, s, llts))
    throw std::runtime_error("solve: barrier initialization infeasible");

  const int nb = static_cast<int>(rp.constant.size());
  const int nz = rp.nvars + 1;  // reduced vars + delta
  double t = 1.0;
  const double mu = 10.0;
  bool box_hit = false;

  for (int outer = 0; outer < 40; ++outer) {
    // Newton centering of phi_t.
    for (int it = 0; it < 80; ++it) {
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(nz);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(nz, nz);
      grad[nz - 1] = -t + 1.0 / (rp.cap - s.delta);
      hess(nz - 1, nz - 1) = 1.0 / ((rp.cap - s.delta) * (rp.cap - s.delta));
      for (int k = 0; k < rp.nvars; ++k) {
        grad[k] += 1.0 / (kBox - s.v[k]) - 1.0 / (kBox + s.v[k]);
        hess(k, k) += 1.0 / ((kBox - s.v[k]) * (kBox - s.v[k])) +
                      1.0 / ((kBox + s.v[k]) * (kBox + s.v[k]));
      }
      for (int b = 0; b < nb; ++b) {
        const int d = static_cast<int>(rp.constant[b].rows());
        const Eigen::MatrixXcd sinv =
            llts[static_cast<std::size_t>(b)].solve(Eigen::MatrixXcd::Identity(d, d));
        std::vector<Eigen::MatrixXcd> tk(nz);
        for (int k = 0; k < rp.nvars; ++k) tk[k] = sinv * rp.coeff[b][k];
        tk[nz - 1] = sinv * (-rp.unit[b]);
        for (int k = 0; k < nz; ++k) {
          grad[k] -= tk[k].trace().real();
          for (int l = k; l < nz; ++l) {
            const double h = (tk[k].array() * tk[l].transpose().array()).sum().real();
            hess(k, l) += h;
            if (l != k) hess(l, k) += h;
          }
        }
      }
      Eigen::VectorXd step;
      const double hess_scale = std::max(1.0, hess.cwiseAbs().maxCoeff());
      double reg = 0.0;
      for (;;) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(
            hess + reg * Eigen::MatrixXd::Identity(nz, nz));
        step = ldlt.solve(-grad);
        if (ldlt.info() == Eigen::Success && step.allFinite()) break;
        reg = reg == 0.0 ? 1e-14 * hess_scale : reg * 100.0;
        if (reg > 1e-2 * hess_scale)
          throw std::runtime_error("solve: Newton system unsolvable");
      }
      const double decrement2 = -grad.dot(step);
      if (!(decrement2 > 1e-11)) break;

      const double phi0 = barrier_value(rp, s, t, llts);
      double alpha = 1.0;
      BarrierState trial;
      std::vector<Eigen::LLT<Eigen::MatrixXcd>> trial_llts;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        trial.v = s.v + alpha * step.head(rp.nvars);
        trial.delta = s.delta + alpha * step[nz - 1];
        if (point_feasible(rp, trial, trial_llts) &&
            barrier_value(rp, trial, t, trial_llts) <= phi0 - 0.01 * alpha * decrement2) {
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
      s = trial;
      llts = trial_llts;
    }

    const Eigen::VectorXd x_now = x0 + nullbasis * s.v;
    const double margin_now = std::min(block_margin(rp, s.v), rp.cap);
    if (margin_now > lb) {
      lb = margin_now;
      best_x = x_now;
    }
    ub = std::min(ub, s.delta + (nu + std::sqrt(nu) + 1.0) / t);
    box_hit = s.v.cwiseAbs().maxCoeff() > 0.9 * kBox;

    if (lb > early_exit) break;
    if (ub < -band && (nu + std::sqrt(nu) + 1.0) / t < std::max(tol, 1e-12)) break;
    if ((nu + std::sqrt(nu) + 1.0) / t < 0.1 * std::max(tol, 1e-12)) break;
    t *= mu;
  }

  return finish(lb, std::min(ub, static_cast<double>(rp.cap)), best_x, box_hit);
}

}  // namespace detail

}  // namespace oskit
