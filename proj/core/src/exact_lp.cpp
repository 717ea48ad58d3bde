#include <algorithm>
#include <cassert>

#include "oskit/sdp.hpp"

// Exact rational path: all-diagonal problems reduce to the LP
//   maximize delta  s.t.  c_r + a_r.x - u_r delta >= 0,  E x = g,  delta <= cap
// solved by a dense two-phase tableau simplex with Bland's rule. Dual
// multipliers are read off the final tableau and verified against the
// certificate identities in rational arithmetic before anything is returned.

namespace oskit {
namespace {

struct LpRows {
  // Inequality rows: c[r] + a[r].v >= 0 with v = (x, delta); cap row last.
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> c;
  // Equality rows: e[q].v = g[q] (delta coefficient always zero).
  std::vector<std::vector<Rational>> e;
  std::vector<Rational> g;
  int num_v = 0;  // x vars + 1 for delta
};

LpRows build_rows(const LmiProblem& p) {
  LpRows rows;
  rows.num_v = p.num_vars + 1;
  const int dcol = p.num_vars;
  for (const auto& blk : p.blocks) {
    const auto cdiag = blk.constant.diagonal_entries();
    const auto udiag = blk.margin_unit.diagonal_entries();
    std::vector<std::vector<double>> adiag;
    adiag.reserve(blk.coeffs.size());
    for (const auto& m : blk.coeffs) adiag.push_back(m.diagonal_entries());
    for (int j = 0; j < blk.constant.dim(); ++j) {
      if (udiag[j] <= 0.0)
        throw std::invalid_argument("solve_exact_lp: margin_unit not strictly positive");
      std::vector<Rational> row(rows.num_v, Rational(0));
      for (int i = 0; i < p.num_vars; ++i) row[i] = exact_rational(adiag[i][j]);
      row[dcol] = -exact_rational(udiag[j]);
      rows.a.push_back(std::move(row));
      rows.c.push_back(exact_rational(cdiag[j]));
    }
  }
  // cap - delta >= 0
  std::vector<Rational> cap(rows.num_v, Rational(0));
  cap[dcol] = Rational(-1);
  rows.a.push_back(std::move(cap));
  rows.c.push_back(exact_rational(p.delta_cap));
  for (const auto& eq : p.linear_eqs) {
    std::vector<Rational> row(rows.num_v, Rational(0));
    for (int i = 0; i < p.num_vars; ++i) row[i] = exact_rational(eq.coeffs[i]);
    rows.e.push_back(std::move(row));
    rows.g.push_back(exact_rational(eq.rhs));
  }
  return rows;
}

// Dense tableau simplex over the standard form
//   max obj.w,  A w = b (b >= 0), w >= 0,
// where w = [p(1..V), n(1..V), s(1..R), artificials].
class Simplex {
 public:
  Simplex(const LpRows& rows) : rows_(rows) {
    V_ = rows.num_v;
    R_ = static_cast<int>(rows.a.size());
    Q_ = static_cast<int>(rows.e.size());
    nrows_ = R_ + Q_;
    sigma_.assign(nrows_, Rational(1));
    // Column layout: p, n, slacks, then artificials appended as needed.
    ncols_ = 2 * V_ + R_;
    t_.assign(nrows_, std::vector<Rational>(ncols_, Rational(0)));
    rhs_.assign(nrows_, Rational(0));
    init_col_.assign(nrows_, -1);
    for (int r = 0; r < R_; ++r) {
      const int i = r;
      // rho_r(v) = c_r + a_r.v >= 0  ->  -a_r.(p - n) + s_r = c_r
      for (int j = 0; j < V_; ++j) {
        t_[i][j] = -rows.a[r][j];
        t_[i][V_ + j] = rows.a[r][j];
      }
      t_[i][2 * V_ + r] = 1;
      rhs_[i] = rows.c[r];
      if (rhs_[i] < 0) negate_row(i);
    }
    for (int q = 0; q < Q_; ++q) {
      const int i = R_ + q;
      for (int j = 0; j < V_; ++j) {
        t_[i][j] = rows.e[q][j];
        t_[i][V_ + j] = -rows.e[q][j];
      }
      rhs_[i] = rows.g[q];
      if (rhs_[i] < 0) negate_row(i);
    }
    // Natural basis where the slack survived with +1; artificials elsewhere.
    basis_.assign(nrows_, -1);
    for (int i = 0; i < nrows_; ++i) {
      if (i < R_ && sigma_[i] == 1) {
        basis_[i] = 2 * V_ + i;
        init_col_[i] = 2 * V_ + i;
      } else {
        const int art = add_column();
        t_[i][art] = 1;
        basis_[i] = art;
        init_col_[i] = art;
        artificial_.push_back(art);
      }
    }
  }

  // Returns true when a feasible basis was found.
  bool phase1() {
    std::vector<Rational> cost(ncols_, Rational(0));
    for (int a : artificial_) cost[a] = Rational(-1);
    run(cost, /*allow_artificial=*/true);
    objective_value_ = current_objective(cost);
    phase1_cost_ = cost;
    if (objective_value_ < 0) return false;
    // Pivot leftover artificials out of the basis if their row has support
    // on a real column; rows with no support are redundant and stay parked.
    for (int i = 0; i < nrows_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (int j = 0; j < 2 * V_ + R_; ++j) {
        if (t_[i][j] != 0) {
          pivot(i, j);
          break;
        }
      }
    }
    return true;
  }

  void phase2() {
    std::vector<Rational> cost(ncols_, Rational(0));
    cost[V_ - 1] = Rational(1);        // p_delta
    cost[2 * V_ - 1] = Rational(-1);   // n_delta
    run(cost, /*allow_artificial=*/false);
    objective_value_ = current_objective(cost);
    phase2_cost_ = cost;
  }

  Rational objective_value() const { return objective_value_; }

  std::vector<Rational> primal() const {
    std::vector<Rational> w(ncols_, Rational(0));
    for (int i = 0; i < nrows_; ++i) w[basis_[i]] = rhs_[i];
    std::vector<Rational> v(V_);
    for (int j = 0; j < V_; ++j) v[j] = w[j] - w[V_ + j];
    return v;
  }

  // Duals of the tableau equality rows under the given cost vector,
  // mapped back through the row negations: y_r = sigma_r * lambda_row(r).
  void duals(const std::vector<Rational>& cost, std::vector<Rational>& y,
             std::vector<Rational>& z) const {
    std::vector<Rational> lambda(nrows_);
    for (int i = 0; i < nrows_; ++i) {
      const int col = init_col_[i];
      lambda[i] = reduced_cost(col, cost) + cost[col];
    }
    y.assign(R_, Rational(0));
    z.assign(Q_, Rational(0));
    for (int r = 0; r < R_; ++r) y[r] = sigma_[r] * lambda[r];
    for (int q = 0; q < Q_; ++q) z[q] = sigma_[R_ + q] * lambda[R_ + q];
  }

  const std::vector<Rational>& phase1_cost() const { return phase1_cost_; }
  const std::vector<Rational>& phase2_cost() const { return phase2_cost_; }

 private:
  void negate_row(int i) {
    for (auto& x : t_[i]) x = -x;
    rhs_[i] = -rhs_[i];
    sigma_[i] = -sigma_[i];
  }

  int add_column() {
    for (int i = 0; i < nrows_; ++i) t_[i].push_back(Rational(0));
    return ncols_++;
  }

  bool is_artificial(int col) const { return col >= 2 * V_ + R_; }

  Rational reduced_cost(int col, const std::vector<Rational>& cost) const {
    Rational z(0);
    for (int i = 0; i < nrows_; ++i) z += cost[basis_[i]] * t_[i][col];
    return z - cost[col];
  }

  Rational current_objective(const std::vector<Rational>& cost) const {
    Rational z(0);
    for (int i = 0; i < nrows_; ++i) z += cost[basis_[i]] * rhs_[i];
    return z;
  }

  void pivot(int row, int col) {
    const Rational piv = t_[row][col];
    for (auto& x : t_[row]) x /= piv;
    rhs_[row] /= piv;
    for (int i = 0; i < nrows_; ++i) {
      if (i == row || t_[i][col] == 0) continue;
      const Rational f = t_[i][col];
      for (int j = 0; j < ncols_; ++j) t_[i][j] -= f * t_[row][j];
      rhs_[i] -= f * rhs_[row];
    }
    basis_[row] = col;
  }

  void run(const std::vector<Rational>& cost, bool allow_artificial) {
    for (;;) {
      // Bland: entering = lowest-index column with negative reduced cost.
      int enter = -1;
      for (int j = 0; j < ncols_; ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (reduced_cost(j, cost) < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      int leave = -1;
      Rational best_ratio(0);
      for (int i = 0; i < nrows_; ++i) {
        if (t_[i][enter] <= 0) continue;
        const Rational ratio = rhs_[i] / t_[i][enter];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0)
        throw std::runtime_error("exact_lp: unbounded despite cap row");
      pivot(leave, enter);
    }
  }

  const LpRows& rows_;
  int V_ = 0, R_ = 0, Q_ = 0, nrows_ = 0, ncols_ = 0;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> rhs_;
  std::vector<Rational> sigma_;
  std::vector<int> basis_;
  std::vector<int> init_col_;
  std::vector<int> artificial_;
  std::vector<Rational> phase1_cost_, phase2_cost_;
  Rational objective_value_;
};

// The certificate combination is  sum_r y_r rho_r(v) + sum_q z_q (g_q - e_q.v),
// which is >= 0 on the feasible set. It must satisfy, exactly:
//   y >= 0,
//   sum_r y_r a_r[x] - sum_q z_q e_q[x] = 0   componentwise over x,
//   margin_coeff = -sum_r y_r a_r[delta]  (>= 0),
//   bound = sum_r y_r c_r + sum_q z_q g_q,
// which together prove margin_coeff * delta <= bound on the feasible set.
bool certificate_identities_hold(const LpRows& rows, const FarkasCertificate& cert) {
  const int R = static_cast<int>(rows.a.size());
  const int Q = static_cast<int>(rows.e.size());
  if (static_cast<int>(cert.ineq_mult.size()) != R) return false;
  if (static_cast<int>(cert.eq_mult.size()) != Q) return false;
  for (const auto& y : cert.ineq_mult)
    if (y < 0) return false;
  const int dcol = rows.num_v - 1;
  for (int j = 0; j < dcol; ++j) {
    Rational s(0);
    for (int r = 0; r < R; ++r) s += cert.ineq_mult[r] * rows.a[r][j];
    for (int q = 0; q < Q; ++q) s -= cert.eq_mult[q] * rows.e[q][j];
    if (s != 0) return false;
  }
  Rational mc(0);
  for (int r = 0; r < R; ++r) mc -= cert.ineq_mult[r] * rows.a[r][dcol];
  if (mc != cert.margin_coeff || mc < 0) return false;
  Rational bound(0);
  for (int r = 0; r < R; ++r) bound += cert.ineq_mult[r] * rows.c[r];
  for (int q = 0; q < Q; ++q) bound += cert.eq_mult[q] * rows.g[q];
  return bound == cert.bound;
}

bool witness_rows_hold(const LpRows& rows, const std::vector<Rational>& v) {
  for (std::size_t r = 0; r < rows.a.size(); ++r) {
    Rational s = rows.c[r];
    for (int j = 0; j < rows.num_v; ++j) s += rows.a[r][j] * v[j];
    if (s < 0) return false;
  }
  for (std::size_t q = 0; q < rows.e.size(); ++q) {
    Rational s(0);
    for (int j = 0; j < rows.num_v; ++j) s += rows.e[q][j] * v[j];
    if (s != rows.g[q]) return false;
  }
  return true;
}

}  // namespace

namespace detail {

FeasibilityVerdict solve_exact_impl(const LmiProblem& p) {
  p.validate();
  if (!p.all_diagonal())
    throw std::invalid_argument("solve_exact_lp: non-diagonal block present");
  const LpRows rows = build_rows(p);

  FeasibilityVerdict verdict;
  verdict.exact = true;
  verdict.tol_used = 0.0;

  Simplex simplex(rows);
  if (!simplex.phase1()) {
    FarkasCertificate cert;
    simplex.duals(simplex.phase1_cost(), cert.ineq_mult, cert.eq_mult);
    const int dcol = rows.num_v - 1;
    Rational mc(0);
    for (std::size_t r = 0; r < rows.a.size(); ++r) mc -= cert.ineq_mult[r] * rows.a[r][dcol];
    cert.margin_coeff = mc;
    Rational bound(0);
    for (std::size_t r = 0; r < rows.a.size(); ++r) bound += cert.ineq_mult[r] * rows.c[r];
    for (std::size_t q = 0; q < rows.e.size(); ++q) bound += cert.eq_mult[q] * rows.g[q];
    cert.bound = bound;
    if (!certificate_identities_hold(rows, cert))
      throw std::runtime_error("exact_lp: phase-1 certificate failed self-check");
    verdict.status = FeasStatus::Infeasible;
    verdict.certificate = std::move(cert);
    verdict.note = "linear constraints inconsistent";
    verdict.best_delta = 0.0;
    verdict.delta_upper_bound = -std::numeric_limits<double>::infinity();
    return verdict;
  }

  simplex.phase2();
  const Rational opt = simplex.objective_value();
  verdict.delta_upper_bound = to_double(opt);
  verdict.best_delta = to_double(opt);

  const bool feasible =
      p.strictness == Strictness::Strict ? (opt > 0) : (opt >= 0);
  if (feasible) {
    std::vector<Rational> v = simplex.primal();
    if (!witness_rows_hold(rows, v))
      throw std::runtime_error("exact_lp: witness failed self-check");
    Witness w;
    w.exact = true;
    w.x_exact.assign(v.begin(), v.end() - 1);
    w.delta_exact = v.back();
    w.x.resize(p.num_vars);
    for (int i = 0; i < p.num_vars; ++i) w.x[i] = to_double(w.x_exact[i]);
    w.delta = to_double(w.delta_exact);
    verdict.status = FeasStatus::Feasible;
    verdict.witness = std::move(w);
  } else {
    FarkasCertificate cert;
    simplex.duals(simplex.phase2_cost(), cert.ineq_mult, cert.eq_mult);
    cert.margin_coeff = Rational(1);
    cert.bound = opt;
    if (!certificate_identities_hold(rows, cert))
      throw std::runtime_error("exact_lp: certificate failed self-check");
    verdict.status = FeasStatus::Infeasible;
    verdict.certificate = std::move(cert);
  }
  return verdict;
}

}  // namespace detail

FeasibilityVerdict solve_exact_lp(const LmiProblem& p) { return detail::solve_exact_impl(p); }

namespace detail {

// Shared with replay_check: rebuild the scalar rows and re-verify a
// certificate against them in exact arithmetic.
bool replay_certificate_exact(const LmiProblem& p, const FarkasCertificate& cert) {
  if (!p.all_diagonal()) return false;
  const LpRows rows = build_rows(p);
  if (!certificate_identities_hold(rows, cert)) return false;
  if (cert.margin_coeff > 0) {
    // margin_coeff * delta <= bound for all feasible points.
    if (p.strictness == Strictness::Strict) return cert.bound <= 0;
    return cert.bound < 0;
  }
  return cert.bound < 0;  // 0 <= bound < 0 is absurd outright
}

bool replay_witness_exact(const LmiProblem& p, const Witness& w) {
  if (!p.all_diagonal()) return false;
  const LpRows rows = build_rows(p);
  if (static_cast<int>(w.x_exact.size()) != p.num_vars) return false;
  std::vector<Rational> v = w.x_exact;
  v.push_back(w.delta_exact);
  if (!witness_rows_hold(rows, v)) return false;
  if (p.strictness == Strictness::Strict) return w.delta_exact > 0;
  return w.delta_exact >= 0;
}

}  // namespace detail

}  // namespace oskit
