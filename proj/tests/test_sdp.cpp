#include "doctest.h"

#include <functional>
#include <thread>
#include <vector>

#include "oskit/sdp.hpp"
#include "test_util.hpp"

using namespace oskit;

namespace {

// Scalar-row view of an all-diagonal problem, rebuilt independently of the
// solver: rows c_r + a_r.v >= 0 over v = (x, delta), cap row included.
struct ScalarRows {
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> c;
  std::vector<std::vector<Rational>> e;
  std::vector<Rational> g;
  int nv;
};

ScalarRows scalar_rows(const LmiProblem& p) {
  ScalarRows out;
  out.nv = p.num_vars + 1;
  for (const auto& blk : p.blocks) {
    auto cd = blk.constant.diagonal_entries();
    auto ud = blk.margin_unit.diagonal_entries();
    for (int j = 0; j < blk.constant.dim(); ++j) {
      std::vector<Rational> row(out.nv, Rational(0));
      for (int i = 0; i < p.num_vars; ++i)
        row[i] = exact_rational(blk.coeffs[i].diagonal_entries()[j]);
      row[p.num_vars] = -exact_rational(ud[j]);
      out.a.push_back(row);
      out.c.push_back(exact_rational(cd[j]));
    }
  }
  std::vector<Rational> cap(out.nv, Rational(0));
  cap[p.num_vars] = -1;
  out.a.push_back(cap);
  out.c.push_back(exact_rational(p.delta_cap));
  for (const auto& eq : p.linear_eqs) {
    std::vector<Rational> row(out.nv, Rational(0));
    for (int i = 0; i < p.num_vars; ++i) row[i] = exact_rational(eq.coeffs[i]);
    out.e.push_back(row);
    out.g.push_back(exact_rational(eq.rhs));
  }
  return out;
}

// Brute-force vertex enumeration: the optimum of max delta over a pointed
// polyhedron is attained at a basic feasible point, i.e. at some choice of
// (nv - #eqs) active rows. Requires instances with box rows so the feasible
// set is pointed.
bool vertex_enumerate(const ScalarRows& rows, Rational& best, bool& any_feasible) {
  const int nv = rows.nv;
  const int q = static_cast<int>(rows.e.size());
  const int need = nv - q;
  const int nrows = static_cast<int>(rows.a.size());
  if (need < 0 || need > nrows) return false;
  std::vector<int> idx(need);
  any_feasible = false;
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == need) {
      RationalMatrix m(nv, nv);
      std::vector<Rational> rhs(nv);
      for (int t = 0; t < need; ++t) {
        for (int j = 0; j < nv; ++j) m.at(t, j) = rows.a[idx[t]][j];
        rhs[t] = -rows.c[idx[t]];
      }
      for (int t = 0; t < q; ++t) {
        for (int j = 0; j < nv; ++j) m.at(need + t, j) = rows.e[t][j];
        rhs[need + t] = rows.g[t];
      }
      if (m.rank() < nv) return;
      std::vector<Rational> v;
      if (!RationalMatrix::solve(m, rhs, v)) return;
      for (int r = 0; r < nrows; ++r) {
        Rational s = rows.c[r];
        for (int j = 0; j < nv; ++j) s += rows.a[r][j] * v[j];
        if (s < 0) return;
      }
      if (!any_feasible || v[nv - 1] > best) best = v[nv - 1];
      any_feasible = true;
      return;
    }
    for (int i = start; i <= nrows - (need - k); ++i) {
      idx[k] = i;
      rec(i + 1, k + 1);
    }
  };
  rec(0, 0);
  return true;
}

HermMatrix diag(std::initializer_list<double> d) { return HermMatrix::diagonal(d); }

LmiProblem example22_problem(bool with_v_membership) {
  // Variables a_1..a_4; interpolant constraints from x_1,x_2 below and
  // x_3,x_4 above, one diagonal block per constraint.
  LmiProblem p;
  p.num_vars = 4;
  std::vector<HermMatrix> coeff;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> e(4, 0.0);
    e[i] = 1.0;
    coeff.push_back(HermMatrix::diagonal(e));
  }
  const HermMatrix x1 = diag({-3, 1, -1, -1});
  const HermMatrix x2 = diag({1, -3, -1, -1});
  const HermMatrix x3 = diag({2, 2, 4, 0});
  const HermMatrix x4 = diag({2, 2, 0, 4});
  std::vector<HermMatrix> neg_coeff;
  for (const auto& c : coeff) neg_coeff.push_back(-1.0 * c);
  p.blocks.emplace_back(-1.0 * x1, coeff);
  p.blocks.emplace_back(-1.0 * x2, coeff);
  p.blocks.emplace_back(x3, neg_coeff);
  p.blocks.emplace_back(x4, neg_coeff);
  if (with_v_membership) {
    LinearEq eq;
    eq.coeffs = Eigen::VectorXd(4);
    eq.coeffs << 1, 1, -1, -1;
    eq.rhs = 0.0;
    p.linear_eqs.push_back(eq);
  }
  return p;
}

}  // namespace

TEST_CASE("no variables, constant -I is infeasible with replayable certificate") {
  LmiProblem p;
  p.num_vars = 0;
  p.blocks.emplace_back(-1.0 * HermMatrix::identity(3), std::vector<HermMatrix>{});
  FeasibilityVerdict v = solve_exact_lp(p);
  CHECK(v.infeasible());
  REQUIRE(v.certificate.has_value());
  CHECK(replay_check(p, v, 0.0));
  CHECK(v.delta_upper_bound == doctest::Approx(-1.0));
}

TEST_CASE("x I >= delta I is feasible with unit margin") {
  LmiProblem p;
  p.num_vars = 1;
  p.blocks.emplace_back(HermMatrix(2), std::vector<HermMatrix>{HermMatrix::identity(2)});
  FeasibilityVerdict v = solve_exact_lp(p);
  CHECK(v.feasible());
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->delta_exact == Rational(1));  // cap
  CHECK(replay_check(p, v, 0.0));
}

TEST_CASE("scalar interpolation 0 < a < 1 gives a = 1/2, delta = 1/2") {
  LmiProblem p;
  p.num_vars = 1;
  p.blocks.emplace_back(HermMatrix(1), std::vector<HermMatrix>{HermMatrix::identity(1)});
  p.blocks.emplace_back(HermMatrix::identity(1),
                        std::vector<HermMatrix>{-1.0 * HermMatrix::identity(1)});
  FeasibilityVerdict v = solve_exact_lp(p);
  CHECK(v.feasible());
  CHECK(v.witness->delta_exact == Rational(1, 2));
  CHECK(v.witness->x_exact[0] == Rational(1, 2));
}

TEST_CASE("Namioka-Phelps interpolation data over the free ambient") {
  LmiProblem p = example22_problem(false);
  FeasibilityVerdict v = solve_exact_lp(p);
  CHECK(v.feasible());
  CHECK(v.witness->delta_exact == Rational(1, 2));
  CHECK(v.witness->x_exact == std::vector<Rational>{Rational(3, 2), Rational(3, 2),
                                                    Rational(-1, 2), Rational(-1, 2)});
  CHECK(replay_check(p, v, 0.0));
}

TEST_CASE("Namioka-Phelps interpolation data with the membership equality is infeasible") {
  LmiProblem p = example22_problem(true);
  FeasibilityVerdict v = solve_exact_lp(p);
  CHECK(v.infeasible());
  REQUIRE(v.certificate.has_value());
  CHECK(replay_check(p, v, 0.0));
  // sup delta = -1/2: summing the four binding coordinate rows against the
  // membership equality.
  CHECK(v.certificate->margin_coeff == Rational(1));
  CHECK(v.certificate->bound == Rational(-1, 2));
}

TEST_CASE("hand-built Farkas combination replays") {
  LmiProblem p = example22_problem(true);
  FarkasCertificate cert;
  cert.ineq_mult.assign(17, Rational(0));
  cert.ineq_mult[1] = Rational(1, 4);   // a_2 >= 1 + delta (from x_1, coord 2)
  cert.ineq_mult[4] = Rational(1, 4);   // a_1 >= 1 + delta (from x_2, coord 1)
  cert.ineq_mult[11] = Rational(1, 4);  // a_4 <= -delta   (from x_3, coord 4)
  cert.ineq_mult[14] = Rational(1, 4);  // a_3 <= -delta   (from x_4, coord 3)
  cert.eq_mult = {Rational(1, 4)};
  cert.margin_coeff = Rational(1);
  cert.bound = Rational(-1, 2);
  FeasibilityVerdict v;
  v.status = FeasStatus::Infeasible;
  v.exact = true;
  v.certificate = cert;
  CHECK(replay_check(p, v, 0.0));

  // Breaking any identity must break the replay.
  FarkasCertificate bad = cert;
  bad.eq_mult[0] = Rational(-1, 4);
  FeasibilityVerdict vb = v;
  vb.certificate = bad;
  CHECK_FALSE(replay_check(p, vb, 0.0));
}

TEST_CASE("perturbing a witness on an active constraint fails replay") {
  LmiProblem p = example22_problem(false);
  FeasibilityVerdict v = solve_exact_lp(p);
  REQUIRE(v.feasible());
  const double tol = 1e-9;
  Witness w;
  w.exact = false;
  w.x = v.witness->x;
  w.delta = v.witness->delta;
  FeasibilityVerdict numeric;
  numeric.status = FeasStatus::Feasible;
  numeric.witness = w;
  CHECK(replay_check(p, numeric, tol));
  numeric.witness->x[0] -= 1000 * tol;  // all coordinates are active at the optimum
  CHECK_FALSE(replay_check(p, numeric, tol));
}

TEST_CASE("exact solver agrees with vertex enumeration on random boxed problems") {
  TestRng rng(401);
  int feasible_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int nx = rng.uniform_int(1, 3);
    LmiProblem p;
    p.num_vars = nx;
    const int nblocks = rng.uniform_int(1, 2);
    for (int b = 0; b < nblocks; ++b) {
      const int d = rng.uniform_int(1, 3);
      std::vector<HermMatrix> coeffs;
      for (int i = 0; i < nx; ++i) coeffs.push_back(random_diag_dyadic(rng, d, 2.0));
      p.blocks.emplace_back(random_diag_dyadic(rng, d, 2.0), coeffs);
    }
    // Box rows keep the polyhedron pointed for the enumeration oracle.
    {
      std::vector<HermMatrix> coeffs;
      std::vector<double> cst(2 * nx, 4.0);
      for (int i = 0; i < nx; ++i) {
        std::vector<double> col(2 * nx, 0.0);
        col[2 * i] = -1.0;
        col[2 * i + 1] = 1.0;
        coeffs.push_back(HermMatrix::diagonal(col));
      }
      p.blocks.emplace_back(HermMatrix::diagonal(cst), coeffs);
    }
    if (rng.uniform_int(0, 1) == 1) {
      LinearEq eq;
      eq.coeffs = Eigen::VectorXd(nx);
      Eigen::VectorXd point(nx);
      for (int i = 0; i < nx; ++i) {
        eq.coeffs[i] = rng.dyadic(2.0);
        point[i] = rng.dyadic(1.0);
      }
      eq.rhs = eq.coeffs.dot(point);
      p.linear_eqs.push_back(eq);
    }

    FeasibilityVerdict v = solve_exact_lp(p);
    CHECK(replay_check(p, v, 0.0));

    ScalarRows rows = scalar_rows(p);
    Rational best;
    bool any = false;
    REQUIRE(vertex_enumerate(rows, best, any));
    REQUIRE(any);  // boxed problems always admit some (x, very negative delta) vertex
    if (v.feasible()) {
      ++feasible_seen;
      CHECK(v.witness->delta_exact == best);
      CHECK(best > 0);
    } else {
      ++infeasible_seen;
      CHECK(v.certificate->bound == best);
      CHECK(best <= 0);
    }
  }
  CHECK(feasible_seen > 5);
  CHECK(infeasible_seen > 5);
}

TEST_CASE("adding a constraint never flips infeasible to feasible") {
  TestRng rng(431);
  for (int trial = 0; trial < 40; ++trial) {
    const int nx = rng.uniform_int(1, 2);
    LmiProblem p;
    p.num_vars = nx;
    std::vector<HermMatrix> coeffs;
    for (int i = 0; i < nx; ++i) coeffs.push_back(random_diag_dyadic(rng, 3, 2.0));
    p.blocks.emplace_back(random_diag_dyadic(rng, 3, 1.0), coeffs);
    LinearEq eq;  // a pinning equality makes infeasibility common
    eq.coeffs = Eigen::VectorXd::Zero(nx);
    eq.coeffs[0] = 1.0;
    eq.rhs = rng.dyadic(1.0);
    p.linear_eqs.push_back(eq);
    FeasibilityVerdict before = solve_exact_lp(p);

    LmiProblem q = p;
    std::vector<HermMatrix> coeffs2;
    for (int i = 0; i < nx; ++i) coeffs2.push_back(random_diag_dyadic(rng, 2, 2.0));
    q.blocks.emplace_back(random_diag_dyadic(rng, 2, 1.0), coeffs2);
    FeasibilityVerdict after = solve_exact_lp(q);
    if (before.infeasible()) CHECK(after.infeasible());
  }
}

TEST_CASE("status is invariant under common positive scaling") {
  TestRng rng(457);
  for (int trial = 0; trial < 20; ++trial) {
    LmiProblem p;
    p.num_vars = 2;
    std::vector<HermMatrix> coeffs{random_diag_dyadic(rng, 3, 2.0),
                                   random_diag_dyadic(rng, 3, 2.0)};
    p.blocks.emplace_back(random_diag_dyadic(rng, 3, 1.0), coeffs);
    LinearEq eq;
    eq.coeffs = Eigen::VectorXd(2);
    eq.coeffs << 1, 1;
    eq.rhs = rng.dyadic(1.0);
    p.linear_eqs.push_back(eq);

    LmiProblem scaled = p;
    const double c = 2.5;
    for (auto& blk : scaled.blocks) {
      blk.constant = c * blk.constant;
      blk.margin_unit = c * blk.margin_unit;
      for (auto& a : blk.coeffs) a = c * a;
    }
    CHECK(solve_exact_lp(p).status == solve_exact_lp(scaled).status);
  }
}

TEST_CASE("solve routes all-diagonal problems to the exact path") {
  LmiProblem p = example22_problem(true);
  FeasibilityVerdict v = solve(p, 1e-9);
  CHECK(v.exact);
  CHECK(v.infeasible());
}

TEST_CASE("barrier: feasible strict problem with an off-diagonal block") {
  LmiProblem p;
  p.num_vars = 1;
  Eigen::MatrixXcd c(2, 2);
  c << 1.0, 0.25, 0.25, 1.0;
  p.blocks.emplace_back(HermMatrix(c), std::vector<HermMatrix>{HermMatrix::identity(2)});
  FeasibilityVerdict v = solve(p, 1e-9);
  CHECK_FALSE(v.exact);
  CHECK(v.feasible());
  CHECK(replay_check(p, v, 1e-9));
  CHECK(v.witness->delta > 0.5);
}

TEST_CASE("barrier: infeasible off-diagonal block with certified bound") {
  // [[x, 1], [1, -x]] has eigenvalues +-sqrt(1+x^2), so the margin never
  // exceeds -1.
  LmiProblem p;
  p.num_vars = 1;
  Eigen::MatrixXcd c(2, 2);
  c << 0.0, 1.0, 1.0, 0.0;
  Eigen::MatrixXcd a(2, 2);
  a << 1.0, 0.0, 0.0, -1.0;
  p.blocks.emplace_back(HermMatrix(c), std::vector<HermMatrix>{HermMatrix(a)});
  FeasibilityVerdict v = solve(p, 1e-9);
  CHECK(v.infeasible());
  CHECK(v.delta_upper_bound < -0.9);
  CHECK_THROWS_AS(replay_check(p, v, 1e-9), std::invalid_argument);
}

TEST_CASE("barrier: boundary problem lands in the unknown band") {
  // [[x, y], [y, -x]] has margin sup exactly 0 at x = y = 0.
  LmiProblem p;
  p.num_vars = 2;
  Eigen::MatrixXcd ax(2, 2), ay(2, 2);
  ax << 1.0, 0.0, 0.0, -1.0;
  ay << 0.0, 1.0, 1.0, 0.0;
  p.blocks.emplace_back(HermMatrix(2), std::vector<HermMatrix>{HermMatrix(ax), HermMatrix(ay)});
  FeasibilityVerdict v = solve(p, 1e-9);
  CHECK(v.unknown());
}

TEST_CASE("barrier: equality elimination") {
  // x1 + x2 = 1 with block diag-embedded rotation; margin 1/2 at x1 = x2 = 1/2.
  LmiProblem p;
  p.num_vars = 2;
  Eigen::MatrixXcd a1(2, 2), a2(2, 2);
  a1 << 1.0, 0.0, 0.0, 0.0;
  a2 << 0.5, 0.5, 0.5, 0.5;  // PSD rank one
  p.blocks.emplace_back(HermMatrix(2), std::vector<HermMatrix>{HermMatrix(a1), HermMatrix(a2)});
  LinearEq eq;
  eq.coeffs = Eigen::VectorXd(2);
  eq.coeffs << 1.0, -1.0;
  eq.rhs = 0.0;
  p.linear_eqs.push_back(eq);
  // At x1 = x2 = t the block is t*(a1 + a2) with min eig t * mineig(...) > 0 for t > 0.
  FeasibilityVerdict v = solve(p, 1e-9);
  CHECK(v.feasible());
  CHECK(replay_check(p, v, 1e-9));
  CHECK(std::abs(v.witness->x[0] - v.witness->x[1]) < 1e-7);
}

TEST_CASE("inconsistent equalities are infeasible on both paths") {
  LmiProblem p;
  p.num_vars = 1;
  p.blocks.emplace_back(HermMatrix::identity(1),
                        std::vector<HermMatrix>{HermMatrix::identity(1)});
  LinearEq e1, e2;
  e1.coeffs = Eigen::VectorXd::Ones(1);
  e1.rhs = 0.0;
  e2.coeffs = Eigen::VectorXd::Ones(1);
  e2.rhs = 1.0;
  p.linear_eqs = {e1, e2};
  FeasibilityVerdict v = solve_exact_lp(p);
  CHECK(v.infeasible());
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->margin_coeff == Rational(0));
  CHECK(v.certificate->bound < 0);
  CHECK(replay_check(p, v, 0.0));
}

TEST_CASE("closed mode accepts margin exactly zero on the exact path") {
  // x >= delta and -x >= delta: sup delta = 0 at x = 0.
  LmiProblem p;
  p.num_vars = 1;
  p.blocks.emplace_back(HermMatrix(1), std::vector<HermMatrix>{HermMatrix::identity(1)});
  p.blocks.emplace_back(HermMatrix(1), std::vector<HermMatrix>{-1.0 * HermMatrix::identity(1)});
  p.strictness = Strictness::Strict;
  CHECK(solve_exact_lp(p).infeasible());
  p.strictness = Strictness::Closed;
  FeasibilityVerdict v = solve_exact_lp(p);
  CHECK(v.feasible());
  CHECK(v.witness->delta_exact == Rational(0));
  CHECK(replay_check(p, v, 0.0));
}

TEST_CASE("margin unit must be strictly positive") {
  LmiProblem p;
  p.num_vars = 0;
  p.blocks.emplace_back(HermMatrix::identity(2), std::vector<HermMatrix>{},
                        HermMatrix::diagonal({1.0, 0.0}));
  CHECK_THROWS_AS(solve(p, 1e-9), std::invalid_argument);
}

TEST_CASE("concurrent solves agree with serial solves") {
  // the solvers hold no shared mutable state; hammer them from threads
  TestRng rng(761);
  std::vector<LmiProblem> problems;
  for (int i = 0; i < 16; ++i) {
    LmiProblem p;
    p.num_vars = 2;
    std::vector<HermMatrix> coeffs{random_diag_dyadic(rng, 3, 2.0),
                                   random_diag_dyadic(rng, 3, 2.0)};
    p.blocks.emplace_back(random_diag_dyadic(rng, 3, 1.0), coeffs);
    problems.push_back(std::move(p));
  }
  std::vector<FeasStatus> serial;
  for (const auto& p : problems) serial.push_back(solve(p, 1e-9).status);

  std::vector<FeasStatus> parallel(problems.size(), FeasStatus::Unknown);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = static_cast<std::size_t>(t); i < problems.size(); i += 4)
        parallel[i] = solve(problems[i], 1e-9).status;
    });
  }
  for (auto& th : threads) th.join();
  CHECK(parallel == serial);
}

TEST_CASE("exact solver self-replays on larger random systems") {
  TestRng rng(769);
  for (int trial = 0; trial < 10; ++trial) {
    LmiProblem p;
    p.num_vars = 8;
    for (int b = 0; b < 3; ++b) {
      std::vector<HermMatrix> coeffs;
      for (int i = 0; i < 8; ++i) coeffs.push_back(random_diag_dyadic(rng, 10, 2.0));
      p.blocks.emplace_back(random_diag_dyadic(rng, 10, 1.0), coeffs);
    }
    LinearEq eq;
    eq.coeffs = Eigen::VectorXd(8);
    for (int i = 0; i < 8; ++i) eq.coeffs[i] = rng.dyadic(1.0);
    eq.rhs = rng.dyadic(1.0);
    p.linear_eqs.push_back(eq);
    FeasibilityVerdict v = solve_exact_lp(p);
    CHECK_FALSE(v.unknown());
    CHECK(replay_check(p, v, 0.0));
  }
}
