#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oskit/linalg.hpp"

namespace oskit {

/// One affine Hermitian constraint block:
///   constant + sum_i x_i * coeffs[i] - delta * margin_unit  >= 0.
struct LmiBlock {
  HermMatrix constant;
  std::vector<HermMatrix> coeffs;
  HermMatrix margin_unit;

  LmiBlock(HermMatrix c, std::vector<HermMatrix> a)
      : constant(std::move(c)), coeffs(std::move(a)), margin_unit(HermMatrix::identity(constant.dim())) {}
  LmiBlock(HermMatrix c, std::vector<HermMatrix> a, HermMatrix unit)
      : constant(std::move(c)), coeffs(std::move(a)), margin_unit(std::move(unit)) {}
};

struct LinearEq {
  Eigen::VectorXd coeffs;
  double rhs = 0.0;
};

/// How the maximized margin delta is read off as a verdict.
///   Strict: feasible means some delta > 0 exists (a < b meaning b - a >= delta 1).
///   Closed: feasible means delta >= 0, i.e. membership in the closed cone.
enum class Strictness { Strict, Closed };

/// A strict-feasibility problem over affine Hermitian blocks. delta is an
/// explicit decision variable maximized by the solver, capped at delta_cap
/// so unbounded margins stay finite; the cap never changes the verdict.
struct LmiProblem {
  int num_vars = 0;
  std::vector<LmiBlock> blocks;
  std::vector<LinearEq> linear_eqs;
  Strictness strictness = Strictness::Strict;
  double delta_cap = 1.0;

  void validate() const;       // throws std::invalid_argument
  bool all_diagonal() const;   // every constant/coefficient/margin matrix diagonal
  int scalar_rows() const;     // total diagonal rows on the exact path
};

enum class FeasStatus { Feasible, Infeasible, Unknown };
std::string to_string(FeasStatus s);

struct Witness {
  Eigen::VectorXd x;
  double delta = 0.0;
  bool exact = false;
  std::vector<Rational> x_exact;  // populated on the exact path
  Rational delta_exact;
};

/// Multipliers proving margin_coeff * delta <= bound for every feasible
/// point: a nonnegative combination of the scalar inequality rows (diagonal
/// entries of the blocks, cap row last) plus a signed combination of the
/// linear equalities whose variable coefficients cancel exactly.
/// Infeasibility follows when bound <= 0 (strict mode, margin_coeff > 0),
/// bound < 0 (closed mode), or margin_coeff == 0 with bound < 0.
struct FarkasCertificate {
  std::vector<Rational> ineq_mult;  // one per scalar row + one for the cap row
  std::vector<Rational> eq_mult;
  Rational margin_coeff;
  Rational bound;
};

struct FeasibilityVerdict {
  FeasStatus status = FeasStatus::Unknown;
  std::optional<Witness> witness;
  std::optional<FarkasCertificate> certificate;
  bool exact = false;
  double best_delta = 0.0;        // best margin demonstrated by a point
  double delta_upper_bound = 0.0; // proven upper bound on the optimal margin
  double tol_used = 0.0;
  std::string note;

  bool feasible() const { return status == FeasStatus::Feasible; }
  bool infeasible() const { return status == FeasStatus::Infeasible; }
  bool unknown() const { return status == FeasStatus::Unknown; }
};

/// Decide the problem. All-diagonal problems are routed to the exact
/// rational path automatically; everything else goes through the numeric
/// barrier. Numeric verdicts land in Unknown when the best margin stays
/// inside (-10 tol, +10 tol).
FeasibilityVerdict solve(const LmiProblem& p, double tol);

/// Exact rational verdict for all-diagonal problems: a rational witness and
/// margin, or a Farkas certificate. Never Unknown. Rejects non-diagonal
/// blocks.
FeasibilityVerdict solve_exact_lp(const LmiProblem& p);

/// Independent re-verification of a witness or certificate; pure, shares no
/// state with the solvers. Exact verdicts replay in rational arithmetic with
/// zero tolerance.
bool replay_check(const LmiProblem& p, const FeasibilityVerdict& v, double tol);

namespace detail {
FeasibilityVerdict solve_barrier(const LmiProblem& p, double tol);
FeasibilityVerdict solve_exact_impl(const LmiProblem& p);
}  // namespace detail

}  // namespace oskit
