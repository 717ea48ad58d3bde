#include <cmath>

#include "oskit/sdp.hpp"

namespace oskit {

namespace detail {
bool replay_certificate_exact(const LmiProblem& p, const FarkasCertificate& cert);
bool replay_witness_exact(const LmiProblem& p, const Witness& w);
}  // namespace detail

void LmiProblem::validate() const {
  if (num_vars < 0) throw std::invalid_argument("LmiProblem: negative num_vars");
  if (blocks.empty()) throw std::invalid_argument("LmiProblem: no blocks");
  if (!(delta_cap > 0)) throw std::invalid_argument("LmiProblem: delta_cap must be positive");
  for (const auto& blk : blocks) {
    if (static_cast<int>(blk.coeffs.size()) != num_vars)
      throw std::invalid_argument("LmiProblem: coefficient count != num_vars");
    for (const auto& a : blk.coeffs)
      if (a.dim() != blk.constant.dim())
        throw std::invalid_argument("LmiProblem: coefficient dimension mismatch");
    if (blk.margin_unit.dim() != blk.constant.dim())
      throw std::invalid_argument("LmiProblem: margin_unit dimension mismatch");
    if (min_eig(blk.margin_unit) <= 0)
      throw std::invalid_argument("LmiProblem: margin_unit not strictly positive");
  }
  for (const auto& eq : linear_eqs)
    if (eq.coeffs.size() != num_vars)
      throw std::invalid_argument("LmiProblem: equality coefficient size mismatch");
}

bool LmiProblem::all_diagonal() const {
  for (const auto& blk : blocks) {
    if (!blk.constant.is_diagonal() || !blk.margin_unit.is_diagonal()) return false;
    for (const auto& a : blk.coeffs)
      if (!a.is_diagonal()) return false;
  }
  return true;
}

int LmiProblem::scalar_rows() const {
  int rows = 0;
  for (const auto& blk : blocks) rows += blk.constant.dim();
  return rows + 1;  // + cap row
}

std::string to_string(FeasStatus s) {
  switch (s) {
    case FeasStatus::Feasible: return "feasible";
    case FeasStatus::Infeasible: return "infeasible";
    case FeasStatus::Unknown: return "unknown";
  }
  return "unknown";
}

FeasibilityVerdict solve(const LmiProblem& p, double tol) {
  if (tol < 0) throw std::invalid_argument("solve: tol must be >= 0");
  p.validate();
  if (p.all_diagonal()) {
    FeasibilityVerdict v = detail::solve_exact_impl(p);
    v.tol_used = tol;
    return v;
  }
  return detail::solve_barrier(p, tol);
}

bool replay_check(const LmiProblem& p, const FeasibilityVerdict& v, double tol) {
  p.validate();
  if (!v.witness && !v.certificate)
    throw std::invalid_argument("replay_check: verdict carries no witness or certificate");

  if (v.certificate) {
    if (!p.all_diagonal()) return false;  // certificates are an exact-path promise
    return detail::replay_certificate_exact(p, *v.certificate);
  }

  const Witness& w = *v.witness;
  if (w.exact) return detail::replay_witness_exact(p, w);

  if (w.x.size() != p.num_vars) return false;
  if (w.delta > p.delta_cap * (1 + 1e-12)) return false;
  for (const auto& blk : p.blocks) {
    HermMatrix g = blk.constant - w.delta * blk.margin_unit;
    for (int i = 0; i < p.num_vars; ++i) g += w.x[i] * blk.coeffs[i];
    if (min_eig(g) < -tol) return false;
  }
  for (const auto& eq : p.linear_eqs) {
    const double lhs = eq.coeffs.dot(w.x);
    const double scale = std::max({1.0, std::abs(eq.rhs), eq.coeffs.cwiseAbs().maxCoeff() *
                                                              w.x.cwiseAbs().maxCoeff()});
    if (std::abs(lhs - eq.rhs) > 100.0 * tol * scale) return false;
  }
  if (p.strictness == Strictness::Strict && !(w.delta > 0)) return false;
  if (p.strictness == Strictness::Closed && w.delta < -tol) return false;
  return true;
}

}  // namespace oskit
