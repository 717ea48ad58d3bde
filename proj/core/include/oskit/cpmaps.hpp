#pragma once

#include <vector>

#include "oskit/opsys.hpp"

namespace oskit {

/// A linear map from an operator system into M_m, stored by its values on
/// the Hermitian basis. CP-ness is decided by Choi feasibility: directly
/// when the domain spans its full ambient, through an Arveson extension
/// search otherwise.
struct CpMap {
  OperatorSystem domain;
  int codomain_dim = 1;
  std::vector<HermMatrix> values;

  CpMap(OperatorSystem dom, int m, std::vector<HermMatrix> vals);

  HermMatrix apply(const HermMatrix& x, double tol = 1e-9) const;
  /// Complex-linear extension to non-Hermitian block-diagonal arguments.
  Eigen::MatrixXcd apply_complex(const Eigen::MatrixXcd& x, double tol = 1e-9) const;

  static CpMap from_functional(const OperatorSystem& s, const Eigen::VectorXd& coords);
  static CpMap identity_map(const OperatorSystem& full_sys);
  static CpMap transpose_map(int d);

  friend CpMap operator+(const CpMap& a, const CpMap& b);
  friend CpMap operator-(const CpMap& a, const CpMap& b);
  friend CpMap operator*(double c, const CpMap& a);
};

/// The ambient of a system as an operator system in its own right
/// (per-block Hermitian matrix units).
OperatorSystem full_system(const BlockShape& shape);

/// Choi blocks (one per ambient block) of a map whose domain spans the full
/// ambient; entry (a,b) of block i is f(E^{(i)}_{ab}).
std::vector<HermMatrix> choi_blocks(const CpMap& f);
double choi_min_eig(const CpMap& f);

bool is_cp(const CpMap& f, double tol);
FeasibilityVerdict is_cp_verdict(const CpMap& f, double tol);

/// f <= g in the CP order: g - f completely positive.
bool cp_leq(const CpMap& f, const CpMap& g, double tol);

bool is_positive_state(const OperatorSystem& s, const Eigen::VectorXd& coords, double tol);

struct SumConstraint {
  std::vector<int> lhs, rhs;  // sum_{lhs} ext_i = sum_{rhs} ext_i on big
};
struct DominanceConstraint {
  int dominated = 0, dominating = 0;  // ext_dominated <= ext_dominating
};
/// weight∘ext_a = weight∘ext_b on big, weight a Hermitian functional on the
/// codomain (the trace-composition constraint family with weight = I).
struct FunctionalConstraint {
  int map_a = 0, map_b = 0;
  HermMatrix weight;
};

struct ExtensionProblem {
  OperatorSystem small, big;  // small ⊆ big, same ambient
  int codomain_dim = 1;
  std::vector<CpMap> maps;  // on small
  std::vector<SumConstraint> sum_constraints;
  std::vector<DominanceConstraint> dominance_constraints;
  std::vector<FunctionalConstraint> functional_constraints;
};

/// The Choi-variable LMI behind solve_extension, exposed so constructive
/// witnesses (conditional-expectation compositions) can be replay-checked
/// against the same problem the solver saw.
struct ExtensionEncoding {
  LmiProblem lmi;
  BlockShape ambient;
  int codomain_dim = 1;
  int num_maps = 0;
  int num_aux = 0;  // one auxiliary Choi per dominance constraint
  int vars_per_map = 0;
  std::vector<int> block_param_offset;  // within one map's variable segment

  /// Pack ambient extensions (and optionally explicit dominance
  /// auxiliaries; Choi differences by default) into a witness vector.
  Eigen::VectorXd pack(const std::vector<CpMap>& ambient_extensions,
                       const std::vector<CpMap>& dominance_aux = {}) const;
  std::vector<HermMatrix> unpack_choi(const Eigen::VectorXd& x, int slot) const;
};

ExtensionEncoding encode_extension(const ExtensionProblem& p);

/// Feasibility of a CP extension family satisfying every sum, dominance and
/// functional constraint; witness = the extension Choi matrices. Inputs are
/// validated CP first (near-CP within tol is accepted with a warning note).
FeasibilityVerdict solve_extension(const ExtensionProblem& p, double tol);

/// The (n,k) sum-identity extension problem.
FeasibilityVerdict riesz_arveson(const OperatorSystem& small, const OperatorSystem& big, int n,
                                 int k, const std::vector<CpMap>& maps, double tol);

FeasibilityVerdict dominated_extend(const OperatorSystem& small, const OperatorSystem& big,
                                    const std::vector<CpMap>& dominated, const CpMap& dominating,
                                    double tol);

/// Trace-orthogonal projection of the ambient onto the span of the given
/// system. For a unital *-subalgebra this is the trace-preserving
/// conditional expectation, the constructive witness for every extension
/// property over C*-pairs.
CpMap conditional_expectation(const OperatorSystem& subalgebra);

/// f ∘ g, where g lands inside f's domain.
CpMap compose(const CpMap& f, const CpMap& g, double tol = 1e-9);

/// Componentwise map into ⊕_t M_{m_t}, embedded block-diagonally.
CpMap direct_sum_map(const std::vector<CpMap>& components);

/// Strict positivity of a level-m element of the dual (a map S -> M_m):
/// feasibility of f - delta * (w ⊗ I_m) being CP for some delta > 0, with
/// the margin carried by a strictly positive density of the order-unit
/// state.
FeasibilityVerdict functional_strict_positivity(const DualSystem& dual_sys, const CpMap& element,
                                                double tol);

}  // namespace oskit
