#pragma once

#include "oskit/opsys.hpp"
#include "oskit/sdp.hpp"

namespace oskit {

/// An element of M_level(S ⊗ T), stored as an M_level-valued coefficient
/// matrix against the two Hermitian bases: block (k,l) of coeffs is C_kl and
/// the element is sum_kl C_kl ⊗ b_k ⊗ c_l.
struct TensorElement {
  OperatorSystem left, right;
  int level = 1;
  Eigen::MatrixXcd coeffs;  // (dim(left)*level) x (dim(right)*level)

  TensorElement(OperatorSystem l, OperatorSystem r, int lvl, Eigen::MatrixXcd c);
  static TensorElement elementary(const OperatorSystem& l, const OperatorSystem& r,
                                  const Eigen::VectorXd& left_coords,
                                  const Eigen::VectorXd& right_coords);

  /// Concrete representative in M_level ⊗ ambient(left) ⊗ ambient(right);
  /// throws if the coefficients do not assemble to a Hermitian element.
  HermMatrix assemble() const;
};

/// Membership in the minimal tensor cone. min is spatial, so positivity is
/// PSD-ness of the assembled Kronecker-ambient representative.
bool min_cone_member(const TensorElement& x, double tol);

/// Membership in S ⊗_max ℓ∞_k through the nuclearity identification with
/// ⊕_k S: every component PSD in the ambient (with a positive margin when
/// strict). Components must lie in s.
bool max_commutative_member(const OperatorSystem& s, const std::vector<HermMatrix>& tuple,
                            bool strict, double tol);

/// One coset representative of a quotient element at a matrix level.
struct QuotientElement {
  QuotientSystem quotient;
  HermMatrix representative;  // in M_level(ambient), ordered kron(ambient, M_level)
  int level = 1;
};

/// Strict positivity of the coset: a kernel element j and margin delta > 0
/// with representative + j - delta*unit >= 0. The kernel must pass the
/// null-subspace check.
FeasibilityVerdict quotient_strict_member(const QuotientElement& e, double tol);

/// The Archimedean relaxation, exposed separately: strict membership of the
/// coset shifted by eps times the unit.
FeasibilityVerdict quotient_relaxed_member(const QuotientElement& e, double eps, double tol);

/// The LMI behind quotient_strict_member, exposed for witness replay.
LmiProblem quotient_member_lmi(const QuotientElement& e);

/// Materialize the kernel element j found by a quotient membership witness.
HermMatrix kernel_combination(const QuotientSystem& q, const Eigen::VectorXd& coords, int level);

struct MaxRankReport {
  bool member = false;
  int p_used = 0, q_used = 0;
  double eps_used = 0.0;

  explicit operator bool() const { return member; }
};

/// Sound inner approximation of the maximal tensor cone: search a
/// decomposition  x + eps(1⊗1) = sum_r S_r ⊗ f_r  with S_r in M_level(S)
/// ambient-PSD and f_r drawn from a fixed positive frame of T. A true
/// answer certifies membership with factor sizes (p_used, q_used); false is
/// inconclusive for the true cone.
MaxRankReport max_bounded_rank_member(const TensorElement& x, int p_max, int q_max,
                                      double eps = 1e-9, double tol = 1e-9);

/// The element sum_i s_i ⊗ ė_i of S ⊗ (ℓ∞_{n+k} / span{(e_n, -e_k)}),
/// realized over the direct sum of n+k copies of S with kernel
/// {(s,..,s,-s,..,-s)}.
QuotientElement tensor_quotient_element(const OperatorSystem& s,
                                        const std::vector<HermMatrix>& tuple, int n, int k);

}  // namespace oskit
