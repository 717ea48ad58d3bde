#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oskit/linalg.hpp"
#include "oskit/sdp.hpp"

namespace oskit {

/// A concrete operator system: a unital adjoint-closed subspace of a block
/// matrix algebra  ⊕_i M_{d_i} ⊆ M_D, stored through a Hermitian basis of its
/// self-adjoint part. The unit is always the ambient identity and always a
/// member of the basis span.
struct OperatorSystem {
  BlockShape ambient;
  std::vector<HermMatrix> basis;
  HermMatrix unit;
  std::string label;

  int dim() const { return static_cast<int>(basis.size()); }
  int ambient_dim() const { return ambient.total(); }
  bool is_commutative() const;
  /// All basis elements diagonal matrices (the exact-arithmetic carrier).
  bool is_diagonal() const;
  bool spans_full_ambient() const;

  HermMatrix from_coords(const Eigen::VectorXd& coords) const;
  void validate() const;
};

OperatorSystem make_linf(int n);
OperatorSystem make_full(int d);
/// The subalgebra  ⊕_i M_{d_i} of M_D (D = sum d_i) with its ambient taken
/// to be the full M_D.
OperatorSystem make_block_diag_subalgebra(const std::vector<int>& inner_blocks);
/// span(generators ∪ {unit}) inside the ambient of an existing system,
/// reduced to a linearly independent basis (exact elimination on the
/// diagonal path).
OperatorSystem make_subsystem(const OperatorSystem& ambient_sys,
                              const std::vector<HermMatrix>& generators,
                              const std::string& label = "");

bool contains(const OperatorSystem& s, const HermMatrix& x, double tol);
std::optional<Eigen::VectorXd> coords_of(const OperatorSystem& s, const HermMatrix& x,
                                         double tol);
/// Same self-adjoint span (mutual containment at the given tolerance).
bool spans_equal(const OperatorSystem& a, const OperatorSystem& b, double tol);

/// M_m(S), with elements ordered as kron(system element, M_m entry).
OperatorSystem amplify(const OperatorSystem& s, int level);
HermMatrix amplify_element(const HermMatrix& x, int level);

OperatorSystem direct_sum_system(const std::vector<OperatorSystem>& parts);
/// Embed an element of part p into the direct sum (zero elsewhere).
HermMatrix embed_summand(const std::vector<OperatorSystem>& parts, int p, const HermMatrix& x);

struct StateFunctional {
  OperatorSystem system;
  Eigen::VectorXd coords;  // value on basis element i

  StateFunctional(OperatorSystem sys, Eigen::VectorXd c);
  double value_on_basis(int i) const { return coords[i]; }
  double value(const HermMatrix& x, double tol = 1e-9) const;

  /// The normalized trace restricted to the system: the averaging
  /// state on ℓ∞_n, faithful on every concrete system.
  static StateFunctional averaging(const OperatorSystem& sys);
};

std::pair<OperatorSystem, StateFunctional> pullback(
    const std::vector<std::pair<OperatorSystem, StateFunctional>>& parts);

/// An operator system together with a null-subspace kernel J.
struct QuotientSystem {
  OperatorSystem ambient_system;
  std::vector<HermMatrix> kernel_basis;

  int kernel_dim() const { return static_cast<int>(kernel_basis.size()); }
};

/// Quotient characterization of the pushout: (⊕ S_i) / span{(e,-e,0,..), ...}.
QuotientSystem pushout_quotient(const std::vector<OperatorSystem>& systems);

/// True iff J contains no nonzero PSD element, decided through an
/// LmiProblem with trace normalization. Throws when the numeric path cannot
/// decide.
bool null_subspace_check(const QuotientSystem& q, double tol = 1e-9);

struct DualSystem {
  OperatorSystem predual;
  StateFunctional order_unit_state;
};

/// Minimize the state over trace-normalized PSD elements of the system;
/// faithful iff the minimum is strictly positive.
bool is_faithful_state(const OperatorSystem& s, const StateFunctional& w, double tol = 1e-9);

/// Requires a faithful state, which becomes the Archimedean order unit of
/// the dual.
DualSystem dual(const OperatorSystem& s, const StateFunctional& w, double tol = 1e-9);

/// Smallest unital adjoint-closed subspace containing s and closed under
/// products: iterate span-of-products to a fixed point.
OperatorSystem generated_algebra(const OperatorSystem& s);

/// The Namioka-Phelps test family: V_{n,k} = pullback of k copies of ℓ∞_n
/// via averaging states, concretely a subsystem of ℓ∞_{nk}.
OperatorSystem make_np_pullback(int n, int k);
/// Its predual pushout NP_{n,k} = ⊔_k ℓ∞_n as a quotient of ℓ∞_{nk}.
QuotientSystem make_np_pushout(int n, int k);
/// The standard test system V = {(a,b,c,d) : a+b = c+d} ⊂ ℓ∞_4.
OperatorSystem make_standard_np();

}  // namespace oskit
