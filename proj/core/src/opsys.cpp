#include "oskit/opsys.hpp"

#include <algorithm>
#include <cmath>

#include "oskit/cpmaps.hpp"

namespace oskit {

namespace {

// Greedy selection of a linearly independent subfamily, exact rational
// elimination when every candidate is diagonal, rank-revealing QR otherwise
// (tolerance 1e-10, stable dimensions are load-bearing for duality).
std::vector<HermMatrix> reduce_span(const std::vector<HermMatrix>& candidates) {
  std::vector<HermMatrix> kept;
  if (candidates.empty()) return kept;
  const bool exact = std::all_of(candidates.begin(), candidates.end(),
                                 [](const HermMatrix& m) { return m.is_diagonal(); });
  if (exact) {
    const int d = candidates[0].dim();
    std::vector<std::vector<Rational>> rows;
    for (const auto& c : candidates) {
      std::vector<Rational> v;
      for (double x : c.diagonal_entries()) v.push_back(exact_rational(x));
      rows.push_back(v);
      RationalMatrix m(static_cast<int>(rows.size()), d);
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < d; ++j) m.at(static_cast<int>(i), j) = rows[i][j];
      if (m.rank() == static_cast<int>(rows.size())) {
        kept.push_back(c);
      } else {
        rows.pop_back();
      }
    }
    return kept;
  }
  const int n2 = candidates[0].dim() * candidates[0].dim();
  Eigen::MatrixXd q(n2, 0);
  for (const auto& c : candidates) {
    Eigen::VectorXd v = herm_coords(c);
    Eigen::VectorXd resid = v - q * (q.transpose() * v);
    if (resid.norm() > 1e-10 * std::max(1.0, v.norm())) {
      q.conservativeResize(Eigen::NoChange, q.cols() + 1);
      q.col(q.cols() - 1) = resid.normalized();
      kept.push_back(c);
    }
  }
  return kept;
}

Eigen::MatrixXd coords_matrix(const std::vector<HermMatrix>& basis) {
  const int n2 = basis[0].dim() * basis[0].dim();
  Eigen::MatrixXd a(n2, static_cast<int>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    a.col(static_cast<long>(k)) = herm_coords(basis[k]);
  return a;
}

}  // namespace

bool OperatorSystem::is_commutative() const { return ambient.is_commutative(); }

bool OperatorSystem::is_diagonal() const {
  return std::all_of(basis.begin(), basis.end(),
                     [](const HermMatrix& m) { return m.is_diagonal(); });
}

bool OperatorSystem::spans_full_ambient() const {
  int full = 0;
  for (int d : ambient.blocks) full += d * d;
  return dim() == full;
}

HermMatrix OperatorSystem::from_coords(const Eigen::VectorXd& coords) const {
  if (coords.size() != dim()) throw std::invalid_argument("from_coords: size mismatch");
  HermMatrix x(ambient_dim());
  for (int k = 0; k < dim(); ++k)
    if (coords[k] != 0.0) x += coords[k] * basis[k];
  return x;
}

void OperatorSystem::validate() const {
  ambient.validate();
  if (basis.empty()) throw std::invalid_argument("OperatorSystem: empty basis");
  if (unit.dim() != ambient.total())
    throw std::invalid_argument("OperatorSystem: unit dimension mismatch");
  for (const auto& b : basis) {
    if (b.dim() != ambient.total())
      throw std::invalid_argument("OperatorSystem: basis dimension mismatch");
    if (!is_block_diagonal(b, ambient, 1e-12 * std::max(1.0, b.max_abs())))
      throw std::invalid_argument("OperatorSystem: basis element outside the block ambient");
  }
  if (!contains(*this, unit, 1e-9))
    throw std::invalid_argument("OperatorSystem: unit not in basis span");
}

OperatorSystem make_linf(int n) {
  if (n < 1) throw std::invalid_argument("make_linf: n must be >= 1");
  OperatorSystem s;
  s.ambient = BlockShape::commutative(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    s.basis.push_back(HermMatrix::diagonal(e));
  }
  s.unit = HermMatrix::identity(n);
  s.label = "linf" + std::to_string(n);
  return s;
}

OperatorSystem make_full(int d) {
  if (d < 1) throw std::invalid_argument("make_full: d must be >= 1");
  OperatorSystem s;
  s.ambient = BlockShape::full(d);
  s.basis = herm_param_basis(d);
  s.unit = HermMatrix::identity(d);
  s.label = "M" + std::to_string(d);
  return s;
}

OperatorSystem make_block_diag_subalgebra(const std::vector<int>& inner_blocks) {
  BlockShape inner{inner_blocks};
  inner.validate();
  const int total = inner.total();
  OperatorSystem s;
  s.ambient = BlockShape::full(total);
  for (std::size_t b = 0; b < inner_blocks.size(); ++b) {
    const int off = inner.offset(static_cast<int>(b));
    for (const auto& h : herm_param_basis(inner_blocks[b])) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(total, total);
      m.block(off, off, inner_blocks[b], inner_blocks[b]) = h.mat();
      s.basis.emplace_back(std::move(m));
    }
  }
  s.unit = HermMatrix::identity(total);
  s.label = "blockalg";
  for (int d : inner_blocks) s.label += "_" + std::to_string(d);
  return s;
}

OperatorSystem make_subsystem(const OperatorSystem& ambient_sys,
                              const std::vector<HermMatrix>& generators,
                              const std::string& label) {
  for (const auto& g : generators) {
    if (g.dim() != ambient_sys.ambient_dim())
      throw std::invalid_argument("make_subsystem: generator outside ambient");
    if (!is_block_diagonal(g, ambient_sys.ambient, 1e-12 * std::max(1.0, g.max_abs())))
      throw std::invalid_argument("make_subsystem: generator outside the block ambient");
  }
  // Generators first: their span often already contains the unit, and
  // coordinates against the generators are what callers reason in.
  std::vector<HermMatrix> candidates(generators);
  candidates.push_back(ambient_sys.unit);
  OperatorSystem s;
  s.ambient = ambient_sys.ambient;
  s.basis = reduce_span(candidates);
  s.unit = ambient_sys.unit;
  s.label = label.empty() ? "sub(" + ambient_sys.label + ")" : label;
  return s;
}

std::optional<Eigen::VectorXd> coords_of(const OperatorSystem& s, const HermMatrix& x,
                                         double tol) {
  if (x.dim() != s.ambient_dim())
    throw std::invalid_argument("coords_of: dimension mismatch");
  if (s.is_diagonal() && x.is_diagonal()) {
    const int d = s.ambient_dim();
    RationalMatrix a(d, s.dim());
    for (int k = 0; k < s.dim(); ++k) {
      auto diag = s.basis[static_cast<std::size_t>(k)].diagonal_entries();
      for (int i = 0; i < d; ++i) a.at(i, k) = exact_rational(diag[static_cast<std::size_t>(i)]);
    }
    std::vector<Rational> rhs;
    for (double v : x.diagonal_entries()) rhs.push_back(exact_rational(v));
    std::vector<Rational> c;
    if (!RationalMatrix::solve(a, rhs, c)) return std::nullopt;
    Eigen::VectorXd out(s.dim());
    for (int k = 0; k < s.dim(); ++k) out[k] = to_double(c[static_cast<std::size_t>(k)]);
    return out;
  }
  Eigen::MatrixXd a = coords_matrix(s.basis);
  Eigen::VectorXd v = herm_coords(x);
  Eigen::VectorXd c = a.colPivHouseholderQr().solve(v);
  const double resid = (a * c - v).cwiseAbs().maxCoeff();
  if (resid > tol * std::max(1.0, x.max_abs())) return std::nullopt;
  return c;
}

bool contains(const OperatorSystem& s, const HermMatrix& x, double tol) {
  return coords_of(s, x, tol).has_value();
}

bool spans_equal(const OperatorSystem& a, const OperatorSystem& b, double tol) {
  if (a.dim() != b.dim() || a.ambient_dim() != b.ambient_dim()) return false;
  for (const auto& m : a.basis)
    if (!contains(b, m, tol)) return false;
  for (const auto& m : b.basis)
    if (!contains(a, m, tol)) return false;
  return true;
}

OperatorSystem amplify(const OperatorSystem& s, int level) {
  if (level < 1) throw std::invalid_argument("amplify: level must be >= 1");
  if (level == 1) return s;
  OperatorSystem out;
  for (int d : s.ambient.blocks) out.ambient.blocks.push_back(d * level);
  const auto level_basis = herm_param_basis(level);
  for (const auto& b : s.basis)
    for (const auto& h : level_basis) out.basis.push_back(kron(b, h));
  out.unit = amplify_element(s.unit, level);
  out.label = "M" + std::to_string(level) + "(" + s.label + ")";
  return out;
}

HermMatrix amplify_element(const HermMatrix& x, int level) {
  return kron(x, HermMatrix::identity(level));
}

OperatorSystem direct_sum_system(const std::vector<OperatorSystem>& parts) {
  if (parts.empty()) throw std::invalid_argument("direct_sum_system: empty list");
  OperatorSystem out;
  for (const auto& p : parts)
    out.ambient.blocks.insert(out.ambient.blocks.end(), p.ambient.blocks.begin(),
                              p.ambient.blocks.end());
  for (std::size_t p = 0; p < parts.size(); ++p)
    for (const auto& b : parts[p].basis)
      out.basis.push_back(embed_summand(parts, static_cast<int>(p), b));
  std::vector<HermMatrix> units;
  for (const auto& p : parts) units.push_back(p.unit);
  out.unit = direct_sum(units);
  out.label = parts[0].label;
  for (std::size_t p = 1; p < parts.size(); ++p) out.label += "(+)" + parts[p].label;
  return out;
}

HermMatrix embed_summand(const std::vector<OperatorSystem>& parts, int p, const HermMatrix& x) {
  int total = 0, off = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (static_cast<int>(i) < p) off += parts[i].ambient_dim();
    total += parts[i].ambient_dim();
  }
  if (x.dim() != parts[static_cast<std::size_t>(p)].ambient_dim())
    throw std::invalid_argument("embed_summand: dimension mismatch");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(total, total);
  m.block(off, off, x.dim(), x.dim()) = x.mat();
  return HermMatrix(std::move(m));
}

StateFunctional::StateFunctional(OperatorSystem sys, Eigen::VectorXd c)
    : system(std::move(sys)), coords(std::move(c)) {
  if (coords.size() != system.dim())
    throw std::invalid_argument("StateFunctional: coordinate size mismatch");
  auto unit_coords = coords_of(system, system.unit, 1e-9);
  if (!unit_coords) throw std::invalid_argument("StateFunctional: unit not in span");
  const double on_unit = coords.dot(*unit_coords);
  if (std::abs(on_unit - 1.0) > 1e-9)
    throw std::invalid_argument("StateFunctional: value on unit is " + std::to_string(on_unit));
}

double StateFunctional::value(const HermMatrix& x, double tol) const {
  auto c = coords_of(system, x, tol);
  if (!c) throw std::invalid_argument("StateFunctional::value: element outside the system");
  return coords.dot(*c);
}

StateFunctional StateFunctional::averaging(const OperatorSystem& sys) {
  Eigen::VectorXd c(sys.dim());
  for (int k = 0; k < sys.dim(); ++k)
    c[k] = sys.basis[static_cast<std::size_t>(k)].trace() / sys.ambient_dim();
  return StateFunctional(sys, c);
}

std::pair<OperatorSystem, StateFunctional> pullback(
    const std::vector<std::pair<OperatorSystem, StateFunctional>>& parts) {
  if (parts.empty()) throw std::invalid_argument("pullback: empty list");
  for (const auto& [sys, w] : parts) {
    if (!spans_equal(sys, w.system, 1e-9))
      throw std::invalid_argument("pullback: state bound to a different system");
    if (!is_positive_state(sys, w.coords, 1e-9))
      throw std::invalid_argument("pullback: functional is not a state");
  }
  if (parts.size() == 1) return {parts[0].first, parts[0].second};

  std::vector<OperatorSystem> systems;
  for (const auto& [sys, w] : parts) systems.push_back(sys);

  int joint_dim = 0;
  for (const auto& s : systems) joint_dim += s.dim();

  // Rows: w_1(s_1) - w_i(s_i) = 0 for i >= 2, over joint basis coordinates.
  const int k = static_cast<int>(parts.size());
  RationalMatrix rows(k - 1, joint_dim);
  {
    int off = 0;
    for (int p = 0; p < k; ++p) {
      const auto& w = parts[static_cast<std::size_t>(p)].second;
      for (int j = 0; j < systems[static_cast<std::size_t>(p)].dim(); ++j) {
        const Rational v = exact_rational(w.coords[j]);
        if (p == 0) {
          for (int r = 0; r < k - 1; ++r) rows.at(r, off + j) = v;
        } else {
          rows.at(p - 1, off + j) = -v;
        }
      }
      off += systems[static_cast<std::size_t>(p)].dim();
    }
  }
  auto null_coords = RationalMatrix::nullspace(rows);

  OperatorSystem joint = direct_sum_system(systems);
  OperatorSystem out;
  out.ambient = joint.ambient;
  out.unit = joint.unit;
  for (const auto& v : null_coords) {
    HermMatrix b(joint.ambient_dim());
    for (int j = 0; j < joint_dim; ++j)
      if (v[static_cast<std::size_t>(j)] != 0)
        b += to_double(v[static_cast<std::size_t>(j)]) * joint.basis[static_cast<std::size_t>(j)];
    out.basis.push_back(b);
  }
  out.label = systems[0].label;
  for (std::size_t p = 1; p < systems.size(); ++p) out.label += "(||)" + systems[p].label;
  if (!contains(out, out.unit, 1e-9))
    throw std::runtime_error("pullback: unit fell outside the pullback span");

  // The amalgamated state: evaluate the first component.
  const auto& w1 = parts[0].second;
  Eigen::VectorXd state_coords(out.dim());
  const int d1 = systems[0].ambient_dim();
  for (int j = 0; j < out.dim(); ++j) {
    HermMatrix first_comp(
        Eigen::MatrixXcd(out.basis[static_cast<std::size_t>(j)].mat().topLeftCorner(d1, d1)));
    state_coords[j] = w1.value(first_comp);
  }
  return {out, StateFunctional(out, state_coords)};
}

QuotientSystem pushout_quotient(const std::vector<OperatorSystem>& systems) {
  if (systems.empty()) throw std::invalid_argument("pushout_quotient: empty list");
  QuotientSystem q;
  q.ambient_system = direct_sum_system(systems);
  for (std::size_t j = 1; j < systems.size(); ++j) {
    HermMatrix u = embed_summand(systems, 0, systems[0].unit) -
                   embed_summand(systems, static_cast<int>(j), systems[j].unit);
    q.kernel_basis.push_back(std::move(u));
  }
  return q;
}

bool null_subspace_check(const QuotientSystem& q, double tol) {
  if (q.kernel_basis.empty()) return true;
  const auto& amb = q.ambient_system.ambient;
  for (const auto& kb : q.kernel_basis)
    if (kb.dim() != amb.total())
      throw std::invalid_argument("null_subspace_check: kernel dimension mismatch");
  // Search a PSD element of J with trace 1.
  LmiProblem p;
  p.num_vars = q.kernel_dim();
  p.strictness = Strictness::Closed;
  std::vector<std::vector<HermMatrix>> coeff_blocks(amb.blocks.size());
  for (const auto& kb : q.kernel_basis) {
    auto parts = split_blocks(kb, amb);
    for (std::size_t b = 0; b < parts.size(); ++b) coeff_blocks[b].push_back(parts[b]);
  }
  for (std::size_t b = 0; b < amb.blocks.size(); ++b)
    p.blocks.emplace_back(HermMatrix(amb.blocks[b]), coeff_blocks[b]);
  LinearEq eq;
  eq.coeffs = Eigen::VectorXd(p.num_vars);
  for (int j = 0; j < p.num_vars; ++j)
    eq.coeffs[j] = q.kernel_basis[static_cast<std::size_t>(j)].trace();
  eq.rhs = 1.0;
  p.linear_eqs.push_back(eq);
  FeasibilityVerdict v = solve(p, tol);
  if (v.unknown())
    throw std::runtime_error("null_subspace_check: undecided at tolerance " +
                             std::to_string(tol));
  return v.infeasible();
}

bool is_faithful_state(const OperatorSystem& s, const StateFunctional& w, double tol) {
  // A feasible point of {x in S, x >= 0, tr x = 1, w(x) <= 0} refutes
  // faithfulness; closed-mode infeasibility certifies it.
  LmiProblem p;
  p.num_vars = s.dim();
  p.strictness = Strictness::Closed;
  std::vector<std::vector<HermMatrix>> coeff_blocks(s.ambient.blocks.size());
  for (const auto& b : s.basis) {
    auto parts = split_blocks(b, s.ambient);
    for (std::size_t i = 0; i < parts.size(); ++i) coeff_blocks[i].push_back(parts[i]);
  }
  for (std::size_t i = 0; i < s.ambient.blocks.size(); ++i)
    p.blocks.emplace_back(HermMatrix(s.ambient.blocks[i]), coeff_blocks[i]);
  {
    std::vector<HermMatrix> c;
    for (int k = 0; k < s.dim(); ++k) c.push_back(HermMatrix::diagonal({-w.coords[k]}));
    p.blocks.emplace_back(HermMatrix(1), c);
  }
  LinearEq eq;
  eq.coeffs = Eigen::VectorXd(s.dim());
  for (int k = 0; k < s.dim(); ++k) eq.coeffs[k] = s.basis[static_cast<std::size_t>(k)].trace();
  eq.rhs = 1.0;
  p.linear_eqs.push_back(eq);
  FeasibilityVerdict v = solve(p, tol);
  if (v.unknown())
    throw std::runtime_error("is_faithful_state: undecided at tolerance " + std::to_string(tol));
  return v.infeasible();
}

DualSystem dual(const OperatorSystem& s, const StateFunctional& w, double tol) {
  if (!is_faithful_state(s, w, tol))
    throw std::invalid_argument("dual: order unit state is not faithful");
  return DualSystem{s, w};
}

OperatorSystem generated_algebra(const OperatorSystem& s) {
  std::vector<HermMatrix> seed;
  seed.push_back(s.unit);
  seed.insert(seed.end(), s.basis.begin(), s.basis.end());
  std::vector<HermMatrix> current = reduce_span(seed);
  int full = 0;
  for (int d : s.ambient.blocks) full += d * d;
  const int ambient_total = s.ambient_dim();
  for (int round = 0; round <= ambient_total * ambient_total; ++round) {
    const int before = static_cast<int>(current.size());
    if (before == full) break;
    std::vector<HermMatrix> candidates = current;
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::size_t j = i; j < current.size(); ++j) {
        Eigen::MatrixXcd prod = current[i].mat() * current[j].mat();
        candidates.emplace_back(Eigen::MatrixXcd(0.5 * (prod + prod.adjoint().eval())));
        Eigen::MatrixXcd anti = prod - prod.adjoint().eval();
        candidates.emplace_back(Eigen::MatrixXcd(Complex(0.0, -0.5) * anti));
      }
    }
    current = reduce_span(candidates);
    if (static_cast<int>(current.size()) == before) break;
  }
  OperatorSystem out;
  out.ambient = s.ambient;
  out.basis = std::move(current);
  out.unit = s.unit;
  out.label = "C*{" + s.label + "}";
  return out;
}

OperatorSystem make_np_pullback(int n, int k) {
  std::vector<std::pair<OperatorSystem, StateFunctional>> parts;
  for (int i = 0; i < k; ++i) {
    OperatorSystem l = make_linf(n);
    StateFunctional w = StateFunctional::averaging(l);
    parts.emplace_back(std::move(l), std::move(w));
  }
  auto [sys, w] = pullback(parts);
  sys.label = "V_" + std::to_string(n) + "," + std::to_string(k);
  return sys;
}

QuotientSystem make_np_pushout(int n, int k) {
  std::vector<OperatorSystem> parts(static_cast<std::size_t>(k), make_linf(n));
  QuotientSystem q = pushout_quotient(parts);
  q.ambient_system.label = "NP_" + std::to_string(n) + "," + std::to_string(k);
  return q;
}

OperatorSystem make_standard_np() {
  OperatorSystem l4 = make_linf(4);
  std::vector<HermMatrix> gens = {HermMatrix::diagonal({1, 0, 1, 0}),
                                  HermMatrix::diagonal({0, 1, 0, 1}),
                                  HermMatrix::diagonal({1, 0, 0, 1})};
  return make_subsystem(l4, gens, "V");
}

}  // namespace oskit
