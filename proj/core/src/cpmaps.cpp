#include "oskit/cpmaps.hpp"

#include <algorithm>
#include <cmath>

namespace oskit {

namespace {

// Action of a Choi-variable basis element H (Hermitian, in M_{d*m}) on a
// d x d block X:  sum_{a,b} X_ab * H[(a,b) m-block], an m x m matrix,
// Hermitian whenever X is.
Eigen::MatrixXcd choi_action(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& x, int m) {
  const int d = static_cast<int>(x.rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      if (x(a, b) != Complex(0, 0)) out += x(a, b) * h.block(a * m, b * m, m, m);
  return out;
}

}  // namespace

CpMap::CpMap(OperatorSystem dom, int m, std::vector<HermMatrix> vals)
    : domain(std::move(dom)), codomain_dim(m), values(std::move(vals)) {
  if (codomain_dim < 1) throw std::invalid_argument("CpMap: codomain_dim must be >= 1");
  if (static_cast<int>(values.size()) != domain.dim())
    throw std::invalid_argument("CpMap: one value per basis element required");
  for (const auto& v : values)
    if (v.dim() != codomain_dim) throw std::invalid_argument("CpMap: value dimension mismatch");
}

HermMatrix CpMap::apply(const HermMatrix& x, double tol) const {
  auto c = coords_of(domain, x, tol);
  if (!c) throw std::invalid_argument("CpMap::apply: element outside the domain");
  HermMatrix out(codomain_dim);
  for (int k = 0; k < domain.dim(); ++k)
    if ((*c)[k] != 0.0) out += (*c)[k] * values[static_cast<std::size_t>(k)];
  return out;
}

Eigen::MatrixXcd CpMap::apply_complex(const Eigen::MatrixXcd& x, double tol) const {
  const Eigen::MatrixXcd re = 0.5 * (x + x.adjoint().eval());
  const Eigen::MatrixXcd im = Complex(0, -0.5) * (x - x.adjoint().eval());
  const HermMatrix fre = apply(HermMatrix(re), tol);
  const HermMatrix fim = apply(HermMatrix(im), tol);
  return fre.mat() + Complex(0, 1) * fim.mat();
}

CpMap CpMap::from_functional(const OperatorSystem& s, const Eigen::VectorXd& coords) {
  if (coords.size() != s.dim())
    throw std::invalid_argument("from_functional: coordinate size mismatch");
  std::vector<HermMatrix> vals;
  for (int k = 0; k < s.dim(); ++k) vals.push_back(HermMatrix::diagonal({coords[k]}));
  return CpMap(s, 1, std::move(vals));
}

CpMap CpMap::identity_map(const OperatorSystem& full_sys) {
  if (!full_sys.spans_full_ambient() || full_sys.ambient.blocks.size() != 1)
    throw std::invalid_argument("identity_map: expected a full single-block system");
  return CpMap(full_sys, full_sys.ambient_dim(), full_sys.basis);
}

CpMap CpMap::transpose_map(int d) {
  OperatorSystem full = make_full(d);
  std::vector<HermMatrix> vals;
  for (const auto& b : full.basis) vals.emplace_back(Eigen::MatrixXcd(b.mat().transpose()));
  return CpMap(std::move(full), d, std::move(vals));
}

CpMap operator+(const CpMap& a, const CpMap& b) {
  if (a.codomain_dim != b.codomain_dim || a.domain.dim() != b.domain.dim())
    throw std::invalid_argument("CpMap: shape mismatch");
  std::vector<HermMatrix> vals;
  for (std::size_t k = 0; k < a.values.size(); ++k) vals.push_back(a.values[k] + b.values[k]);
  return CpMap(a.domain, a.codomain_dim, std::move(vals));
}

CpMap operator-(const CpMap& a, const CpMap& b) {
  if (a.codomain_dim != b.codomain_dim || a.domain.dim() != b.domain.dim())
    throw std::invalid_argument("CpMap: shape mismatch");
  std::vector<HermMatrix> vals;
  for (std::size_t k = 0; k < a.values.size(); ++k) vals.push_back(a.values[k] - b.values[k]);
  return CpMap(a.domain, a.codomain_dim, std::move(vals));
}

CpMap operator*(double c, const CpMap& a) {
  std::vector<HermMatrix> vals;
  for (const auto& v : a.values) vals.push_back(c * v);
  return CpMap(a.domain, a.codomain_dim, std::move(vals));
}

OperatorSystem full_system(const BlockShape& shape) {
  shape.validate();
  OperatorSystem s;
  s.ambient = shape;
  const int total = shape.total();
  for (std::size_t b = 0; b < shape.blocks.size(); ++b) {
    const int off = shape.offset(static_cast<int>(b));
    for (const auto& h : herm_param_basis(shape.blocks[b])) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(total, total);
      m.block(off, off, shape.blocks[b], shape.blocks[b]) = h.mat();
      s.basis.emplace_back(std::move(m));
    }
  }
  s.unit = HermMatrix::identity(total);
  s.label = "ambient";
  return s;
}

std::vector<HermMatrix> choi_blocks(const CpMap& f) {
  if (!f.domain.spans_full_ambient())
    throw std::invalid_argument("choi_blocks: domain must span its full ambient");
  const BlockShape& shape = f.domain.ambient;
  const int m = f.codomain_dim;
  std::vector<HermMatrix> out;
  for (std::size_t i = 0; i < shape.blocks.size(); ++i) {
    const int d = shape.blocks[i];
    const int off = shape.offset(static_cast<int>(i));
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(d * m, d * m);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        Eigen::MatrixXcd unit = Eigen::MatrixXcd::Zero(f.domain.ambient_dim(),
                                                       f.domain.ambient_dim());
        unit(off + a, off + b) = 1.0;
        g.block(a * m, b * m, m, m) = f.apply_complex(unit);
      }
    }
    out.emplace_back(std::move(g));
  }
  return out;
}

double choi_min_eig(const CpMap& f) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& g : choi_blocks(f)) worst = std::min(worst, min_eig(g));
  return worst;
}

FeasibilityVerdict is_cp_verdict(const CpMap& f, double tol) {
  FeasibilityVerdict v;
  v.tol_used = tol;
  if (f.domain.spans_full_ambient()) {
    const double me = choi_min_eig(f);
    v.best_delta = me;
    v.delta_upper_bound = me;
    v.status = me >= -tol ? FeasStatus::Feasible : FeasStatus::Infeasible;
    v.exact = true;
    if (me >= -tol && me < 0) v.note = "near-CP: Choi min eigenvalue " + std::to_string(me);
    return v;
  }
  ExtensionProblem p;
  p.small = f.domain;
  p.big = full_system(f.domain.ambient);
  p.codomain_dim = f.codomain_dim;
  p.maps = {f};
  const ExtensionEncoding enc = encode_extension(p);
  return solve(enc.lmi, tol);
}

bool is_cp(const CpMap& f, double tol) {
  FeasibilityVerdict v = is_cp_verdict(f, tol);
  if (v.unknown()) throw std::runtime_error("is_cp: undecided at tolerance " + std::to_string(tol));
  return v.feasible();
}

bool cp_leq(const CpMap& f, const CpMap& g, double tol) { return is_cp(g - f, tol); }

bool is_positive_state(const OperatorSystem& s, const Eigen::VectorXd& coords, double tol) {
  return is_cp(CpMap::from_functional(s, coords), tol);
}

namespace {

struct ActionTable {
  // action[block][param][basis element] as an m x m matrix
  std::vector<std::vector<std::vector<Eigen::MatrixXcd>>> act;
};

ActionTable tabulate_actions(const BlockShape& shape, int m,
                             const std::vector<HermMatrix>& elements) {
  ActionTable t;
  t.act.resize(shape.blocks.size());
  for (std::size_t i = 0; i < shape.blocks.size(); ++i) {
    const int d = shape.blocks[i];
    const int off = shape.offset(static_cast<int>(i));
    const auto params = herm_param_basis(d * m);
    t.act[i].resize(params.size());
    for (std::size_t q = 0; q < params.size(); ++q) {
      t.act[i][q].reserve(elements.size());
      for (const auto& el : elements) {
        Eigen::MatrixXcd x = el.mat().block(off, off, d, d);
        t.act[i][q].push_back(choi_action(params[q].mat(), x, m));
      }
    }
  }
  return t;
}

}  // namespace

ExtensionEncoding encode_extension(const ExtensionProblem& p) {
  if (!(p.small.ambient == p.big.ambient))
    throw std::invalid_argument("encode_extension: small and big must share the ambient");
  const BlockShape& shape = p.small.ambient;
  const int m = p.codomain_dim;
  for (const auto& f : p.maps) {
    if (f.codomain_dim != m)
      throw std::invalid_argument("encode_extension: codomain mismatch");
    if (f.domain.dim() != p.small.dim())
      throw std::invalid_argument("encode_extension: map domain does not match small");
  }
  for (const auto& b : p.small.basis)
    if (!contains(p.big, b, 1e-9))
      throw std::invalid_argument("encode_extension: small is not contained in big");

  // Restriction rows read values against small's basis, so the maps must be
  // bound to that basis, not merely to an equal span.
  for (const auto& f : p.maps)
    for (int k = 0; k < p.small.dim(); ++k)
      if ((f.domain.basis[static_cast<std::size_t>(k)] -
           p.small.basis[static_cast<std::size_t>(k)])
              .max_abs() != 0.0)
        throw std::invalid_argument("encode_extension: map domain basis differs from small");

  ExtensionEncoding enc;
  enc.ambient = shape;
  enc.codomain_dim = m;
  enc.num_maps = static_cast<int>(p.maps.size());
  enc.num_aux = static_cast<int>(p.dominance_constraints.size());
  for (std::size_t i = 0; i < shape.blocks.size(); ++i) {
    enc.block_param_offset.push_back(enc.vars_per_map);
    const int dm = shape.blocks[i] * m;
    enc.vars_per_map += dm * dm;
  }
  const int slots = enc.num_maps + enc.num_aux;
  const int nvars = slots * enc.vars_per_map;

  LmiProblem& lmi = enc.lmi;
  lmi.num_vars = nvars;
  lmi.strictness = Strictness::Closed;

  // PSD block per (slot, ambient block).
  for (int t = 0; t < slots; ++t) {
    for (std::size_t i = 0; i < shape.blocks.size(); ++i) {
      const int dm = shape.blocks[i] * m;
      const auto params = herm_param_basis(dm);
      std::vector<HermMatrix> coeffs(static_cast<std::size_t>(nvars), HermMatrix(dm));
      const int base = t * enc.vars_per_map + enc.block_param_offset[i];
      for (std::size_t q = 0; q < params.size(); ++q)
        coeffs[static_cast<std::size_t>(base) + q] = params[q];
      lmi.blocks.emplace_back(HermMatrix(dm), std::move(coeffs));
    }
  }

  const ActionTable small_act = tabulate_actions(shape, m, p.small.basis);
  const ActionTable big_act = tabulate_actions(shape, m, p.big.basis);

  // Value of slot t on element index e (from the given table), one equality
  // row per Hermitian coordinate of the codomain.
  auto add_value_rows = [&](const std::vector<std::pair<int, double>>& slots_signs,
                            const ActionTable& table, int elem_idx, const HermMatrix& rhs) {
    for (int pcoord = 0; pcoord < m * m; ++pcoord) {
      LinearEq eq;
      eq.coeffs = Eigen::VectorXd::Zero(nvars);
      for (const auto& [slot, sign] : slots_signs) {
        for (std::size_t i = 0; i < shape.blocks.size(); ++i) {
          const int base = slot * enc.vars_per_map + enc.block_param_offset[i];
          const auto& acts = table.act[i];
          for (std::size_t q = 0; q < acts.size(); ++q) {
            const Eigen::MatrixXcd& a = acts[q][static_cast<std::size_t>(elem_idx)];
            // herm_coords of the (Hermitian) action, coordinate pcoord
            const double coeff = herm_coords(HermMatrix(Eigen::MatrixXcd(
                0.5 * (a + a.adjoint().eval()))))[pcoord];
            if (coeff != 0.0) eq.coeffs[base + static_cast<int>(q)] += sign * coeff;
          }
        }
      }
      eq.rhs = herm_coords(rhs)[pcoord];
      lmi.linear_eqs.push_back(std::move(eq));
    }
  };

  // Restriction: each extension agrees with its map on the small basis.
  for (int t = 0; t < enc.num_maps; ++t)
    for (int k = 0; k < p.small.dim(); ++k)
      add_value_rows({{t, 1.0}}, small_act, k, p.maps[static_cast<std::size_t>(t)].values[static_cast<std::size_t>(k)]);

  // Sum constraints on the big basis.
  for (const auto& sc : p.sum_constraints) {
    std::vector<std::pair<int, double>> ss;
    for (int t : sc.lhs) ss.emplace_back(t, 1.0);
    for (int t : sc.rhs) ss.emplace_back(t, -1.0);
    for (int j = 0; j < p.big.dim(); ++j)
      add_value_rows(ss, big_act, j, HermMatrix(m));
  }

  // Dominance through an auxiliary PSD Choi equal to the difference on big.
  for (std::size_t c = 0; c < p.dominance_constraints.size(); ++c) {
    const auto& dc = p.dominance_constraints[c];
    const int aux_slot = enc.num_maps + static_cast<int>(c);
    for (int j = 0; j < p.big.dim(); ++j)
      add_value_rows({{dc.dominating, 1.0}, {dc.dominated, -1.0}, {aux_slot, -1.0}}, big_act, j,
                     HermMatrix(m));
  }

  // weight∘ext_a = weight∘ext_b on the big basis: one scalar row each.
  for (const auto& fc : p.functional_constraints) {
    if (fc.weight.dim() != m)
      throw std::invalid_argument("encode_extension: functional weight dimension mismatch");
    for (int j = 0; j < p.big.dim(); ++j) {
      LinearEq eq;
      eq.coeffs = Eigen::VectorXd::Zero(nvars);
      for (const auto& [slot, sign] : std::vector<std::pair<int, double>>{
               {fc.map_a, 1.0}, {fc.map_b, -1.0}}) {
        for (std::size_t i = 0; i < shape.blocks.size(); ++i) {
          const int base = slot * enc.vars_per_map + enc.block_param_offset[i];
          const auto& acts = big_act.act[i];
          for (std::size_t q = 0; q < acts.size(); ++q) {
            const double coeff =
                (fc.weight.mat() * acts[q][static_cast<std::size_t>(j)]).trace().real();
            if (coeff != 0.0) eq.coeffs[base + static_cast<int>(q)] += sign * coeff;
          }
        }
      }
      eq.rhs = 0.0;
      lmi.linear_eqs.push_back(std::move(eq));
    }
  }
  return enc;
}

Eigen::VectorXd ExtensionEncoding::pack(const std::vector<CpMap>& ambient_extensions,
                                        const std::vector<CpMap>& dominance_aux) const {
  if (static_cast<int>(ambient_extensions.size()) != num_maps)
    throw std::invalid_argument("pack: extension count mismatch");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(lmi.num_vars);
  auto put = [&](int slot, const std::vector<HermMatrix>& chois) {
    for (std::size_t i = 0; i < chois.size(); ++i) {
      const Eigen::VectorXd c = herm_coords(chois[i]);
      const int base = slot * vars_per_map + block_param_offset[i];
      for (int q = 0; q < c.size(); ++q) x[base + q] = c[q];
    }
  };
  std::vector<std::vector<HermMatrix>> map_chois;
  for (int t = 0; t < num_maps; ++t)
    map_chois.push_back(choi_blocks(ambient_extensions[static_cast<std::size_t>(t)]));
  for (int t = 0; t < num_maps; ++t) put(t, map_chois[static_cast<std::size_t>(t)]);
  for (int c = 0; c < num_aux; ++c) {
    if (!dominance_aux.empty()) {
      put(num_maps + c, choi_blocks(dominance_aux[static_cast<std::size_t>(c)]));
    }
  }
  return x;
}

std::vector<HermMatrix> ExtensionEncoding::unpack_choi(const Eigen::VectorXd& x, int slot) const {
  std::vector<HermMatrix> out;
  for (std::size_t i = 0; i < ambient.blocks.size(); ++i) {
    const int dm = ambient.blocks[i] * codomain_dim;
    const int base = slot * vars_per_map + block_param_offset[i];
    out.push_back(herm_from_coords(dm, x.segment(base, dm * dm)));
  }
  return out;
}

FeasibilityVerdict solve_extension(const ExtensionProblem& p, double tol) {
  std::string warnings;
  for (std::size_t t = 0; t < p.maps.size(); ++t) {
    FeasibilityVerdict cps = is_cp_verdict(p.maps[t], tol);
    if (cps.infeasible())
      throw std::invalid_argument("solve_extension: input map " + std::to_string(t) +
                                  " is not completely positive");
    if (cps.unknown())
      warnings += "input map " + std::to_string(t) + " CP-status undecided; ";
    else if (!cps.note.empty())
      warnings += "input map " + std::to_string(t) + " " + cps.note + "; ";
  }
  for (const auto& dc : p.dominance_constraints) {
    if (dc.dominated < 0 || dc.dominated >= static_cast<int>(p.maps.size()) ||
        dc.dominating < 0 || dc.dominating >= static_cast<int>(p.maps.size()))
      throw std::invalid_argument("solve_extension: dominance index out of range");
  }
  for (const auto& sc : p.sum_constraints)
    for (int t : sc.lhs)
      if (t < 0 || t >= static_cast<int>(p.maps.size()))
        throw std::invalid_argument("solve_extension: sum index out of range");
  const ExtensionEncoding enc = encode_extension(p);
  FeasibilityVerdict v = solve(enc.lmi, tol);
  if (!warnings.empty()) v.note = warnings + v.note;
  return v;
}

FeasibilityVerdict riesz_arveson(const OperatorSystem& small, const OperatorSystem& big, int n,
                                 int k, const std::vector<CpMap>& maps, double tol) {
  if (static_cast<int>(maps.size()) != n + k)
    throw std::invalid_argument("riesz_arveson: expected n + k maps");
  // The (n,k) sum identity must hold on the inputs.
  for (int j = 0; j < small.dim(); ++j) {
    HermMatrix diff(maps[0].codomain_dim);
    for (int t = 0; t < n; ++t) diff += maps[static_cast<std::size_t>(t)].values[static_cast<std::size_t>(j)];
    for (int t = n; t < n + k; ++t) diff -= maps[static_cast<std::size_t>(t)].values[static_cast<std::size_t>(j)];
    if (diff.max_abs() > tol * 100 * std::max(1.0, maps[0].values[static_cast<std::size_t>(j)].max_abs() + 1))
      throw std::invalid_argument("riesz_arveson: sum identity violated on the inputs");
  }
  ExtensionProblem p;
  p.small = small;
  p.big = big;
  p.codomain_dim = maps[0].codomain_dim;
  p.maps = maps;
  SumConstraint sc;
  for (int t = 0; t < n; ++t) sc.lhs.push_back(t);
  for (int t = n; t < n + k; ++t) sc.rhs.push_back(t);
  p.sum_constraints.push_back(std::move(sc));
  return solve_extension(p, tol);
}

FeasibilityVerdict dominated_extend(const OperatorSystem& small, const OperatorSystem& big,
                                    const std::vector<CpMap>& dominated, const CpMap& dominating,
                                    double tol) {
  for (const auto& f : dominated)
    if (!cp_leq(f, dominating, tol))
      throw std::invalid_argument("dominated_extend: domination violated on the inputs");
  ExtensionProblem p;
  p.small = small;
  p.big = big;
  p.codomain_dim = dominating.codomain_dim;
  p.maps = dominated;
  p.maps.push_back(dominating);
  const int dom_idx = static_cast<int>(p.maps.size()) - 1;
  for (int t = 0; t < dom_idx; ++t)
    p.dominance_constraints.push_back({t, dom_idx});
  return solve_extension(p, tol);
}

CpMap conditional_expectation(const OperatorSystem& subalgebra) {
  const OperatorSystem ambient = full_system(subalgebra.ambient);
  const int n = subalgebra.dim();
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gram(i, j) = herm_inner(subalgebra.basis[static_cast<std::size_t>(i)],
                              subalgebra.basis[static_cast<std::size_t>(j)]);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  std::vector<HermMatrix> values;
  for (const auto& b : ambient.basis) {
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = herm_inner(subalgebra.basis[static_cast<std::size_t>(i)], b);
    Eigen::VectorXd c = ldlt.solve(rhs);
    HermMatrix e(subalgebra.ambient_dim());
    for (int i = 0; i < n; ++i)
      if (c[i] != 0.0) e += c[i] * subalgebra.basis[static_cast<std::size_t>(i)];
    values.push_back(std::move(e));
  }
  return CpMap(ambient, subalgebra.ambient_dim(), std::move(values));
}

CpMap compose(const CpMap& f, const CpMap& g, double tol) {
  if (g.codomain_dim != f.domain.ambient_dim())
    throw std::invalid_argument("compose: inner codomain does not match outer ambient");
  std::vector<HermMatrix> values;
  for (const auto& v : g.values) values.push_back(f.apply(v, tol));
  return CpMap(g.domain, f.codomain_dim, std::move(values));
}

CpMap direct_sum_map(const std::vector<CpMap>& components) {
  if (components.empty()) throw std::invalid_argument("direct_sum_map: empty list");
  std::vector<HermMatrix> values;
  for (int k = 0; k < components[0].domain.dim(); ++k) {
    std::vector<HermMatrix> parts;
    for (const auto& f : components) {
      if (f.domain.dim() != components[0].domain.dim())
        throw std::invalid_argument("direct_sum_map: domain mismatch");
      parts.push_back(f.values[static_cast<std::size_t>(k)]);
    }
    values.push_back(direct_sum(parts));
  }
  int m = 0;
  for (const auto& f : components) m += f.codomain_dim;
  return CpMap(components[0].domain, m, std::move(values));
}

FeasibilityVerdict functional_strict_positivity(const DualSystem& dual_sys, const CpMap& element,
                                                double tol) {
  const OperatorSystem& s = dual_sys.predual;
  if (element.domain.dim() != s.dim())
    throw std::invalid_argument("functional_strict_positivity: element domain mismatch");
  const int m = element.codomain_dim;
  const int bigdim = s.ambient_dim();

  // A strictly positive density for the order-unit state: rho with
  // tr(rho b_k) = w(b_k). The normalized trace covers the averaging states;
  // otherwise solve the pairing equations and insist on positivity.
  HermMatrix rho = (1.0 / bigdim) * HermMatrix::identity(bigdim);
  bool rho_ok = true;
  for (int k = 0; k < s.dim(); ++k)
    if (std::abs(herm_inner(rho, s.basis[static_cast<std::size_t>(k)]) -
                 dual_sys.order_unit_state.coords[k]) > 1e-11)
      rho_ok = false;
  if (!rho_ok) {
    Eigen::MatrixXd a(s.dim(), bigdim * bigdim);
    Eigen::VectorXd rhs(s.dim());
    for (int k = 0; k < s.dim(); ++k) {
      // tr(rho b) is linear in rho's Hermitian coordinates
      for (int q = 0; q < bigdim * bigdim; ++q) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(bigdim * bigdim);
        e[q] = 1.0;
        a(k, q) = herm_inner(herm_from_coords(bigdim, e), s.basis[static_cast<std::size_t>(k)]);
      }
      rhs[k] = dual_sys.order_unit_state.coords[k];
    }
    Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(rhs);
    rho = herm_from_coords(bigdim, sol);
    if ((a * sol - rhs).cwiseAbs().maxCoeff() > 1e-9 || min_eig(rho) <= 0)
      throw std::invalid_argument(
          "functional_strict_positivity: no strictly positive density for the order unit state");
  }

  // Margin Choi blocks of x -> tr(rho x) I_m: rho_i^T ⊗ I_m per block.
  ExtensionProblem p;
  p.small = s;
  p.big = full_system(s.ambient);
  p.codomain_dim = m;
  p.maps = {element};
  ExtensionEncoding enc = encode_extension(p);
  enc.lmi.strictness = Strictness::Strict;
  const auto rho_parts = split_blocks(rho, s.ambient);
  for (std::size_t i = 0; i < s.ambient.blocks.size(); ++i) {
    HermMatrix w(Eigen::MatrixXcd(
        kron(HermMatrix(Eigen::MatrixXcd(rho_parts[i].mat().transpose())),
             HermMatrix::identity(m))
            .mat()));
    enc.lmi.blocks[i].margin_unit = std::move(w);
  }
  return solve(enc.lmi, tol);
}

}  // namespace oskit
