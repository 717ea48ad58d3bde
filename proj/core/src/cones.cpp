#include "oskit/cones.hpp"

#include <algorithm>
#include <cmath>

namespace oskit {

TensorElement::TensorElement(OperatorSystem l, OperatorSystem r, int lvl, Eigen::MatrixXcd c)
    : left(std::move(l)), right(std::move(r)), level(lvl), coeffs(std::move(c)) {
  if (level < 1) throw std::invalid_argument("TensorElement: level must be >= 1");
  if (coeffs.rows() != static_cast<long>(left.dim()) * level ||
      coeffs.cols() != static_cast<long>(right.dim()) * level)
    throw std::invalid_argument("TensorElement: coefficient shape mismatch");
}

TensorElement TensorElement::elementary(const OperatorSystem& l, const OperatorSystem& r,
                                        const Eigen::VectorXd& left_coords,
                                        const Eigen::VectorXd& right_coords) {
  if (left_coords.size() != l.dim() || right_coords.size() != r.dim())
    throw std::invalid_argument("TensorElement::elementary: coordinate size mismatch");
  Eigen::MatrixXcd c = (left_coords * right_coords.transpose()).cast<Complex>();
  return TensorElement(l, r, 1, std::move(c));
}

HermMatrix TensorElement::assemble() const {
  const int dl = left.ambient_dim();
  const int dr = right.ambient_dim();
  const int dim = level * dl * dr;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < left.dim(); ++k) {
    for (int l = 0; l < right.dim(); ++l) {
      const Eigen::MatrixXcd c = coeffs.block(k * level, l * level, level, level);
      if (c.cwiseAbs().maxCoeff() == 0.0) continue;
      const Eigen::MatrixXcd bk = left.basis[static_cast<std::size_t>(k)].mat();
      const Eigen::MatrixXcd cl = right.basis[static_cast<std::size_t>(l)].mat();
      for (int p = 0; p < level; ++p)
        for (int q = 0; q < level; ++q)
          if (c(p, q) != Complex(0, 0))
            for (int i = 0; i < dl; ++i)
              for (int j = 0; j < dl; ++j)
                if (bk(i, j) != Complex(0, 0))
                  out.block((p * dl + i) * dr, (q * dl + j) * dr, dr, dr) +=
                      c(p, q) * bk(i, j) * cl;
    }
  }
  return HermMatrix(std::move(out));  // construction validates Hermitian-ness
}

bool min_cone_member(const TensorElement& x, double tol) {
  return is_psd(x.assemble(), tol);
}

bool max_commutative_member(const OperatorSystem& s, const std::vector<HermMatrix>& tuple,
                            bool strict, double tol) {
  if (tuple.empty()) throw std::invalid_argument("max_commutative_member: empty tuple");
  for (const auto& t : tuple)
    if (!contains(s, t, std::max(tol, 1e-9)))
      throw std::invalid_argument("max_commutative_member: component outside the system");
  const bool exact = s.is_diagonal() &&
                     std::all_of(tuple.begin(), tuple.end(),
                                 [](const HermMatrix& t) { return t.is_diagonal(); });
  if (exact) {
    Rational worst(0);
    bool first = true;
    for (const auto& t : tuple) {
      const Rational m = exact_diagonal(t).min_coord();
      if (first || m < worst) worst = m;
      first = false;
    }
    return strict ? worst > 0 : worst >= 0;
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& t : tuple) worst = std::min(worst, min_eig(t));
  return strict ? worst > 10.0 * tol : worst >= -tol;
}

LmiProblem quotient_member_lmi(const QuotientElement& e) {
  const QuotientSystem& q = e.quotient;
  const BlockShape& amb = q.ambient_system.ambient;
  BlockShape shape;
  for (int d : amb.blocks) shape.blocks.push_back(d * e.level);
  if (e.representative.dim() != shape.total())
    throw std::invalid_argument("quotient_strict_member: representative dimension mismatch");

  // Variables: kernel coordinates tensored with the Hermitian parameters of
  // M_level; blocks: representative + j(c) - delta >= 0 per ambient block.
  const auto level_basis = herm_param_basis(e.level);
  LmiProblem p;
  p.num_vars = q.kernel_dim() * e.level * e.level;
  p.strictness = Strictness::Strict;
  const auto rep_parts = split_blocks(e.representative, shape);
  std::vector<std::vector<HermMatrix>> coeff_blocks(shape.blocks.size());
  for (const auto& kb : q.kernel_basis) {
    for (const auto& h : level_basis) {
      auto parts = split_blocks(kron(kb, h), shape);
      for (std::size_t b = 0; b < parts.size(); ++b)
        coeff_blocks[b].push_back(parts[b]);
    }
  }
  for (std::size_t b = 0; b < shape.blocks.size(); ++b)
    p.blocks.emplace_back(rep_parts[b], coeff_blocks[b]);
  return p;
}

FeasibilityVerdict quotient_strict_member(const QuotientElement& e, double tol) {
  if (!null_subspace_check(e.quotient, std::max(tol, 1e-9)))
    throw std::invalid_argument("quotient_strict_member: kernel is not a null-subspace");
  return solve(quotient_member_lmi(e), tol);
}

FeasibilityVerdict quotient_relaxed_member(const QuotientElement& e, double eps, double tol) {
  if (eps < 0) throw std::invalid_argument("quotient_relaxed_member: eps must be >= 0");
  QuotientElement shifted = e;
  shifted.representative =
      e.representative + eps * HermMatrix::identity(e.representative.dim());
  return quotient_strict_member(shifted, tol);
}

HermMatrix kernel_combination(const QuotientSystem& q, const Eigen::VectorXd& coords, int level) {
  const auto level_basis = herm_param_basis(level);
  const int lvl2 = level * level;
  if (coords.size() != q.kernel_dim() * lvl2)
    throw std::invalid_argument("kernel_combination: coordinate size mismatch");
  HermMatrix j(q.ambient_system.ambient_dim() * level);
  for (int r = 0; r < q.kernel_dim(); ++r)
    for (int pq = 0; pq < lvl2; ++pq)
      if (coords[r * lvl2 + pq] != 0.0)
        j += coords[r * lvl2 + pq] *
             kron(q.kernel_basis[static_cast<std::size_t>(r)],
                  level_basis[static_cast<std::size_t>(pq)]);
  return j;
}

namespace {

// A spanning family of PSD elements of T, the frame for the bounded-rank
// decomposition search. Coordinate projections when T is a full commutative
// algebra (the complete case), rank-one sums for full matrix algebras,
// shifted basis elements otherwise.
std::vector<HermMatrix> positive_frame(const OperatorSystem& t) {
  std::vector<HermMatrix> frame;
  if (t.spans_full_ambient() && t.is_commutative()) {
    frame = t.basis;
    return frame;
  }
  if (t.spans_full_ambient()) {
    const BlockShape& shape = t.ambient;
    const int total = shape.total();
    for (std::size_t bl = 0; bl < shape.blocks.size(); ++bl) {
      const int d = shape.blocks[bl];
      const int off = shape.offset(static_cast<int>(bl));
      auto add_rank_one = [&](const Eigen::VectorXcd& v) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(total, total);
        m.block(off, off, d, d) = v * v.adjoint();
        frame.emplace_back(std::move(m));
      };
      for (int i = 0; i < d; ++i) {
        Eigen::VectorXcd ei = Eigen::VectorXcd::Zero(d);
        ei[i] = 1.0;
        add_rank_one(ei);
      }
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
          v[i] = 1.0;
          v[j] = 1.0;
          add_rank_one(v);
          v[j] = Complex(0.0, 1.0);
          add_rank_one(v);
        }
    }
    return frame;
  }
  frame.push_back(t.unit);
  for (const auto& b : t.basis) {
    const double shift = std::max(0.0, -min_eig(b)) + 1.0;
    frame.push_back(b + shift * t.unit);
  }
  return frame;
}

}  // namespace

MaxRankReport max_bounded_rank_member(const TensorElement& x, int p_max, int q_max, double eps,
                                      double tol) {
  if (p_max < 1 || q_max < 1)
    throw std::invalid_argument("max_bounded_rank_member: caps must be >= 1");
  MaxRankReport report;
  report.eps_used = eps;

  // Single-term pre-pass: a level-1 element with a rank-one coefficient
  // matrix and PSD factors is an elementary positive tensor, certified at
  // caps (1,1).
  if (x.level == 1) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(x.coeffs,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() > 0 && sv[0] > 0 &&
        (sv.size() == 1 || sv[1] <= 1e-12 * sv[0])) {
      Eigen::VectorXcd u = svd.matrixU().col(0) * sv[0];
      Eigen::VectorXcd v = svd.matrixV().col(0);
      if (u.imag().cwiseAbs().maxCoeff() < 1e-12 && v.imag().cwiseAbs().maxCoeff() < 1e-12) {
        HermMatrix s = x.left.from_coords(u.real());
        HermMatrix t = x.right.from_coords(v.real());
        if (min_eig(s) < 0 && min_eig(-1.0 * s) >= 0) {
          s = -1.0 * s;
          t = -1.0 * t;
        }
        if (min_eig(s) >= -tol && min_eig(t) >= -tol) {
          report.member = true;
          report.p_used = 1;
          report.q_used = 1;
          return report;
        }
      }
    }
  }

  const std::vector<HermMatrix> frame = positive_frame(x.right);
  const int frame_size = static_cast<int>(frame.size());
  report.p_used = frame_size * x.level;
  report.q_used = frame_size;
  if (report.p_used > p_max || report.q_used > q_max) return report;  // inconclusive

  // Frame coordinates against the right basis.
  Eigen::MatrixXd f(frame_size, x.right.dim());
  for (int r = 0; r < frame_size; ++r) {
    auto c = coords_of(x.right, frame[static_cast<std::size_t>(r)], 1e-9);
    if (!c) throw std::runtime_error("max_bounded_rank_member: frame element left the system");
    f.row(r) = c->transpose();
  }

  // Target coefficients of x + eps(1⊗1).
  auto ucl = coords_of(x.left, x.left.unit, 1e-9);
  auto ucr = coords_of(x.right, x.right.unit, 1e-9);
  if (!ucl || !ucr) throw std::runtime_error("max_bounded_rank_member: unit coordinates missing");
  Eigen::MatrixXcd target = x.coeffs;
  for (int k = 0; k < x.left.dim(); ++k)
    for (int l = 0; l < x.right.dim(); ++l)
      for (int p = 0; p < x.level; ++p)
        target(k * x.level + p, l * x.level + p) += eps * (*ucl)[k] * (*ucr)[l];

  // Variables: for each frame index r, an element S_r of M_level(S):
  // coordinates z[r][k][param of M_level].
  const int lvl2 = x.level * x.level;
  const int nvars = frame_size * x.left.dim() * lvl2;
  const auto level_basis = herm_param_basis(x.level);

  LmiProblem lmi;
  lmi.num_vars = nvars;
  lmi.strictness = Strictness::Closed;

  BlockShape amp_shape;
  for (int d : x.left.ambient.blocks) amp_shape.blocks.push_back(d * x.level);
  for (int r = 0; r < frame_size; ++r) {
    std::vector<std::vector<HermMatrix>> coeff_blocks(amp_shape.blocks.size());
    for (std::size_t b = 0; b < amp_shape.blocks.size(); ++b)
      coeff_blocks[b].assign(static_cast<std::size_t>(nvars), HermMatrix(amp_shape.blocks[b]));
    for (int k = 0; k < x.left.dim(); ++k) {
      for (int pq = 0; pq < lvl2; ++pq) {
        const int var = (r * x.left.dim() + k) * lvl2 + pq;
        auto parts = split_blocks(
            kron(x.left.basis[static_cast<std::size_t>(k)], level_basis[static_cast<std::size_t>(pq)]),
            amp_shape);
        for (std::size_t b = 0; b < parts.size(); ++b)
          coeff_blocks[b][static_cast<std::size_t>(var)] = parts[b];
      }
    }
    for (std::size_t b = 0; b < amp_shape.blocks.size(); ++b)
      lmi.blocks.emplace_back(HermMatrix(amp_shape.blocks[b]), coeff_blocks[b]);
  }

  // Equalities: sum_r f[r][l] Z[r][k] = target block (k,l), entrywise over
  // M_level, real and imaginary parts.
  for (int k = 0; k < x.left.dim(); ++k) {
    for (int l = 0; l < x.right.dim(); ++l) {
      for (int p = 0; p < x.level; ++p) {
        for (int q = 0; q < x.level; ++q) {
          const Complex rhs = target(k * x.level + p, l * x.level + q);
          for (int part = 0; part < 2; ++part) {  // 0: real, 1: imag
            LinearEq eq;
            eq.coeffs = Eigen::VectorXd::Zero(nvars);
            for (int r = 0; r < frame_size; ++r) {
              if (f(r, l) == 0.0) continue;
              for (int pq = 0; pq < lvl2; ++pq) {
                const Complex h = level_basis[static_cast<std::size_t>(pq)](p, q);
                const double coeff = part == 0 ? h.real() : h.imag();
                if (coeff != 0.0)
                  eq.coeffs[(r * x.left.dim() + k) * lvl2 + pq] += f(r, l) * coeff;
              }
            }
            eq.rhs = part == 0 ? rhs.real() : rhs.imag();
            if (eq.coeffs.cwiseAbs().maxCoeff() == 0.0 && eq.rhs == 0.0) continue;
            lmi.linear_eqs.push_back(std::move(eq));
          }
        }
      }
    }
  }

  FeasibilityVerdict v = solve(lmi, tol);
  if (v.feasible() && !replay_check(lmi, v, std::max(tol, 1e-9)))
    throw std::runtime_error("max_bounded_rank_member: witness failed replay");
  report.member = v.feasible();
  return report;
}

QuotientElement tensor_quotient_element(const OperatorSystem& s,
                                        const std::vector<HermMatrix>& tuple, int n, int k) {
  if (static_cast<int>(tuple.size()) != n + k)
    throw std::invalid_argument("tensor_quotient_element: expected n + k components");
  for (const auto& t : tuple)
    if (!contains(s, t, 1e-9))
      throw std::invalid_argument("tensor_quotient_element: component outside the system");
  std::vector<OperatorSystem> copies(static_cast<std::size_t>(n + k), s);
  QuotientElement e;
  e.quotient.ambient_system = direct_sum_system(copies);
  for (const auto& b : s.basis) {
    HermMatrix j(e.quotient.ambient_system.ambient_dim());
    for (int i = 0; i < n; ++i) j += embed_summand(copies, i, b);
    for (int i = n; i < n + k; ++i) j -= embed_summand(copies, i, b);
    e.quotient.kernel_basis.push_back(std::move(j));
  }
  e.representative = direct_sum(tuple);
  e.level = 1;
  return e;
}

}  // namespace oskit
