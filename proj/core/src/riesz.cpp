#include "oskit/riesz.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "oskit/cpmaps.hpp"

namespace oskit {

LmiProblem interpolation_lmi(const InterpolationInstance& inst) {
  const OperatorSystem& s = inst.system;
  if (inst.lower.empty() || inst.upper.empty())
    throw std::invalid_argument("interpolate: lower and upper lists must be nonempty");
  for (const auto& x : inst.lower)
    if (x.dim() != s.ambient_dim())
      throw std::invalid_argument("interpolate: element outside ambient");
  for (const auto& y : inst.upper)
    if (y.dim() != s.ambient_dim())
      throw std::invalid_argument("interpolate: element outside ambient");

  LmiProblem p;
  p.num_vars = s.dim();
  p.strictness = Strictness::Strict;
  std::vector<std::vector<HermMatrix>> basis_blocks(s.ambient.blocks.size());
  for (const auto& b : s.basis) {
    auto parts = split_blocks(b, s.ambient);
    for (std::size_t i = 0; i < parts.size(); ++i) basis_blocks[i].push_back(parts[i]);
  }
  for (const auto& x : inst.lower) {  // a - x >= delta
    auto parts = split_blocks(x, s.ambient);
    for (std::size_t i = 0; i < parts.size(); ++i)
      p.blocks.emplace_back(-1.0 * parts[i], basis_blocks[i]);
  }
  for (const auto& y : inst.upper) {  // y - a >= delta
    auto parts = split_blocks(y, s.ambient);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      std::vector<HermMatrix> neg;
      neg.reserve(basis_blocks[i].size());
      for (const auto& b : basis_blocks[i]) neg.push_back(-1.0 * b);
      p.blocks.emplace_back(parts[i], std::move(neg));
    }
  }
  return p;
}

FeasibilityVerdict interpolate(const InterpolationInstance& inst, double tol) {
  return solve(interpolation_lmi(inst), tol);
}

TrImplication tr_instance_check(const OperatorSystem& small, const OperatorSystem& big,
                                const std::vector<HermMatrix>& lower,
                                const std::vector<HermMatrix>& upper, double tol) {
  for (const auto& b : small.basis)
    if (!contains(big, b, 1e-9))
      throw std::invalid_argument("tr_instance_check: small is not contained in big");
  for (const auto& x : lower)
    if (!contains(small, x, 1e-9))
      throw std::invalid_argument("tr_instance_check: element outside small");
  for (const auto& y : upper)
    if (!contains(small, y, 1e-9))
      throw std::invalid_argument("tr_instance_check: element outside small");
  TrImplication rec;
  rec.big_verdict = interpolate({big, lower, upper, std::nullopt}, tol);
  rec.small_verdict = interpolate({small, lower, upper, std::nullopt}, tol);
  return rec;
}

TrImplication cstr_instance_check(const OperatorSystem& s, const OperatorSystem& big,
                                  const std::vector<HermMatrix>& lower,
                                  const std::vector<HermMatrix>& upper, double tol) {
  for (const auto& x : lower)
    if (!contains(s, x, 1e-9))
      throw std::invalid_argument("cstr_instance_check: element outside the system");
  for (const auto& y : upper)
    if (!contains(s, y, 1e-9))
      throw std::invalid_argument("cstr_instance_check: element outside the system");
  OperatorSystem alg = generated_algebra(s);
  TrImplication rec;
  rec.big_verdict = interpolate({big, lower, upper, std::nullopt}, tol);
  rec.small_verdict = interpolate({alg, lower, upper, std::nullopt}, tol);
  return rec;
}

bool tight_riesz_crosscheck(const OperatorSystem& s, const std::vector<HermMatrix>& tuple, int n, int k,
                      double tol) {
  QuotientElement e = tensor_quotient_element(s, tuple, n, k);
  FeasibilityVerdict via_quotient = quotient_strict_member(e, tol);

  InterpolationInstance inst;
  inst.system = s;
  for (int i = 0; i < n; ++i) inst.lower.push_back(-1.0 * tuple[static_cast<std::size_t>(i)]);
  for (int j = n; j < n + k; ++j) inst.upper.push_back(tuple[static_cast<std::size_t>(j)]);
  FeasibilityVerdict via_interp = interpolate(inst, tol);

  if (via_quotient.exact && via_interp.exact)
    return via_quotient.status == via_interp.status;
  if (via_quotient.unknown() || via_interp.unknown()) return true;
  return via_quotient.status == via_interp.status;
}

std::uint64_t DetRng::next_u64() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double DetRng::uniform() { return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0); }

double DetRng::dyadic(double range) {
  const long long grid = static_cast<long long>(range * 8);
  return static_cast<double>(static_cast<long long>(next_u64() % (2 * grid + 1)) - grid) / 8.0;
}

int DetRng::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::string to_string(PairFamily f) {
  switch (f) {
    case PairFamily::DiagonalInFull: return "diagonal-in-full";
    case PairFamily::BlockDiagonalInFull: return "block-diagonal-in-full";
    case PairFamily::LinfInLinf: return "linf-in-linf";
    case PairFamily::NamiokaPhelps: return "namioka-phelps";
  }
  return "?";
}

std::optional<PairFamily> pair_family_from_string(const std::string& s) {
  if (s == "diagonal-in-full") return PairFamily::DiagonalInFull;
  if (s == "block-diagonal-in-full") return PairFamily::BlockDiagonalInFull;
  if (s == "linf-in-linf") return PairFamily::LinfInLinf;
  if (s == "namioka-phelps") return PairFamily::NamiokaPhelps;
  return std::nullopt;
}

bool is_cstar_family(PairFamily f) { return f != PairFamily::NamiokaPhelps; }

namespace {

double ceil8(double x) { return std::ceil(x * 8.0) / 8.0; }

HermMatrix random_small_element(DetRng& rng, const OperatorSystem& s, double range) {
  Eigen::VectorXd c(s.dim());
  for (int i = 0; i < s.dim(); ++i) c[i] = rng.dyadic(range);
  return s.from_coords(c);
}

HermMatrix random_small_psd(DetRng& rng, const OperatorSystem& s, double range) {
  HermMatrix x = random_small_element(rng, s, range);
  const double bump = ceil8(std::max(0.0, -min_eig(x))) + 0.25;
  return x + bump * s.unit;
}

struct PairInstance {
  OperatorSystem small, big;
  std::string description;
};

PairInstance build_pair(DetRng& rng, PairFamily family, int cap, int level) {
  PairInstance out;
  switch (family) {
    case PairFamily::DiagonalInFull: {
      const int d = rng.uniform_int(2, std::max(2, cap));
      OperatorSystem big = make_full(d);
      std::vector<HermMatrix> gens;
      for (int i = 0; i < d; ++i) {
        std::vector<double> e(static_cast<std::size_t>(d), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        gens.push_back(HermMatrix::diagonal(e));
      }
      out.small = make_subsystem(big, gens, "diag" + std::to_string(d));
      out.big = std::move(big);
      out.description = "linf" + std::to_string(d) + " in M" + std::to_string(d);
      break;
    }
    case PairFamily::BlockDiagonalInFull: {
      const int d = rng.uniform_int(3, std::max(3, cap));
      std::vector<int> parts;
      int left = d;
      while (left > 0) {
        const int take = std::min(left, rng.uniform_int(1, 2));
        parts.push_back(take);
        left -= take;
      }
      if (parts.size() == 1) parts = {d - 1, 1};
      out.small = make_block_diag_subalgebra(parts);
      out.big = make_full(d);
      out.description = "blocks(";
      for (std::size_t i = 0; i < parts.size(); ++i)
        out.description += (i ? "," : "") + std::to_string(parts[i]);
      out.description += ") in M" + std::to_string(d);
      break;
    }
    case PairFamily::LinfInLinf: {
      const int total = rng.uniform_int(3, std::max(3, cap));
      const int classes = rng.uniform_int(1, total - 1);
      std::vector<std::vector<int>> cls(static_cast<std::size_t>(classes));
      for (int i = 0; i < classes; ++i) cls[static_cast<std::size_t>(i)].push_back(i);
      for (int i = classes; i < total; ++i)
        cls[static_cast<std::size_t>(rng.uniform_int(0, classes - 1))].push_back(i);
      OperatorSystem big = make_linf(total);
      std::vector<HermMatrix> gens;
      for (const auto& c : cls) {
        std::vector<double> v(static_cast<std::size_t>(total), 0.0);
        for (int i : c) v[static_cast<std::size_t>(i)] = 1.0;
        gens.push_back(HermMatrix::diagonal(v));
      }
      out.small = make_subsystem(big, gens, "linf" + std::to_string(classes) + "-embedded");
      out.big = std::move(big);
      out.description =
          "linf" + std::to_string(classes) + " in linf" + std::to_string(total);
      break;
    }
    case PairFamily::NamiokaPhelps: {
      const bool wide = cap >= 6 && rng.uniform_int(0, 1) == 1;
      const int n = 2, copies = wide ? 3 : 2;
      out.small = make_np_pullback(n, copies);
      out.big = make_linf(n * copies);
      out.description = "V_" + std::to_string(n) + "," + std::to_string(copies) + " in linf" +
                        std::to_string(n * copies);
      break;
    }
  }
  if (level > 1) {
    out.small = amplify(out.small, level);
    out.big = amplify(out.big, level);
    out.description += " at level " + std::to_string(level);
  }
  return out;
}

struct InstanceData {
  std::vector<HermMatrix> lower, upper;
  HermMatrix big_witness;
};

// Draw b in the big system, project it into small, and place the lower and
// upper tuples strictly below/above b by safe shifts plus PSD bumps. Keeps
// big-feasibility by construction with margin >= 1/4.
InstanceData cstar_instance_data(DetRng& rng, const PairInstance& pair, const CpMap& expectation,
                                 int n, int k) {
  InstanceData data;
  HermMatrix b = random_small_element(rng, pair.big, 2.0);
  data.big_witness = b;
  HermMatrix proj = expectation.apply(b);
  const double shift = ceil8(std::max(std::abs(min_eig(b - proj)), std::abs(max_eig(b - proj))));
  for (int i = 0; i < n; ++i) {
    const double margin = 0.25 * rng.uniform_int(1, 4);
    data.lower.push_back(proj - (shift + margin) * pair.small.unit -
                         random_small_psd(rng, pair.small, 1.0));
  }
  for (int j = 0; j < k; ++j) {
    const double margin = 0.25 * rng.uniform_int(1, 4);
    data.upper.push_back(proj + (shift + margin) * pair.small.unit +
                         random_small_psd(rng, pair.small, 1.0));
  }
  return data;
}

// Namioka-Phelps data: tuples drawn inside the test system with a
// coordinatewise gap g; small g produces genuine interpolation failures
// while b = midpoints keep the big side feasible for g > 0.
InstanceData np_instance_data(DetRng& rng, const PairInstance& pair, int n, int k) {
  InstanceData data;
  std::vector<HermMatrix> raw_lower, raw_upper;
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    raw_lower.push_back(random_small_element(rng, pair.small, 2.0));
    top = std::max(top, max_eig(raw_lower.back()));
  }
  const double gap = 0.25 * rng.uniform_int(0, 4);
  for (int j = 0; j < k; ++j) {
    HermMatrix v = random_small_element(rng, pair.small, 2.0);
    const double lift = ceil8(top - min_eig(v)) + gap;
    raw_upper.push_back(v + lift * pair.small.unit);
  }
  data.lower = std::move(raw_lower);
  data.upper = std::move(raw_upper);
  data.big_witness = pair.big.unit;
  return data;
}

// Random (n,k)-sum families of positive functionals on a subalgebra,
// represented by PSD densities inside the algebra so the sum identity is
// exact on the dyadic grid.
std::vector<CpMap> cstar_ra_maps(DetRng& rng, const OperatorSystem& small, int n, int k) {
  std::vector<HermMatrix> lhs_densities;
  HermMatrix total(small.ambient_dim());
  for (int t = 0; t < n; ++t) {
    lhs_densities.push_back(random_small_psd(rng, small, 1.0));
    total += lhs_densities.back();
  }
  // Split the total among the right-hand side by a commuting recipe when
  // diagonal, a functional-calculus square root otherwise.
  std::vector<HermMatrix> rhs_densities;
  HermMatrix remaining = total;
  for (int t = 0; t < k - 1; ++t) {
    // Strictly interior splits: a zero part would park the extension
    // problem on the cone boundary.
    HermMatrix part(small.ambient_dim());
    if (remaining.is_diagonal()) {
      auto d = remaining.diagonal_entries();
      std::vector<double> r(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) r[i] = d[i] * (rng.uniform_int(1, 8) / 16.0);
      part = HermMatrix::diagonal(r);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(remaining.mat());
      Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
      Eigen::MatrixXcd root =
          es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
      const double frac = rng.uniform_int(1, 8) / 16.0;
      part = HermMatrix(Eigen::MatrixXcd(frac * root * root.adjoint()));
    }
    rhs_densities.push_back(part);
    remaining -= part;
  }
  rhs_densities.push_back(remaining);

  std::vector<CpMap> maps;
  auto functional_of = [&](const HermMatrix& rho) {
    Eigen::VectorXd coords(small.dim());
    for (int j = 0; j < small.dim(); ++j)
      coords[j] = herm_inner(rho, small.basis[static_cast<std::size_t>(j)]);
    return CpMap::from_functional(small, coords);
  };
  for (const auto& rho : lhs_densities) maps.push_back(functional_of(rho));
  // Force the sum identity to hold bit-for-bit in coordinates.
  Eigen::VectorXd lhs_sum = Eigen::VectorXd::Zero(small.dim());
  for (int t = 0; t < n; ++t)
    for (int j = 0; j < small.dim(); ++j)
      lhs_sum[j] += maps[static_cast<std::size_t>(t)].values[static_cast<std::size_t>(j)](0, 0).real();
  Eigen::VectorXd rhs_running = Eigen::VectorXd::Zero(small.dim());
  for (int t = 0; t < k - 1; ++t) {
    CpMap f = functional_of(rhs_densities[static_cast<std::size_t>(t)]);
    for (int j = 0; j < small.dim(); ++j)
      rhs_running[j] += f.values[static_cast<std::size_t>(j)](0, 0).real();
    maps.push_back(std::move(f));
  }
  maps.push_back(CpMap::from_functional(small, lhs_sum - rhs_running));
  return maps;
}

}  // namespace

CampaignReport run_campaign(const CampaignConfig& cfg) {
  if (cfg.instance_count < 0) throw std::invalid_argument("run_campaign: negative count");
  if (cfg.matrix_level < 1) throw std::invalid_argument("run_campaign: invalid level");
  if (cfg.n < 1 || cfg.k < 1) throw std::invalid_argument("run_campaign: invalid (n,k)");
  const auto t0 = std::chrono::steady_clock::now();
  CampaignReport report;
  report.config = cfg;
  DetRng rng(cfg.seed);

  for (int idx = 0; idx < cfg.instance_count; ++idx) {
    CampaignInstanceRecord rec;
    rec.index = idx;
    const bool seeded_np = cfg.pair_family == PairFamily::NamiokaPhelps && idx == 0;

    PairInstance pair;
    InstanceData data;
    std::optional<CpMap> expectation;
    if (seeded_np) {
      pair.small = make_standard_np();
      pair.big = make_linf(4);
      pair.description = "V in linf4 (seeded counterexample)";
      if (cfg.matrix_level > 1) {
        pair.small = amplify(pair.small, cfg.matrix_level);
        pair.big = amplify(pair.big, cfg.matrix_level);
      }
      for (auto v : {std::vector<double>{-3, 1, -1, -1}, std::vector<double>{1, -3, -1, -1}})
        data.lower.push_back(amplify_element(HermMatrix::diagonal(v), cfg.matrix_level));
      for (auto v : {std::vector<double>{2, 2, 4, 0}, std::vector<double>{2, 2, 0, 4}})
        data.upper.push_back(amplify_element(HermMatrix::diagonal(v), cfg.matrix_level));
      data.big_witness =
          amplify_element(HermMatrix::diagonal({1.5, 1.5, -0.5, -0.5}), cfg.matrix_level);
    } else {
      pair = build_pair(rng, cfg.pair_family, cfg.dimension_cap, cfg.matrix_level);
      if (is_cstar_family(cfg.pair_family)) {
        expectation = conditional_expectation(pair.small);
        data = cstar_instance_data(rng, pair, *expectation, cfg.n, cfg.k);
      } else {
        data = np_instance_data(rng, pair, cfg.n, cfg.k);
      }
    }
    rec.description = pair.description;

    TrImplication tr = tr_instance_check(pair.small, pair.big, data.lower, data.upper, cfg.tol);
    rec.big_status = tr.big_verdict.status;
    rec.small_status = tr.small_verdict.status;
    if (tr.big_verdict.feasible()) ++report.big_feasible;
    if (tr.violation()) {
      // Triage: exact verdicts stand; numeric ones are re-run tighter.
      bool survives = tr.big_verdict.exact && tr.small_verdict.exact;
      if (!survives) {
        TrImplication redo =
            tr_instance_check(pair.small, pair.big, data.lower, data.upper, cfg.tol / 10.0);
        survives = redo.violation();
      }
      rec.violation = survives;
    }

    // Extension side: the (n,k)-Riesz-Arveson check with functional families.
    if (cfg.ra_checks && is_cstar_family(cfg.pair_family) && !seeded_np) {
      std::vector<CpMap> maps = cstar_ra_maps(rng, pair.small, cfg.n, cfg.k);
      FeasibilityVerdict ra = riesz_arveson(pair.small, pair.big, cfg.n, cfg.k, maps, cfg.tol);
      rec.ra_checked = true;
      rec.ra_status = ra.status;
      if (ra.infeasible()) {
        bool survives = ra.exact;
        if (!survives)
          survives = riesz_arveson(pair.small, pair.big, cfg.n, cfg.k, maps, cfg.tol / 10.0)
                         .infeasible();
        rec.ra_violation = survives;
      }
      // The conditional-expectation composition is a constructive witness;
      // replay it against the encoded problem.
      ExtensionProblem ep;
      ep.small = pair.small;
      ep.big = pair.big;
      ep.codomain_dim = 1;
      ep.maps = maps;
      SumConstraint sc;
      for (int t = 0; t < cfg.n; ++t) sc.lhs.push_back(t);
      for (int t = cfg.n; t < cfg.n + cfg.k; ++t) sc.rhs.push_back(t);
      ep.sum_constraints.push_back(std::move(sc));
      ExtensionEncoding enc = encode_extension(ep);
      std::vector<CpMap> composed;
      for (const auto& f : maps) composed.push_back(compose(f, *expectation));
      FeasibilityVerdict constructed;
      constructed.status = FeasStatus::Feasible;
      Witness wit;
      wit.x = enc.pack(composed);
      wit.delta = 0.0;
      constructed.witness = wit;
      rec.expectation_witness_ok = replay_check(enc.lmi, constructed, std::max(cfg.tol, 1e-9));
    } else if (cfg.ra_checks && seeded_np) {
      // Seeded extension data: the coordinate states of V with the (2,2)
      // sum identity (checked at level 1 where the data lives).
      OperatorSystem v = make_standard_np();
      std::vector<CpMap> phis;
      for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd c(3);
        for (int j = 0; j < 3; ++j)
          c[j] = v.basis[static_cast<std::size_t>(j)].diagonal_entries()[static_cast<std::size_t>(i)];
        phis.push_back(CpMap::from_functional(v, c));
      }
      FeasibilityVerdict ra = riesz_arveson(v, make_linf(4), 2, 2, phis, cfg.tol);
      rec.ra_checked = true;
      rec.ra_status = ra.status;
      rec.ra_violation = ra.infeasible();
    }

    if (rec.violation || rec.ra_violation) report.violation_indices.push_back(idx);
    if (rec.violation) ++report.violations;
    if (rec.ra_violation) ++report.ra_violations;
    report.records.push_back(std::move(rec));
  }

  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

}  // namespace oskit
