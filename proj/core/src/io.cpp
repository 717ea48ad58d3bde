#include "oskit/io.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"
#include "oskit/cones.hpp"

namespace oskit {

namespace {

using json = nlohmann::ordered_json;

void require_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
}

// Strict field policy: unknown fields are rejected, required ones enforced.
void check_fields(const json& j, const std::string& ctx, const std::vector<std::string>& allowed,
                  const std::vector<std::string>& required) {
  require_object(j, ctx);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError(ctx + ": unknown field '" + key + "'");
  }
  for (const auto& req : required)
    if (!j.contains(req)) throw ParseError(ctx + ": missing field '" + req + "'");
}

double number_at(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw ParseError(ctx + ": expected a number");
  return j.get<double>();
}

int int_at(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw ParseError(ctx + ": expected an integer");
  return j.get<int>();
}

// Matrices: {"diagonal": [..]} shorthand or {"entries": [[[re,im],..],..]}.
HermMatrix matrix_from_json(const json& j, const std::string& ctx) {
  check_fields(j, ctx, {"diagonal", "entries"}, {});
  if (j.contains("diagonal") == j.contains("entries"))
    throw ParseError(ctx + ": exactly one of 'diagonal' or 'entries' required");
  if (j.contains("diagonal")) {
    const json& d = j["diagonal"];
    if (!d.is_array() || d.empty()) throw ParseError(ctx + ".diagonal: nonempty array required");
    std::vector<double> entries;
    for (std::size_t i = 0; i < d.size(); ++i)
      entries.push_back(number_at(d[i], ctx + ".diagonal[" + std::to_string(i) + "]"));
    return HermMatrix::diagonal(entries);
  }
  const json& e = j["entries"];
  if (!e.is_array() || e.empty()) throw ParseError(ctx + ".entries: nonempty array required");
  const std::size_t dim = e.size();
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    if (!e[r].is_array() || e[r].size() != dim)
      throw ParseError(ctx + ".entries: row " + std::to_string(r) + " has wrong length");
    for (std::size_t c = 0; c < dim; ++c) {
      const json& cell = e[r][c];
      if (!cell.is_array() || cell.size() != 2)
        throw ParseError(ctx + ".entries[" + std::to_string(r) + "][" + std::to_string(c) +
                         "]: expected [re, im]");
      m(static_cast<long>(r), static_cast<long>(c)) =
          Complex(number_at(cell[0], ctx), number_at(cell[1], ctx));
    }
  }
  try {
    return HermMatrix(std::move(m));
  } catch (const std::invalid_argument& err) {
    throw ParseError(ctx + ": " + err.what());
  }
}

Eigen::MatrixXcd cmatrix_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw ParseError(ctx + ": nonempty array of rows required");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ParseError(ctx + ": empty row");
  Eigen::MatrixXcd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ParseError(ctx + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      const json& cell = j[r][c];
      if (!cell.is_array() || cell.size() != 2)
        throw ParseError(ctx + ": expected [re, im] cells");
      m(static_cast<long>(r), static_cast<long>(c)) =
          Complex(number_at(cell[0], ctx), number_at(cell[1], ctx));
    }
  }
  return m;
}

json matrix_to_json(const HermMatrix& m) {
  json j;
  if (m.is_diagonal()) {
    j["diagonal"] = m.diagonal_entries();
    return j;
  }
  json rows = json::array();
  for (int r = 0; r < m.dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.dim(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j;
}

json witness_to_json(const Witness& w) {
  json j;
  if (w.exact) {
    json xs = json::array();
    for (const auto& r : w.x_exact) xs.push_back(rational_str(r));
    j["x"] = std::move(xs);
    j["delta"] = rational_str(w.delta_exact);
    j["exact"] = true;
  } else {
    j["x"] = std::vector<double>(w.x.data(), w.x.data() + w.x.size());
    j["delta"] = w.delta;
    j["exact"] = false;
  }
  return j;
}

json certificate_to_json(const FarkasCertificate& c) {
  json j;
  json ineq = json::array();
  for (const auto& r : c.ineq_mult) ineq.push_back(rational_str(r));
  json eq = json::array();
  for (const auto& r : c.eq_mult) eq.push_back(rational_str(r));
  j["ineq_mult"] = std::move(ineq);
  j["eq_mult"] = std::move(eq);
  j["margin_coeff"] = rational_str(c.margin_coeff);
  j["bound"] = rational_str(c.bound);
  return j;
}

json verdict_to_json(const FeasibilityVerdict& v) {
  json j;
  j["status"] = to_string(v.status);
  j["exact"] = v.exact;
  if (v.witness) j["witness"] = witness_to_json(*v.witness);
  if (v.certificate) j["certificate"] = certificate_to_json(*v.certificate);
  j["best_delta"] = v.best_delta;
  j["delta_upper_bound"] = v.delta_upper_bound;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

OperatorSystem system_from_json_obj(const json& j, const std::string& ctx,
                                    const std::map<std::string, OperatorSystem>& known) {
  require_object(j, ctx);
  if (!j.contains("kind")) throw ParseError(ctx + ": missing field 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "linf") {
    check_fields(j, ctx, {"name", "kind", "n"}, {"n"});
    return make_linf(int_at(j["n"], ctx + ".n"));
  }
  if (kind == "full") {
    check_fields(j, ctx, {"name", "kind", "d"}, {"d"});
    return make_full(int_at(j["d"], ctx + ".d"));
  }
  if (kind == "block_algebra") {
    check_fields(j, ctx, {"name", "kind", "blocks"}, {"blocks"});
    std::vector<int> blocks;
    for (std::size_t i = 0; i < j["blocks"].size(); ++i)
      blocks.push_back(int_at(j["blocks"][i], ctx + ".blocks"));
    return make_block_diag_subalgebra(blocks);
  }
  if (kind == "np_pullback") {
    check_fields(j, ctx, {"name", "kind", "n", "k"}, {"n", "k"});
    return make_np_pullback(int_at(j["n"], ctx + ".n"), int_at(j["k"], ctx + ".k"));
  }
  if (kind == "subsystem") {
    check_fields(j, ctx, {"name", "kind", "ambient", "generators", "label"},
                 {"ambient", "generators"});
    const std::string amb = j["ambient"].get<std::string>();
    auto it = known.find(amb);
    if (it == known.end()) throw ParseError(ctx + ": unknown ambient system '" + amb + "'");
    std::vector<HermMatrix> gens;
    for (std::size_t i = 0; i < j["generators"].size(); ++i)
      gens.push_back(
          matrix_from_json(j["generators"][i], ctx + ".generators[" + std::to_string(i) + "]"));
    try {
      return make_subsystem(it->second, gens,
                            j.contains("label") ? j["label"].get<std::string>() : "");
    } catch (const std::invalid_argument& err) {
      throw ParseError(ctx + ": " + err.what());
    }
  }
  if (kind == "explicit") {
    check_fields(j, ctx, {"name", "kind", "ambient_blocks", "basis", "label"},
                 {"ambient_blocks", "basis"});
    OperatorSystem s;
    for (std::size_t i = 0; i < j["ambient_blocks"].size(); ++i)
      s.ambient.blocks.push_back(int_at(j["ambient_blocks"][i], ctx + ".ambient_blocks"));
    for (std::size_t i = 0; i < j["basis"].size(); ++i)
      s.basis.push_back(
          matrix_from_json(j["basis"][i], ctx + ".basis[" + std::to_string(i) + "]"));
    s.unit = HermMatrix::identity(s.ambient.total());
    s.label = j.contains("label") ? j["label"].get<std::string>() : "explicit";
    try {
      s.validate();
    } catch (const std::invalid_argument& err) {
      throw ParseError(ctx + ": " + err.what());
    }
    return s;
  }
  throw ParseError(ctx + ": unknown system kind '" + kind + "'");
}

json system_to_json_obj(const OperatorSystem& s) {
  json j;
  j["kind"] = "explicit";
  j["ambient_blocks"] = s.ambient.blocks;
  json basis = json::array();
  for (const auto& b : s.basis) basis.push_back(matrix_to_json(b));
  j["basis"] = std::move(basis);
  j["label"] = s.label;
  return j;
}

LmiProblem lmi_from_json_obj(const json& j, const std::string& ctx) {
  check_fields(j, ctx,
               {"version", "type", "name", "num_vars", "strictness", "delta_cap", "blocks",
                "linear_eqs", "expect"},
               {"num_vars", "blocks"});
  LmiProblem p;
  p.num_vars = int_at(j["num_vars"], ctx + ".num_vars");
  if (j.contains("strictness")) {
    const std::string s = j["strictness"].get<std::string>();
    if (s == "strict")
      p.strictness = Strictness::Strict;
    else if (s == "closed")
      p.strictness = Strictness::Closed;
    else
      throw ParseError(ctx + ".strictness: expected 'strict' or 'closed'");
  }
  if (j.contains("delta_cap")) p.delta_cap = number_at(j["delta_cap"], ctx + ".delta_cap");
  for (std::size_t b = 0; b < j["blocks"].size(); ++b) {
    const json& jb = j["blocks"][b];
    const std::string bctx = ctx + ".blocks[" + std::to_string(b) + "]";
    check_fields(jb, bctx, {"constant", "coeffs", "margin_unit"}, {"constant", "coeffs"});
    HermMatrix constant = matrix_from_json(jb["constant"], bctx + ".constant");
    std::vector<HermMatrix> coeffs;
    for (std::size_t i = 0; i < jb["coeffs"].size(); ++i)
      coeffs.push_back(
          matrix_from_json(jb["coeffs"][i], bctx + ".coeffs[" + std::to_string(i) + "]"));
    if (jb.contains("margin_unit")) {
      p.blocks.emplace_back(std::move(constant), std::move(coeffs),
                            matrix_from_json(jb["margin_unit"], bctx + ".margin_unit"));
    } else {
      p.blocks.emplace_back(std::move(constant), std::move(coeffs));
    }
  }
  if (j.contains("linear_eqs")) {
    for (std::size_t q = 0; q < j["linear_eqs"].size(); ++q) {
      const json& je = j["linear_eqs"][q];
      const std::string ectx = ctx + ".linear_eqs[" + std::to_string(q) + "]";
      check_fields(je, ectx, {"coeffs", "rhs"}, {"coeffs", "rhs"});
      LinearEq eq;
      eq.coeffs = Eigen::VectorXd(je["coeffs"].size());
      for (std::size_t i = 0; i < je["coeffs"].size(); ++i)
        eq.coeffs[static_cast<long>(i)] = number_at(je["coeffs"][i], ectx + ".coeffs");
      eq.rhs = number_at(je["rhs"], ectx + ".rhs");
      p.linear_eqs.push_back(std::move(eq));
    }
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& err) {
    throw ParseError(ctx + ": " + err.what());
  }
  return p;
}

json lmi_to_json_obj(const LmiProblem& p) {
  json j;
  j["version"] = 1;
  j["type"] = "lmi";
  j["num_vars"] = p.num_vars;
  j["strictness"] = p.strictness == Strictness::Strict ? "strict" : "closed";
  j["delta_cap"] = p.delta_cap;
  json blocks = json::array();
  for (const auto& b : p.blocks) {
    json jb;
    jb["constant"] = matrix_to_json(b.constant);
    json coeffs = json::array();
    for (const auto& a : b.coeffs) coeffs.push_back(matrix_to_json(a));
    jb["coeffs"] = std::move(coeffs);
    jb["margin_unit"] = matrix_to_json(b.margin_unit);
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  json eqs = json::array();
  for (const auto& e : p.linear_eqs) {
    json je;
    je["coeffs"] = std::vector<double>(e.coeffs.data(), e.coeffs.data() + e.coeffs.size());
    je["rhs"] = e.rhs;
    eqs.push_back(std::move(je));
  }
  j["linear_eqs"] = std::move(eqs);
  return j;
}

struct ProblemOutcome {
  json record;
  bool mismatch = false;
  bool unknown = false;
  bool cstar_violation = false;
};

std::string expect_of(const json& j) {
  return j.contains("expect") ? j["expect"].get<std::string>() : std::string();
}

void apply_expectation(ProblemOutcome& out, const std::string& expected,
                       const std::string& actual) {
  if (!expected.empty()) {
    out.record["expected"] = expected;
    if (expected != actual) out.mismatch = true;
  }
  out.record["mismatch"] = out.mismatch;
}

ProblemOutcome run_verdict_problem(const std::string& name, const std::string& type,
                                   const LmiProblem& lmi, const FeasibilityVerdict& v,
                                   const std::string& expected, double tol) {
  ProblemOutcome out;
  out.record["name"] = name;
  out.record["type"] = type;
  out.record["verdict"] = verdict_to_json(v);
  const std::string actual = to_string(v.status);
  out.record["status"] = actual;
  if (v.witness || v.certificate) {
    const bool replay_ok = replay_check(lmi, v, std::max(tol, 1e-9));
    out.record["replay_ok"] = replay_ok;
    if (!replay_ok) out.mismatch = true;
  }
  out.unknown = v.unknown();
  apply_expectation(out, expected, actual);
  return out;
}

json campaign_record_json(const CampaignInstanceRecord& rec) {
  json j;
  j["index"] = rec.index;
  j["pair"] = rec.description;
  j["big"] = to_string(rec.big_status);
  j["small"] = to_string(rec.small_status);
  j["violation"] = rec.violation;
  if (rec.ra_checked) {
    j["riesz_arveson"] = to_string(rec.ra_status);
    j["ra_violation"] = rec.ra_violation;
    j["expectation_witness_ok"] = rec.expectation_witness_ok;
  }
  return j;
}

json campaign_to_json(const CampaignReport& r) {
  json j;
  j["family"] = to_string(r.config.pair_family);
  j["count"] = r.config.instance_count;
  j["seed"] = r.config.seed;
  j["level"] = r.config.matrix_level;
  j["nk"] = {r.config.n, r.config.k};
  j["dimension_cap"] = r.config.dimension_cap;
  j["tolerance"] = r.config.tol;
  j["big_feasible"] = r.big_feasible;
  j["violations"] = r.violations;
  j["ra_violations"] = r.ra_violations;
  j["violation_indices"] = r.violation_indices;
  json recs = json::array();
  for (const auto& rec : r.records) recs.push_back(campaign_record_json(rec));
  j["instances"] = std::move(recs);
  return j;
}

ProblemOutcome run_campaign_problem(const std::string& name, const CampaignConfig& cfg,
                                    const std::string& expected) {
  CampaignReport rep = run_campaign(cfg);
  ProblemOutcome out;
  out.record["name"] = name;
  out.record["type"] = "campaign";
  out.record["campaign"] = campaign_to_json(rep);
  const bool clean = rep.violations == 0 && rep.ra_violations == 0;
  const std::string actual = clean ? "clean" : "violations";
  out.record["status"] = actual;
  out.cstar_violation = is_cstar_family(cfg.pair_family) && !clean;
  apply_expectation(out, expected, actual);
  return out;
}

struct Runner {
  double tol = 1e-9;
  std::map<std::string, OperatorSystem> systems;
  std::vector<ProblemOutcome> outcomes;

  const OperatorSystem& system_ref(const json& j, const std::string& ctx) {
    if (!j.is_string()) throw ParseError(ctx + ": expected a system name");
    auto it = systems.find(j.get<std::string>());
    if (it == systems.end())
      throw ParseError(ctx + ": unknown system '" + j.get<std::string>() + "'");
    return it->second;
  }

  std::vector<HermMatrix> matrix_list(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw ParseError(ctx + ": expected an array of matrices");
    std::vector<HermMatrix> out;
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(matrix_from_json(j[i], ctx + "[" + std::to_string(i) + "]"));
    return out;
  }

  void run_problem(const json& j, const std::string& ctx) {
    require_object(j, ctx);
    if (!j.contains("type") || !j.contains("name"))
      throw ParseError(ctx + ": problems need 'name' and 'type'");
    const std::string type = j["type"].get<std::string>();
    const std::string name = j["name"].get<std::string>();
    const std::string expected = expect_of(j);

    if (type == "interpolation") {
      check_fields(j, ctx, {"name", "type", "system", "lower", "upper", "expect"},
                   {"system", "lower", "upper"});
      InterpolationInstance inst;
      inst.system = system_ref(j["system"], ctx + ".system");
      inst.lower = matrix_list(j["lower"], ctx + ".lower");
      inst.upper = matrix_list(j["upper"], ctx + ".upper");
      FeasibilityVerdict v = interpolate(inst, tol);
      outcomes.push_back(
          run_verdict_problem(name, type, interpolation_lmi(inst), v, expected, tol));
      return;
    }
    if (type == "extension") {
      check_fields(j, ctx,
                   {"name", "type", "small", "big", "codomain_dim", "maps", "sum_constraints",
                    "dominance_constraints", "functional_constraints", "expect"},
                   {"small", "big", "maps"});
      ExtensionProblem p;
      p.small = system_ref(j["small"], ctx + ".small");
      p.big = system_ref(j["big"], ctx + ".big");
      p.codomain_dim = j.contains("codomain_dim") ? int_at(j["codomain_dim"], ctx) : 1;
      for (std::size_t t = 0; t < j["maps"].size(); ++t) {
        const json& jm = j["maps"][t];
        const std::string mctx = ctx + ".maps[" + std::to_string(t) + "]";
        check_fields(jm, mctx, {"values"}, {"values"});
        std::vector<HermMatrix> values = matrix_list(jm["values"], mctx + ".values");
        try {
          p.maps.emplace_back(p.small, p.codomain_dim, std::move(values));
        } catch (const std::invalid_argument& err) {
          throw ParseError(mctx + ": " + err.what());
        }
      }
      if (j.contains("sum_constraints")) {
        for (const auto& jc : j["sum_constraints"]) {
          check_fields(jc, ctx + ".sum_constraints", {"lhs", "rhs"}, {"lhs", "rhs"});
          SumConstraint sc;
          for (const auto& t : jc["lhs"]) sc.lhs.push_back(t.get<int>());
          for (const auto& t : jc["rhs"]) sc.rhs.push_back(t.get<int>());
          p.sum_constraints.push_back(std::move(sc));
        }
      }
      if (j.contains("dominance_constraints")) {
        for (const auto& jc : j["dominance_constraints"]) {
          check_fields(jc, ctx + ".dominance_constraints", {"dominated", "dominating"},
                       {"dominated", "dominating"});
          p.dominance_constraints.push_back(
              {jc["dominated"].get<int>(), jc["dominating"].get<int>()});
        }
      }
      if (j.contains("functional_constraints")) {
        for (const auto& jc : j["functional_constraints"]) {
          check_fields(jc, ctx + ".functional_constraints", {"map_a", "map_b", "weight"},
                       {"map_a", "map_b", "weight"});
          p.functional_constraints.push_back({jc["map_a"].get<int>(), jc["map_b"].get<int>(),
                                              matrix_from_json(jc["weight"], ctx + ".weight")});
        }
      }
      FeasibilityVerdict v = solve_extension(p, tol);
      outcomes.push_back(
          run_verdict_problem(name, type, encode_extension(p).lmi, v, expected, tol));
      return;
    }
    if (type == "cone") {
      if (!j.contains("variant")) throw ParseError(ctx + ": cone problems need 'variant'");
      const std::string variant = j["variant"].get<std::string>();
      if (variant == "quotient_strict") {
        check_fields(j, ctx,
                     {"name", "type", "variant", "pushout", "ambient", "kernel",
                      "representative", "level", "expect"},
                     {"representative"});
        QuotientElement e;
        if (j.contains("pushout")) {
          check_fields(j["pushout"], ctx + ".pushout", {"n", "k"}, {"n", "k"});
          e.quotient =
              make_np_pushout(int_at(j["pushout"]["n"], ctx), int_at(j["pushout"]["k"], ctx));
        } else if (j.contains("ambient") && j.contains("kernel")) {
          e.quotient.ambient_system = system_ref(j["ambient"], ctx + ".ambient");
          e.quotient.kernel_basis = matrix_list(j["kernel"], ctx + ".kernel");
        } else {
          throw ParseError(ctx + ": quotient needs 'pushout' or 'ambient'+'kernel'");
        }
        e.representative = matrix_from_json(j["representative"], ctx + ".representative");
        e.level = j.contains("level") ? int_at(j["level"], ctx + ".level") : 1;
        FeasibilityVerdict v = quotient_strict_member(e, tol);
        outcomes.push_back(run_verdict_problem(name, "cone/quotient_strict",
                                               quotient_member_lmi(e), v, expected, tol));
        return;
      }
      if (variant == "min" || variant == "max_bounded_rank") {
        check_fields(j, ctx,
                     {"name", "type", "variant", "left", "right", "coeffs", "level", "p_max",
                      "q_max", "eps", "expect"},
                     {"left", "right", "coeffs"});
        OperatorSystem left = system_ref(j["left"], ctx + ".left");
        OperatorSystem right = system_ref(j["right"], ctx + ".right");
        const int level = j.contains("level") ? int_at(j["level"], ctx + ".level") : 1;
        TensorElement x(left, right, level, cmatrix_from_json(j["coeffs"], ctx + ".coeffs"));
        ProblemOutcome out;
        out.record["name"] = name;
        std::string actual;
        if (variant == "min") {
          const bool member = min_cone_member(x, tol);
          actual = member ? "member" : "nonmember";
          out.record["type"] = "cone/min";
        } else {
          const int p_max = j.contains("p_max") ? int_at(j["p_max"], ctx) : 8;
          const int q_max = j.contains("q_max") ? int_at(j["q_max"], ctx) : 8;
          const double eps = j.contains("eps") ? number_at(j["eps"], ctx) : 1e-9;
          MaxRankReport r = max_bounded_rank_member(x, p_max, q_max, eps, tol);
          actual = r.member ? "member" : "nonmember";
          out.record["type"] = "cone/max_bounded_rank";
          out.record["p_used"] = r.p_used;
          out.record["q_used"] = r.q_used;
          out.record["eps"] = r.eps_used;
        }
        out.record["status"] = actual;
        apply_expectation(out, expected, actual);
        outcomes.push_back(std::move(out));
        return;
      }
      if (variant == "max_commutative") {
        check_fields(j, ctx, {"name", "type", "variant", "system", "tuple", "strict", "expect"},
                     {"system", "tuple"});
        const OperatorSystem& s = system_ref(j["system"], ctx + ".system");
        std::vector<HermMatrix> tuple = matrix_list(j["tuple"], ctx + ".tuple");
        const bool strict = j.contains("strict") && j["strict"].get<bool>();
        ProblemOutcome out;
        out.record["name"] = name;
        out.record["type"] = "cone/max_commutative";
        bool member = false;
        try {
          member = max_commutative_member(s, tuple, strict, tol);
        } catch (const std::invalid_argument& err) {
          throw ParseError(ctx + ": " + err.what());
        }
        const std::string actual = member ? "member" : "nonmember";
        out.record["status"] = actual;
        apply_expectation(out, expected, actual);
        outcomes.push_back(std::move(out));
        return;
      }
      throw ParseError(ctx + ": unknown cone variant '" + variant + "'");
    }
    if (type == "campaign") {
      check_fields(
          j, ctx,
          {"name", "type", "family", "count", "seed", "level", "nk", "dimension_cap", "expect"},
          {"family", "count"});
      CampaignConfig cfg;
      auto family = pair_family_from_string(j["family"].get<std::string>());
      if (!family) throw ParseError(ctx + ".family: unknown family");
      cfg.pair_family = *family;
      cfg.instance_count = int_at(j["count"], ctx + ".count");
      if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("level")) cfg.matrix_level = int_at(j["level"], ctx + ".level");
      if (j.contains("dimension_cap"))
        cfg.dimension_cap = int_at(j["dimension_cap"], ctx + ".dimension_cap");
      if (j.contains("nk")) {
        if (!j["nk"].is_array() || j["nk"].size() != 2)
          throw ParseError(ctx + ".nk: expected [n, k]");
        cfg.n = int_at(j["nk"][0], ctx);
        cfg.k = int_at(j["nk"][1], ctx);
      }
      cfg.tol = tol;
      outcomes.push_back(run_campaign_problem(name, cfg, expected));
      return;
    }
    if (type == "lmi") {
      LmiProblem p = lmi_from_json_obj(j, ctx);
      FeasibilityVerdict v = solve(p, tol);
      outcomes.push_back(run_verdict_problem(name, type, p, v, expected, tol));
      return;
    }
    throw ParseError(ctx + ": unknown problem type '" + type + "'");
  }
};

RunReport assemble_report(const std::vector<ProblemOutcome>& outcomes, double tol,
                          double wall_ms) {
  json machine;
  machine["version"] = 1;
  machine["tool"] = "oskit";
  machine["tolerance"] = tol;
  json results = json::array();
  int mismatches = 0, unknowns = 0, cstar_violations = 0;
  for (const auto& out : outcomes) {
    results.push_back(out.record);
    if (out.mismatch) ++mismatches;
    if (out.unknown) ++unknowns;
    if (out.cstar_violation) ++cstar_violations;
  }
  machine["results"] = std::move(results);
  machine["summary"] = {{"problems", outcomes.size()},
                        {"mismatches", mismatches},
                        {"unknown", unknowns},
                        {"cstar_violations", cstar_violations}};

  std::ostringstream human;
  human << "oskit run: " << outcomes.size() << " problem(s), tolerance " << tol << "\n";
  for (const auto& out : outcomes) {
    human << "  [" << (out.mismatch ? "FAIL" : "ok") << "] "
          << out.record["name"].get<std::string>() << " ("
          << out.record["type"].get<std::string>() << "): "
          << out.record["status"].get<std::string>();
    if (out.record.contains("expected"))
      human << " (expected " << out.record["expected"].get<std::string>() << ")";
    human << "\n";
  }
  human << "summary: " << mismatches << " mismatch(es), " << unknowns << " unknown, "
        << cstar_violations << " C*-pair violation(s)\n";
  human << "wall clock: " << wall_ms << " ms\n";

  RunReport report;
  report.machine_json = machine.dump(2) + "\n";
  report.human_text = human.str();
  if (mismatches > 0 || cstar_violations > 0)
    report.exit_code = 1;
  else if (unknowns > 0)
    report.exit_code = 3;
  else
    report.exit_code = 0;
  return report;
}

}  // namespace

RunReport run_instance_file(const std::string& json_text, std::optional<double> tol_override) {
  const auto t0 = std::chrono::steady_clock::now();
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("instance file: ") + err.what());
  }
  check_fields(j, "file", {"version", "tolerance", "systems", "problems"}, {"version"});
  if (!j["version"].is_number_integer() || j["version"].get<int>() != 1)
    throw ParseError("file.version: expected 1");

  Runner runner;
  runner.tol = 1e-9;
  if (j.contains("tolerance")) runner.tol = number_at(j["tolerance"], "file.tolerance");
  if (tol_override) runner.tol = *tol_override;

  if (j.contains("systems")) {
    if (!j["systems"].is_array()) throw ParseError("file.systems: expected an array");
    for (std::size_t i = 0; i < j["systems"].size(); ++i) {
      const json& js = j["systems"][i];
      const std::string ctx = "systems[" + std::to_string(i) + "]";
      require_object(js, ctx);
      if (!js.contains("name")) throw ParseError(ctx + ": missing 'name'");
      const std::string name = js["name"].get<std::string>();
      if (runner.systems.count(name))
        throw ParseError(ctx + ": duplicate system '" + name + "'");
      runner.systems.emplace(name, system_from_json_obj(js, ctx, runner.systems));
    }
  }
  if (j.contains("problems")) {
    if (!j["problems"].is_array()) throw ParseError("file.problems: expected an array");
    for (std::size_t i = 0; i < j["problems"].size(); ++i)
      runner.run_problem(j["problems"][i], "problems[" + std::to_string(i) + "]");
  }
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return assemble_report(runner.outcomes, runner.tol, wall);
}

RunReport run_paper_examples(std::optional<double> tol_override) {
  const auto t0 = std::chrono::steady_clock::now();
  const double tol = tol_override.value_or(1e-9);
  std::vector<ProblemOutcome> outcomes;

  // Interpolation data x_1 = (-3,1,-1,-1), x_2, x_3, x_4 over the free
  // ambient and over the test system V.
  InterpolationInstance free_side;
  free_side.system = make_linf(4);
  free_side.lower = {HermMatrix::diagonal({-3, 1, -1, -1}),
                     HermMatrix::diagonal({1, -3, -1, -1})};
  free_side.upper = {HermMatrix::diagonal({2, 2, 4, 0}), HermMatrix::diagonal({2, 2, 0, 4})};
  {
    FeasibilityVerdict v = interpolate(free_side, tol);
    ProblemOutcome out = run_verdict_problem("interpolation-over-linf4", "interpolation",
                                             interpolation_lmi(free_side), v, "feasible", tol);
    if (!v.feasible() || !v.witness || !(v.witness->delta_exact >= Rational(1, 2)))
      out.mismatch = true;
    out.record["mismatch"] = out.mismatch;
    outcomes.push_back(std::move(out));
  }
  {
    InterpolationInstance v_side = free_side;
    v_side.system = make_standard_np();
    FeasibilityVerdict v = interpolate(v_side, tol);
    ProblemOutcome out = run_verdict_problem("interpolation-over-V", "interpolation",
                                             interpolation_lmi(v_side), v, "infeasible", tol);
    if (!v.certificate) out.mismatch = true;
    out.record["mismatch"] = out.mismatch;
    outcomes.push_back(std::move(out));
  }
  {
    // The four coordinate states of V with the (2,2) sum identity.
    OperatorSystem v = make_standard_np();
    ExtensionProblem p;
    p.small = v;
    p.big = make_linf(4);
    p.codomain_dim = 1;
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd c(v.dim());
      for (int k = 0; k < v.dim(); ++k)
        c[k] =
            v.basis[static_cast<std::size_t>(k)].diagonal_entries()[static_cast<std::size_t>(i)];
      p.maps.push_back(CpMap::from_functional(v, c));
    }
    p.sum_constraints.push_back({{0, 1}, {2, 3}});
    FeasibilityVerdict verdict = solve_extension(p, tol);
    ProblemOutcome out = run_verdict_problem("extension-of-coordinate-states", "extension",
                                             encode_extension(p).lmi, verdict, "infeasible", tol);
    if (!verdict.certificate) out.mismatch = true;
    out.record["mismatch"] = out.mismatch;
    outcomes.push_back(std::move(out));
  }
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return assemble_report(outcomes, tol, wall);
}

RunReport run_campaign_report(const CampaignConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ProblemOutcome> outcomes;
  outcomes.push_back(run_campaign_problem("campaign", cfg, ""));
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return assemble_report(outcomes, cfg.tol, wall);
}

std::string lmi_to_json(const LmiProblem& p) { return lmi_to_json_obj(p).dump(2) + "\n"; }

LmiProblem lmi_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("lmi: ") + err.what());
  }
  return lmi_from_json_obj(j, "lmi");
}

std::string system_to_json(const OperatorSystem& s) {
  return system_to_json_obj(s).dump(2) + "\n";
}

OperatorSystem system_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("system: ") + err.what());
  }
  return system_from_json_obj(j, "system", {});
}

}  // namespace oskit
