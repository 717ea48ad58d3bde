#include "doctest.h"

#include "oskit/io.hpp"

using namespace oskit;

namespace {

const char* kExample22File = R"({
  "version": 1,
  "systems": [
    {"name": "l4", "kind": "linf", "n": 4},
    {"name": "V", "kind": "subsystem", "ambient": "l4", "generators": [
      {"diagonal": [1, 0, 1, 0]},
      {"diagonal": [0, 1, 0, 1]},
      {"diagonal": [1, 0, 0, 1]}
    ]}
  ],
  "problems": [
    {"name": "free-side", "type": "interpolation", "system": "l4",
     "lower": [{"diagonal": [-3, 1, -1, -1]}, {"diagonal": [1, -3, -1, -1]}],
     "upper": [{"diagonal": [2, 2, 4, 0]}, {"diagonal": [2, 2, 0, 4]}],
     "expect": "feasible"},
    {"name": "V-side", "type": "interpolation", "system": "V",
     "lower": [{"diagonal": [-3, 1, -1, -1]}, {"diagonal": [1, -3, -1, -1]}],
     "upper": [{"diagonal": [2, 2, 4, 0]}, {"diagonal": [2, 2, 0, 4]}],
     "expect": "infeasible"}
  ]
})";

}  // namespace

TEST_CASE("instance file runs the counterexample interpolation data") {
  RunReport r = run_instance_file(kExample22File, std::nullopt);
  CHECK(r.exit_code == 0);
  CHECK(r.machine_json.find("\"status\": \"feasible\"") != std::string::npos);
  CHECK(r.machine_json.find("\"status\": \"infeasible\"") != std::string::npos);
  CHECK(r.machine_json.find("\"replay_ok\": true") != std::string::npos);
  // wall clock appears only in the human text
  CHECK(r.machine_json.find("wall") == std::string::npos);
  CHECK(r.human_text.find("wall clock") != std::string::npos);
}

TEST_CASE("machine reports are byte-identical across runs") {
  RunReport a = run_instance_file(kExample22File, std::nullopt);
  RunReport b = run_instance_file(kExample22File, std::nullopt);
  CHECK(a.machine_json == b.machine_json);

  RunReport p1 = run_paper_examples(std::nullopt);
  RunReport p2 = run_paper_examples(std::nullopt);
  CHECK(p1.machine_json == p2.machine_json);

  CampaignConfig cfg;
  cfg.instance_count = 6;
  cfg.pair_family = PairFamily::LinfInLinf;
  cfg.dimension_cap = 4;
  cfg.seed = 3;
  RunReport c1 = run_campaign_report(cfg);
  RunReport c2 = run_campaign_report(cfg);
  CHECK(c1.machine_json == c2.machine_json);
}

TEST_CASE("expectation mismatches flip the exit code") {
  std::string flipped = kExample22File;
  const auto pos = flipped.find("\"expect\": \"feasible\"");
  flipped.replace(pos, std::string("\"expect\": \"feasible\"").size(),
                  "\"expect\": \"infeasible\"");
  RunReport r = run_instance_file(flipped, std::nullopt);
  CHECK(r.exit_code == 1);
}

TEST_CASE("paper-examples reports exact witnesses and certificates") {
  RunReport r = run_paper_examples(std::nullopt);
  CHECK(r.exit_code == 0);
  CHECK(r.machine_json.find("\"delta\": \"1/2\"") != std::string::npos);
  CHECK(r.machine_json.find("3/2") != std::string::npos);
  CHECK(r.machine_json.find("certificate") != std::string::npos);
}

TEST_CASE("loosening V to the full ambient flips the verdict") {
  // the same problem with the kernel removed: V replaced by linf4 itself
  std::string loosened = kExample22File;
  const auto pos = loosened.find("\"system\": \"V\"");
  loosened.replace(pos, std::string("\"system\": \"V\"").size(), "\"system\": \"l4\"");
  const auto epos = loosened.rfind("\"expect\": \"infeasible\"");
  loosened.replace(epos, std::string("\"expect\": \"infeasible\"").size(),
                   "\"expect\": \"feasible\"");
  RunReport r = run_instance_file(loosened, std::nullopt);
  CHECK(r.exit_code == 0);
}

TEST_CASE("parse rejections name the offending location") {
  CHECK_THROWS_WITH_AS(run_instance_file("{\"version\": 2}", std::nullopt),
                       doctest::Contains("version"), ParseError);

  const char* unknown_field = R"({"version": 1, "bogus": true})";
  CHECK_THROWS_WITH_AS(run_instance_file(unknown_field, std::nullopt),
                       doctest::Contains("bogus"), ParseError);

  const char* bad_matrix = R"({
    "version": 1,
    "systems": [{"name": "s", "kind": "explicit", "ambient_blocks": [2],
      "basis": [{"entries": [[[0,0],[1,0]],[[0,0],[0,0]]]}]}]
  })";
  CHECK_THROWS_WITH_AS(run_instance_file(bad_matrix, std::nullopt),
                       doctest::Contains("basis[0]"), ParseError);

  const char* empty = R"({"version": 1, "problems": []})";
  RunReport r = run_instance_file(empty, std::nullopt);
  CHECK(r.exit_code == 0);
}

TEST_CASE("lmi dump/load round-trips verdicts") {
  LmiProblem p;
  p.num_vars = 1;
  p.blocks.emplace_back(HermMatrix(1), std::vector<HermMatrix>{HermMatrix::identity(1)});
  p.blocks.emplace_back(HermMatrix::identity(1),
                        std::vector<HermMatrix>{-1.0 * HermMatrix::identity(1)});
  std::string text = lmi_to_json(p);
  LmiProblem back = lmi_from_json(text);
  CHECK(back.num_vars == 1);
  FeasibilityVerdict v1 = solve(p, 1e-9);
  FeasibilityVerdict v2 = solve(back, 1e-9);
  CHECK(v1.status == v2.status);
  CHECK(v1.witness->delta_exact == v2.witness->delta_exact);

  Eigen::MatrixXcd offdiag(2, 2);
  offdiag << 1.0, Complex(0.25, 0.5), Complex(0.25, -0.5), 1.0;
  LmiProblem q;
  q.num_vars = 0;
  q.blocks.emplace_back(HermMatrix(offdiag), std::vector<HermMatrix>{});
  LmiProblem qback = lmi_from_json(lmi_to_json(q));
  CHECK((qback.blocks[0].constant.mat() - offdiag).norm() == 0.0);
}

TEST_CASE("system serialization preserves the span of built-ins") {
  for (const OperatorSystem& s :
       {make_linf(4), make_full(2), make_standard_np(), make_np_pullback(2, 3),
        make_block_diag_subalgebra({2, 1})}) {
    OperatorSystem back = system_from_json(system_to_json(s));
    CHECK(spans_equal(s, back, 1e-12));
  }
  // pushout quotient ambient too
  QuotientSystem np = make_np_pushout(2, 2);
  OperatorSystem back = system_from_json(system_to_json(np.ambient_system));
  CHECK(spans_equal(np.ambient_system, back, 1e-12));
}

TEST_CASE("instance files can pose cone and extension problems") {
  const char* file = R"({
    "version": 1,
    "systems": [
      {"name": "l4", "kind": "linf", "n": 4},
      {"name": "l2", "kind": "linf", "n": 2},
      {"name": "V", "kind": "subsystem", "ambient": "l4", "generators": [
        {"diagonal": [1, 0, 1, 0]},
        {"diagonal": [0, 1, 0, 1]},
        {"diagonal": [1, 0, 0, 1]}
      ]}
    ],
    "problems": [
      {"name": "ex21", "type": "extension", "small": "V", "big": "l4", "codomain_dim": 1,
       "maps": [
         {"values": [{"diagonal": [1]}, {"diagonal": [0]}, {"diagonal": [1]}]},
         {"values": [{"diagonal": [0]}, {"diagonal": [1]}, {"diagonal": [0]}]},
         {"values": [{"diagonal": [1]}, {"diagonal": [0]}, {"diagonal": [0]}]},
         {"values": [{"diagonal": [0]}, {"diagonal": [1]}, {"diagonal": [1]}]}
       ],
       "sum_constraints": [{"lhs": [0, 1], "rhs": [2, 3]}],
       "expect": "infeasible"},
      {"name": "unit-coset", "type": "cone", "variant": "quotient_strict",
       "pushout": {"n": 2, "k": 2}, "representative": {"diagonal": [1, 1, 1, 1]},
       "expect": "feasible"},
      {"name": "min-unit", "type": "cone", "variant": "min", "left": "l2", "right": "l2",
       "coeffs": [[[1,0],[1,0]],[[1,0],[1,0]]], "expect": "member"},
      {"name": "max-tuple", "type": "cone", "variant": "max_commutative", "system": "V",
       "tuple": [{"diagonal": [1, 1, 1, 1]}], "strict": true, "expect": "member"},
      {"name": "mini-campaign", "type": "campaign", "family": "linf-in-linf",
       "count": 4, "seed": 5, "dimension_cap": 4, "expect": "clean"}
    ]
  })";
  RunReport r = run_instance_file(file, std::nullopt);
  CHECK(r.exit_code == 0);
}

TEST_CASE("instance files can pose raw lmi problems") {
  const char* file = R"({
    "version": 1,
    "problems": [
      {"name": "margin-lp", "type": "lmi", "num_vars": 1,
       "blocks": [
         {"constant": {"diagonal": [0]}, "coeffs": [{"diagonal": [1]}]},
         {"constant": {"diagonal": [1]}, "coeffs": [{"diagonal": [-1]}]}
       ],
       "expect": "feasible"},
      {"name": "contradictory", "type": "lmi", "num_vars": 1, "strictness": "closed",
       "blocks": [{"constant": {"diagonal": [0]}, "coeffs": [{"diagonal": [1]}]}],
       "linear_eqs": [{"coeffs": [1], "rhs": -2}],
       "expect": "infeasible"}
    ]
  })";
  RunReport r = run_instance_file(file, std::nullopt);
  CHECK(r.exit_code == 0);
  CHECK(r.machine_json.find("\"delta\": \"1/2\"") != std::string::npos);
}

TEST_CASE("instance files carry dominance and weight-functional constraints") {
  const char* file = R"({
    "version": 1,
    "systems": [
      {"name": "l4", "kind": "linf", "n": 4},
      {"name": "emb", "kind": "subsystem", "ambient": "l4", "generators": [
        {"diagonal": [1, 1, 0, 0]}, {"diagonal": [0, 0, 1, 1]}
      ]}
    ],
    "problems": [
      {"name": "dominated-extension", "type": "extension", "small": "emb", "big": "l4",
       "codomain_dim": 1,
       "maps": [
         {"values": [{"diagonal": [0.5]}, {"diagonal": [0.25]}]},
         {"values": [{"diagonal": [1]}, {"diagonal": [1]}]}
       ],
       "dominance_constraints": [{"dominated": 0, "dominating": 1}],
       "expect": "feasible"},
      {"name": "trace-matched-extension", "type": "extension", "small": "emb", "big": "l4",
       "codomain_dim": 2,
       "maps": [
         {"values": [{"diagonal": [1, 0.5]}, {"diagonal": [0.5, 1]}]},
         {"values": [{"diagonal": [0.5, 1]}, {"diagonal": [1, 0.5]}]}
       ],
       "functional_constraints": [{"map_a": 0, "map_b": 1,
                                   "weight": {"diagonal": [1, 1]}}],
       "expect": "feasible"}
    ]
  })";
  RunReport r = run_instance_file(file, std::nullopt);
  CHECK(r.exit_code == 0);
}
