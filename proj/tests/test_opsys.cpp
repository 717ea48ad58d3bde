#include "doctest.h"

#include <cmath>

#include "oskit/cpmaps.hpp"
#include "oskit/opsys.hpp"
#include "test_util.hpp"

using namespace oskit;

TEST_CASE("make_linf basics") {
  CHECK_THROWS_AS(make_linf(0), std::invalid_argument);
  OperatorSystem one = make_linf(1);
  CHECK(one.dim() == 1);
  OperatorSystem l4 = make_linf(4);
  CHECK(l4.dim() == 4);
  CHECK(l4.is_commutative());
  l4.validate();
}

TEST_CASE("make_full basics") {
  CHECK_THROWS_AS(make_full(0), std::invalid_argument);
  CHECK(make_full(1).dim() == 1);
  OperatorSystem m2 = make_full(2);
  CHECK(m2.dim() == 4);
  CHECK((m2.unit.mat() - Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);
  CHECK(m2.spans_full_ambient());
}

TEST_CASE("make_subsystem: trivial span and the Namioka-Phelps system") {
  OperatorSystem l4 = make_linf(4);
  OperatorSystem trivial = make_subsystem(l4, {});
  CHECK(trivial.dim() == 1);
  CHECK(contains(trivial, l4.unit, 0.0));

  OperatorSystem v = make_standard_np();
  CHECK(v.dim() == 3);
  CHECK(contains(v, HermMatrix::diagonal({1, 1, 1, 1}), 0.0));
  for (const auto& g : v.basis) CHECK(contains(v, g, 0.0));
  // a + b = c + d fails for (1,1,-1,-1)
  CHECK_FALSE(contains(v, HermMatrix::diagonal({1, 1, -1, -1}), 1e-9));

  HermMatrix off_ambient(Eigen::MatrixXcd::Identity(3, 3));
  CHECK_THROWS_AS(make_subsystem(l4, {off_ambient}), std::invalid_argument);
}

TEST_CASE("pullback: single part, the V identification, dimension counts") {
  OperatorSystem l2 = make_linf(2);
  StateFunctional w = StateFunctional::averaging(l2);
  auto [single, ws] = pullback({{l2, w}});
  CHECK(spans_equal(single, l2, 0.0));

  OperatorSystem v22 = make_np_pullback(2, 2);
  CHECK(spans_equal(v22, make_standard_np(), 0.0));

  OperatorSystem v33 = make_np_pullback(3, 2);  // two copies of linf3
  CHECK(v33.dim() == 5);

  // k copies of linf_n: dim = k n - (k - 1)
  for (int n = 2; n <= 3; ++n)
    for (int k = 2; k <= 3; ++k)
      CHECK(make_np_pullback(n, k).dim() == k * n - (k - 1));
}

TEST_CASE("pullback state agrees across components and is unital") {
  OperatorSystem l2 = make_linf(2);
  auto parts = std::vector<std::pair<OperatorSystem, StateFunctional>>{};
  parts.emplace_back(l2, StateFunctional::averaging(l2));
  parts.emplace_back(l2, StateFunctional::averaging(l2));
  auto [sys, w] = pullback(parts);
  CHECK(w.value(sys.unit) == doctest::Approx(1.0));
  // The amalgamated state evaluates the first component's average.
  HermMatrix x = HermMatrix::diagonal({3, 1, 2, 2});  // (3+1)/2 = (2+2)/2
  CHECK(contains(sys, x, 0.0));
  CHECK(w.value(x) == doctest::Approx(2.0));
}

TEST_CASE("pullback rejects non-states") {
  OperatorSystem l2 = make_linf(2);
  Eigen::VectorXd bad(2);
  bad << 2.0, -1.0;  // unital but not positive
  StateFunctional w(l2, bad);
  CHECK_THROWS_AS(pullback({{l2, w}, {l2, w}}), std::invalid_argument);
}

TEST_CASE("pushout_quotient kernels") {
  OperatorSystem l2 = make_linf(2);
  QuotientSystem single = pushout_quotient({l2});
  CHECK(single.kernel_dim() == 0);
  CHECK(null_subspace_check(single));

  QuotientSystem np22 = make_np_pushout(2, 2);
  CHECK(np22.ambient_system.ambient_dim() == 4);
  REQUIRE(np22.kernel_dim() == 1);
  CHECK(np22.kernel_basis[0].diagonal_entries() == std::vector<double>{1, 1, -1, -1});

  QuotientSystem mix = pushout_quotient({make_linf(2), make_linf(3)});
  REQUIRE(mix.kernel_dim() == 1);
  CHECK(mix.kernel_basis[0].diagonal_entries() == std::vector<double>{1, 1, -1, -1, -1});

  // pushout kernels pass the null-subspace check for unital factors,
  // matrix-block factors included
  CHECK(null_subspace_check(np22));
  CHECK(null_subspace_check(mix));
  CHECK(null_subspace_check(pushout_quotient({make_full(2), make_linf(2)})));
}

TEST_CASE("null_subspace_check rejects spans containing projections") {
  QuotientSystem q;
  q.ambient_system = make_linf(4);
  q.kernel_basis = {HermMatrix::diagonal({1, 0, 0, 0})};
  CHECK_FALSE(null_subspace_check(q));
}

TEST_CASE("faithfulness of states") {
  OperatorSystem l3 = make_linf(3);
  CHECK(is_faithful_state(l3, StateFunctional::averaging(l3)));
  Eigen::VectorXd e1(3);
  e1 << 1, 0, 0;
  CHECK_FALSE(is_faithful_state(l3, StateFunctional(l3, e1)));
  CHECK_THROWS_AS(dual(l3, StateFunctional(l3, e1)), std::invalid_argument);

  OperatorSystem m2 = make_full(2);
  CHECK(is_faithful_state(m2, StateFunctional::averaging(m2)));
}

TEST_CASE("dual of V: positivity equals the exact positive-extension oracle") {
  OperatorSystem v = make_standard_np();
  DualSystem dv = dual(v, StateFunctional::averaging(v));
  CHECK(dv.order_unit_state.value(v.unit) == doctest::Approx(1.0));

  // Oracle: a functional on V with ambient representative phi0 is positive
  // iff phi0 + t (1,1,-1,-1) >= 0 coordinatewise for some t, an exact
  // interval intersection.
  TestRng rng(71);
  int positives = 0, negatives = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // Half the samples restrict a nonnegative ambient vector c, so
    // f(b_k) = <c, b_k> is positive by design; the rest are fully random.
    Eigen::VectorXd f(3);
    if (trial % 2 == 0) {
      std::vector<double> amb(4);
      for (auto& x : amb) x = std::abs(rng.dyadic(2.0));
      for (int k = 0; k < 3; ++k) {
        auto d = v.basis[static_cast<std::size_t>(k)].diagonal_entries();
        f[k] = 0;
        for (int i = 0; i < 4; ++i)
          f[k] += amb[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)];
      }
    } else {
      for (int i = 0; i < 3; ++i) f[i] = rng.dyadic(2.0);
    }
    RationalMatrix a(3, 4);
    std::vector<Rational> rhs(3);
    for (int k = 0; k < 3; ++k) {
      auto d = v.basis[static_cast<std::size_t>(k)].diagonal_entries();
      for (int i = 0; i < 4; ++i) a.at(k, i) = exact_rational(d[static_cast<std::size_t>(i)]);
      rhs[static_cast<std::size_t>(k)] = exact_rational(f[k]);
    }
    std::vector<Rational> phi0;
    REQUIRE(RationalMatrix::solve(a, rhs, phi0));
    const Rational lo = std::max(-phi0[0], -phi0[1]);
    const Rational hi = std::min(phi0[2], phi0[3]);
    const bool oracle_positive = lo <= hi;
    CHECK(is_positive_state(v, f, 1e-9) == oracle_positive);
    if (oracle_positive) ++positives;
    if (!oracle_positive) ++negatives;
  }
  CHECK(positives >= 40);
  CHECK(negatives >= 10);
}

TEST_CASE("generated algebra fixed points and closures") {
  OperatorSystem l3 = make_linf(3);
  CHECK(spans_equal(generated_algebra(l3), l3, 0.0));

  // span{I, flip} in M_2 squares to itself
  OperatorSystem m2 = make_full(2);
  Eigen::MatrixXcd flip(2, 2);
  flip << 0, 1, 1, 0;
  OperatorSystem s1 = make_subsystem(m2, {HermMatrix(flip)});
  OperatorSystem a1 = generated_algebra(s1);
  CHECK(a1.dim() == 2);
  CHECK(spans_equal(a1, s1, 1e-9));

  // span{I, re offdiag, im offdiag} generates all of M_2
  Eigen::MatrixXcd im(2, 2);
  im << 0, Complex(0, 1), Complex(0, -1), 0;
  OperatorSystem s2 = make_subsystem(m2, {HermMatrix(flip), HermMatrix(im)});
  OperatorSystem a2 = generated_algebra(s2);
  CHECK(a2.dim() == 4);
  CHECK(spans_equal(a2, m2, 1e-9));

  // V generates all of linf4
  OperatorSystem av = generated_algebra(make_standard_np());
  CHECK(spans_equal(av, make_linf(4), 0.0));

  // idempotent
  CHECK(spans_equal(generated_algebra(av), av, 0.0));
}

TEST_CASE("generated algebra is monotone under inclusion") {
  TestRng rng(83);
  OperatorSystem m3 = make_full(3);
  for (int trial = 0; trial < 5; ++trial) {
    HermMatrix g1 = random_herm(rng, 3);
    HermMatrix g2 = random_herm(rng, 3);
    OperatorSystem small = make_subsystem(m3, {g1});
    OperatorSystem big = make_subsystem(m3, {g1, g2});
    OperatorSystem ca = generated_algebra(small);
    OperatorSystem cb = generated_algebra(big);
    for (const auto& b : ca.basis) CHECK(contains(cb, b, 1e-8));
  }
}

TEST_CASE("amplify dimensions and unit") {
  OperatorSystem v = make_standard_np();
  OperatorSystem v2 = amplify(v, 2);
  CHECK(v2.dim() == v.dim() * 4);
  CHECK(v2.ambient_dim() == 8);
  CHECK((v2.unit.mat() - Eigen::MatrixXcd::Identity(8, 8)).norm() == 0.0);
  v2.validate();
  CHECK(spans_equal(amplify(v, 1), v, 0.0));
}

TEST_CASE("block-diagonal subalgebra construction") {
  OperatorSystem s = make_block_diag_subalgebra({2, 1});
  CHECK(s.ambient_dim() == 3);
  CHECK(s.dim() == 5);
  CHECK_FALSE(s.spans_full_ambient());
  s.validate();
}

TEST_CASE("state functionals validate unitality") {
  OperatorSystem l2 = make_linf(2);
  Eigen::VectorXd not_unital(2);
  not_unital << 0.25, 0.25;
  CHECK_THROWS_AS(StateFunctional(l2, not_unital), std::invalid_argument);
}
