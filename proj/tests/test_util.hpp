#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "oskit/linalg.hpp"

// Deliberately self-contained test RNG (splitmix64) so oracle inputs do not
// depend on library code under test.
struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * (1.0 / 9007199254740992.0); }
  // Dyadic values in [-range, range] with denominator 2^3; exact in double
  // and as rationals.
  double dyadic(double range = 4.0) {
    const long long grid = static_cast<long long>(range * 8);
    return static_cast<double>(static_cast<long long>(next() % (2 * grid + 1)) - grid) / 8.0;
  }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

inline oskit::HermMatrix random_herm(TestRng& rng, int dim, double scale = 1.0) {
  Eigen::MatrixXcd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = oskit::Complex(scale * (2 * rng.uniform() - 1), scale * (2 * rng.uniform() - 1));
  return oskit::HermMatrix(Eigen::MatrixXcd(0.5 * (a + a.adjoint().eval())));
}

inline oskit::HermMatrix random_psd(TestRng& rng, int dim, double scale = 1.0) {
  Eigen::MatrixXcd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = oskit::Complex(scale * (2 * rng.uniform() - 1), scale * (2 * rng.uniform() - 1));
  return oskit::HermMatrix(Eigen::MatrixXcd(a * a.adjoint()));
}

inline oskit::HermMatrix random_diag_dyadic(TestRng& rng, int dim, double range = 4.0) {
  std::vector<double> d(dim);
  for (int i = 0; i < dim; ++i) d[i] = rng.dyadic(range);
  return oskit::HermMatrix::diagonal(d);
}
