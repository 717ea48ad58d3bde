#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace oskit {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion: every finite double is a dyadic rational.
Rational exact_rational(double x);
double to_double(const Rational& r);
std::string rational_str(const Rational& r);

/// Dense complex Hermitian matrix. Construction validates adjoint symmetry:
/// inputs within 1e-12 (relative to the max entry) of Hermitian are
/// symmetrized, anything further off is rejected.
class HermMatrix {
 public:
  HermMatrix() : m_(Eigen::MatrixXcd::Zero(1, 1)) {}
  explicit HermMatrix(int dim);
  explicit HermMatrix(Eigen::MatrixXcd m);

  static HermMatrix identity(int dim);
  static HermMatrix diagonal(const std::vector<double>& entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& mat() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  /// True iff every off-diagonal entry is exactly zero.
  bool is_diagonal() const;
  std::vector<double> diagonal_entries() const;

  double max_abs() const;
  double frobenius_norm() const;
  double trace() const;  // real for Hermitian input

  HermMatrix& operator+=(const HermMatrix& o);
  HermMatrix& operator-=(const HermMatrix& o);
  friend HermMatrix operator+(HermMatrix a, const HermMatrix& b) { return a += b; }
  friend HermMatrix operator-(HermMatrix a, const HermMatrix& b) { return a -= b; }
  friend HermMatrix operator*(double c, const HermMatrix& a);
  friend HermMatrix operator-(const HermMatrix& a) { return -1.0 * a; }

 private:
  Eigen::MatrixXcd m_;
};

/// Smallest eigenvalue. Tridiagonalization + QR iteration via Eigen's
/// self-adjoint eigensolver; the Hermitian invariant is already enforced
/// by the type.
double min_eig(const HermMatrix& m);
double max_eig(const HermMatrix& m);

/// min_eig(m) >= -tol.
bool is_psd(const HermMatrix& m, double tol);

/// Kronecker product, dim = dim(a)*dim(b).
HermMatrix kron(const HermMatrix& a, const HermMatrix& b);

/// Block-diagonal assembly of a nonempty list.
HermMatrix direct_sum(const std::vector<HermMatrix>& parts);

/// Real inner product tr(a b); real because both factors are Hermitian.
double herm_inner(const HermMatrix& a, const HermMatrix& b);

/// Ambient block structure of a finite-dimensional C*-algebra  ⊕_i M_{d_i},
/// embedded block-diagonally in M_total.
struct BlockShape {
  std::vector<int> blocks;

  static BlockShape full(int d) { return BlockShape{{d}}; }
  static BlockShape commutative(int n) { return BlockShape{std::vector<int>(n, 1)}; }

  int total() const;
  int offset(int b) const;  // starting index of block b
  bool is_commutative() const;
  bool operator==(const BlockShape& o) const { return blocks == o.blocks; }

  void validate() const;
};

/// Extract the diagonal blocks of a block-diagonal matrix.
std::vector<HermMatrix> split_blocks(const HermMatrix& m, const BlockShape& shape);
/// Largest magnitude found outside the block-diagonal support.
double off_block_mass(const HermMatrix& m, const BlockShape& shape);
bool is_block_diagonal(const HermMatrix& m, const BlockShape& shape, double tol);

/// A vector of exact rational scalars; the exact-arithmetic carrier for
/// commutative (diagonal) instances.
struct RationalVector {
  std::vector<Rational> coords;

  std::size_t size() const { return coords.size(); }
  bool all_nonneg() const;
  Rational min_coord() const;
};

/// Exact diagonal of a diagonal matrix (rejects non-diagonal input).
RationalVector exact_diagonal(const HermMatrix& m);

/// Standard Hermitian parameter basis of M_m: E_ii, then for i<j the pair
/// E_ij+E_ji and i(E_ij-E_ji). A Hermitian matrix has m^2 real coordinates
/// in this basis, recovered by herm_coords.
std::vector<HermMatrix> herm_param_basis(int m);
Eigen::VectorXd herm_coords(const HermMatrix& m);
HermMatrix herm_from_coords(int dim, const Eigen::VectorXd& coords);

/// Dense exact rational matrix with just enough operations for span
/// arithmetic on the exact path: reduced row echelon form, rank,
/// linear solves and nullspace bases.
class RationalMatrix {
 public:
  RationalMatrix(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Rational& at(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  /// In-place Gauss-Jordan. Returns the pivot columns in order.
  std::vector<int> rref();
  int rank() const;

  /// Solve A x = b exactly; empty optional when inconsistent.
  static std::vector<std::vector<Rational>> nullspace(const RationalMatrix& a);
  static bool solve(const RationalMatrix& a, const std::vector<Rational>& b,
                    std::vector<Rational>& x_out);

 private:
  int rows_, cols_;
  std::vector<Rational> data_;
};

}  // namespace oskit
