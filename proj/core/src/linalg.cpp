#include "oskit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oskit {

namespace {
constexpr double kHermSymTol = 1e-12;
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("exact_rational: non-finite value");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  // 53 doublings make the mantissa integral.
  long long mi = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(mi);
  boost::multiprecision::cpp_int two(2);
  if (exp >= 0) {
    r *= Rational(boost::multiprecision::pow(two, exp));
  } else {
    r /= Rational(boost::multiprecision::pow(two, -exp));
  }
  return r;
}

double to_double(const Rational& r) { return static_cast<double>(r); }

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

HermMatrix::HermMatrix(int dim) : m_(Eigen::MatrixXcd::Zero(dim, dim)) {
  if (dim < 1) throw std::invalid_argument("HermMatrix: dim must be >= 1");
}

HermMatrix::HermMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols())
    throw std::invalid_argument("HermMatrix: square matrix required");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermSymTol * scale)
    throw std::invalid_argument("HermMatrix: input is not Hermitian (asymmetry " +
                                std::to_string(asym) + ")");
  if (asym > 0.0) m_ = 0.5 * (m_ + m_.adjoint().eval());
  // Keep the diagonal exactly real.
  for (int i = 0; i < m_.rows(); ++i) m_(i, i) = Complex(m_(i, i).real(), 0.0);
}

HermMatrix HermMatrix::identity(int dim) {
  return HermMatrix(Eigen::MatrixXcd::Identity(dim, dim));
}

HermMatrix HermMatrix::diagonal(const std::vector<double>& entries) {
  if (entries.empty()) throw std::invalid_argument("HermMatrix::diagonal: empty");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return HermMatrix(std::move(m));
}

bool HermMatrix::is_diagonal() const {
  for (int i = 0; i < m_.rows(); ++i)
    for (int j = 0; j < m_.cols(); ++j)
      if (i != j && m_(i, j) != Complex(0.0, 0.0)) return false;
  return true;
}

std::vector<double> HermMatrix::diagonal_entries() const {
  std::vector<double> d(dim());
  for (int i = 0; i < dim(); ++i) d[i] = m_(i, i).real();
  return d;
}

double HermMatrix::max_abs() const { return m_.cwiseAbs().maxCoeff(); }
double HermMatrix::frobenius_norm() const { return m_.norm(); }
double HermMatrix::trace() const { return m_.trace().real(); }

HermMatrix& HermMatrix::operator+=(const HermMatrix& o) {
  if (o.dim() != dim()) throw std::invalid_argument("HermMatrix: dimension mismatch");
  m_ += o.m_;
  return *this;
}

HermMatrix& HermMatrix::operator-=(const HermMatrix& o) {
  if (o.dim() != dim()) throw std::invalid_argument("HermMatrix: dimension mismatch");
  m_ -= o.m_;
  return *this;
}

HermMatrix operator*(double c, const HermMatrix& a) {
  HermMatrix r = a;
  r.m_ *= c;
  return r;
}

double min_eig(const HermMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("min_eig: eigensolver failed");
  return es.eigenvalues().minCoeff();
}

double max_eig(const HermMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("max_eig: eigensolver failed");
  return es.eigenvalues().maxCoeff();
}

bool is_psd(const HermMatrix& m, double tol) {
  if (tol < 0) throw std::invalid_argument("is_psd: tol must be >= 0");
  if (m.is_diagonal()) {
    for (double d : m.diagonal_entries())
      if (d < -tol) return false;
    return true;
  }
  return min_eig(m) >= -tol;
}

HermMatrix kron(const HermMatrix& a, const HermMatrix& b) {
  const int da = a.dim(), db = b.dim();
  Eigen::MatrixXcd r(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      r.block(i * db, j * db, db, db) = a(i, j) * b.mat();
  return HermMatrix(std::move(r));
}

HermMatrix direct_sum(const std::vector<HermMatrix>& parts) {
  if (parts.empty()) throw std::invalid_argument("direct_sum: empty list");
  int total = 0;
  for (const auto& p : parts) total += p.dim();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(total, total);
  int off = 0;
  for (const auto& p : parts) {
    r.block(off, off, p.dim(), p.dim()) = p.mat();
    off += p.dim();
  }
  return HermMatrix(std::move(r));
}

double herm_inner(const HermMatrix& a, const HermMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("herm_inner: dimension mismatch");
  return (a.mat() * b.mat()).trace().real();
}

int BlockShape::total() const {
  int t = 0;
  for (int b : blocks) t += b;
  return t;
}

int BlockShape::offset(int b) const {
  int off = 0;
  for (int i = 0; i < b; ++i) off += blocks[i];
  return off;
}

bool BlockShape::is_commutative() const {
  return std::all_of(blocks.begin(), blocks.end(), [](int b) { return b == 1; });
}

void BlockShape::validate() const {
  if (blocks.empty()) throw std::invalid_argument("BlockShape: empty");
  for (int b : blocks)
    if (b < 1) throw std::invalid_argument("BlockShape: nonpositive block dimension");
}

std::vector<HermMatrix> split_blocks(const HermMatrix& m, const BlockShape& shape) {
  shape.validate();
  if (shape.total() != m.dim())
    throw std::invalid_argument("split_blocks: shape/dimension mismatch");
  std::vector<HermMatrix> out;
  out.reserve(shape.blocks.size());
  int off = 0;
  for (int d : shape.blocks) {
    out.emplace_back(Eigen::MatrixXcd(m.mat().block(off, off, d, d)));
    off += d;
  }
  return out;
}

double off_block_mass(const HermMatrix& m, const BlockShape& shape) {
  shape.validate();
  if (shape.total() != m.dim())
    throw std::invalid_argument("off_block_mass: shape/dimension mismatch");
  Eigen::MatrixXcd rest = m.mat();
  int off = 0;
  for (int d : shape.blocks) {
    rest.block(off, off, d, d).setZero();
    off += d;
  }
  return rest.cwiseAbs().maxCoeff();
}

bool is_block_diagonal(const HermMatrix& m, const BlockShape& shape, double tol) {
  return off_block_mass(m, shape) <= tol;
}

bool RationalVector::all_nonneg() const {
  return std::all_of(coords.begin(), coords.end(), [](const Rational& r) { return r >= 0; });
}

Rational RationalVector::min_coord() const {
  if (coords.empty()) throw std::invalid_argument("RationalVector: empty");
  return *std::min_element(coords.begin(), coords.end());
}

RationalVector exact_diagonal(const HermMatrix& m) {
  if (!m.is_diagonal()) throw std::invalid_argument("exact_diagonal: matrix is not diagonal");
  RationalVector v;
  v.coords.reserve(m.dim());
  for (double d : m.diagonal_entries()) v.coords.push_back(exact_rational(d));
  return v;
}

std::vector<HermMatrix> herm_param_basis(int m) {
  if (m < 1) throw std::invalid_argument("herm_param_basis: m must be >= 1");
  std::vector<HermMatrix> basis;
  basis.reserve(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(m, m);
    e(i, i) = 1.0;
    basis.emplace_back(std::move(e));
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::MatrixXcd re = Eigen::MatrixXcd::Zero(m, m);
      re(i, j) = 1.0;
      re(j, i) = 1.0;
      basis.emplace_back(std::move(re));
      Eigen::MatrixXcd im = Eigen::MatrixXcd::Zero(m, m);
      im(i, j) = Complex(0.0, 1.0);
      im(j, i) = Complex(0.0, -1.0);
      basis.emplace_back(std::move(im));
    }
  }
  return basis;
}

Eigen::VectorXd herm_coords(const HermMatrix& m) {
  const int d = m.dim();
  Eigen::VectorXd c(d * d);
  int idx = 0;
  for (int i = 0; i < d; ++i) c[idx++] = m(i, i).real();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      c[idx++] = m(i, j).real();
      c[idx++] = m(i, j).imag();
    }
  return c;
}

HermMatrix herm_from_coords(int dim, const Eigen::VectorXd& coords) {
  if (coords.size() != static_cast<long>(dim) * dim)
    throw std::invalid_argument("herm_from_coords: size mismatch");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  int idx = 0;
  for (int i = 0; i < dim; ++i) m(i, i) = coords[idx++];
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const double re = coords[idx++];
      const double im = coords[idx++];
      m(i, j) = Complex(re, im);
      m(j, i) = Complex(re, -im);
    }
  return HermMatrix(std::move(m));
}

RationalMatrix::RationalMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, Rational(0)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("RationalMatrix: negative shape");
}

std::vector<int> RationalMatrix::rref() {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < cols_ && row < rows_; ++col) {
    int p = -1;
    for (int i = row; i < rows_; ++i) {
      if (at(i, col) != 0) {
        p = i;
        break;
      }
    }
    if (p < 0) continue;
    if (p != row)
      for (int j = 0; j < cols_; ++j) std::swap(at(p, j), at(row, j));
    const Rational inv = Rational(1) / at(row, col);
    for (int j = 0; j < cols_; ++j) at(row, j) *= inv;
    for (int i = 0; i < rows_; ++i) {
      if (i == row || at(i, col) == 0) continue;
      const Rational f = at(i, col);
      for (int j = 0; j < cols_; ++j) at(i, j) -= f * at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int RationalMatrix::rank() const {
  RationalMatrix copy = *this;
  return static_cast<int>(copy.rref().size());
}

std::vector<std::vector<Rational>> RationalMatrix::nullspace(const RationalMatrix& a) {
  RationalMatrix r = a;
  std::vector<int> pivots = r.rref();
  std::vector<bool> is_pivot(a.cols(), false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (int free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(a.cols(), Rational(0));
    v[free] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -r.at(static_cast<int>(k), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

bool RationalMatrix::solve(const RationalMatrix& a, const std::vector<Rational>& b,
                           std::vector<Rational>& x_out) {
  if (static_cast<int>(b.size()) != a.rows())
    throw std::invalid_argument("RationalMatrix::solve: rhs size mismatch");
  RationalMatrix aug(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[static_cast<std::size_t>(i)];
  }
  std::vector<int> pivots = aug.rref();
  // Inconsistent iff the augmented column became a pivot.
  if (!pivots.empty() && pivots.back() == a.cols()) return false;
  x_out.assign(a.cols(), Rational(0));
  for (std::size_t k = 0; k < pivots.size(); ++k)
    x_out[pivots[k]] = aug.at(static_cast<int>(k), a.cols());
  return true;
}

}  // namespace oskit
