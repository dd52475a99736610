#include "lindrate/blockalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lindrate {

// ---------------------------------------------------------------------------
// BlockVector

BlockVector::BlockVector(int n, int d) : blocks_(static_cast<std::size_t>(n), Vector::Zero(d)) {
  if (n <= 0 || d <= 0) throw DimensionError("BlockVector: n and d must be positive");
}

BlockVector::BlockVector(std::vector<Vector> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw DimensionError("BlockVector: no blocks");
  for (const auto& b : blocks_)
    if (b.size() != blocks_.front().size() || b.size() == 0)
      throw DimensionError("BlockVector: blocks must share a positive dimension");
}

double BlockVector::squared_norm() const {
  double s = 0.0;
  for (const auto& b : blocks_) s += b.squaredNorm();
  return s;
}

double BlockVector::norm() const { return std::sqrt(squared_norm()); }

bool BlockVector::is_zero() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const Vector& b) { return b.isZero(0.0); });
}

Vector BlockVector::flatten() const {
  Vector out(n() * d());
  for (int j = 0; j < n(); ++j) out.segment(j * d(), d()) = blocks_[static_cast<std::size_t>(j)];
  return out;
}

BlockVector& BlockVector::operator+=(const BlockVector& other) {
  if (other.n() != n() || other.d() != d()) throw DimensionError("BlockVector: shape mismatch");
  for (int j = 0; j < n(); ++j) (*this)[j] += other[j];
  return *this;
}

BlockVector& BlockVector::operator*=(cplx s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

BlockVector operator+(BlockVector a, const BlockVector& b) { return a += b; }
BlockVector operator*(cplx s, BlockVector v) { return v *= s; }

// ---------------------------------------------------------------------------
// BlockOperator

BlockOperator::BlockOperator(int n, int d) : blocks_(static_cast<std::size_t>(n), Matrix::Zero(d, d)) {
  if (n <= 0 || d <= 0) throw DimensionError("BlockOperator: n and d must be positive");
}

BlockOperator::BlockOperator(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw DimensionError("BlockOperator: no blocks");
  const auto d = blocks_.front().rows();
  for (const auto& b : blocks_)
    if (b.rows() != d || b.cols() != d || d == 0)
      throw DimensionError("BlockOperator: blocks must be square and share a dimension");
}

BlockOperator BlockOperator::uniform(int n, const Matrix& block) {
  return BlockOperator(std::vector<Matrix>(static_cast<std::size_t>(n), block));
}

BlockVector BlockOperator::apply(const BlockVector& v) const {
  if (v.n() != n() || v.d() != d()) throw DimensionError("BlockOperator::apply: shape mismatch");
  BlockVector out(n(), d());
  for (int j = 0; j < n(); ++j) out[j].noalias() = (*this)[j] * v[j];
  return out;
}

BlockOperator BlockOperator::adjoint() const {
  std::vector<Matrix> adj;
  adj.reserve(blocks_.size());
  for (const auto& b : blocks_) adj.push_back(b.adjoint());
  return BlockOperator(std::move(adj));
}

bool BlockOperator::is_hermitian(double tol) const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [tol](const Matrix& b) { return (b - b.adjoint()).cwiseAbs().maxCoeff() <= tol; });
}

bool BlockOperator::is_zero() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const Matrix& b) { return b.isZero(0.0); });
}

Matrix BlockOperator::to_full() const {
  Matrix full = Matrix::Zero(n() * d(), n() * d());
  for (int j = 0; j < n(); ++j) full.block(j * d(), j * d(), d(), d()) = (*this)[j];
  return full;
}

// ---------------------------------------------------------------------------
// CouplingOperator

CouplingOperator::CouplingOperator(int n, int d)
    : n_(n), d_(d), entries_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), Matrix::Zero(d, d)) {
  if (n <= 0 || d <= 0) throw DimensionError("CouplingOperator: n and d must be positive");
}

BlockVector CouplingOperator::apply_column(int j, const BlockVector& v) const {
  if (v.n() != n_ || v.d() != d_) throw DimensionError("CouplingOperator::apply_column: shape mismatch");
  BlockVector out(n_, d_);
  for (int i = 0; i < n_; ++i) out[i].noalias() = (*this)(i, j) * v[j];
  return out;
}

BlockVector CouplingOperator::apply(const BlockVector& v) const {
  if (v.n() != n_ || v.d() != d_) throw DimensionError("CouplingOperator::apply: shape mismatch");
  BlockVector out(n_, d_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[i].noalias() += (*this)(i, j) * v[j];
  return out;
}

bool CouplingOperator::column_is_zero(int j) const {
  for (int i = 0; i < n_; ++i)
    if (!(*this)(i, j).isZero(0.0)) return false;
  return true;
}

Matrix CouplingOperator::to_full() const {
  Matrix full = Matrix::Zero(n_ * d_, n_ * d_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) full.block(i * d_, j * d_, d_, d_) = (*this)(i, j);
  return full;
}

Matrix CouplingOperator::column_to_full(int j) const {
  Matrix full = Matrix::Zero(n_ * d_, n_ * d_);
  for (int i = 0; i < n_; ++i) full.block(i * d_, j * d_, d_, d_) = (*this)(i, j);
  return full;
}

// ---------------------------------------------------------------------------
// BlockDensity

BlockDensity::BlockDensity(int n, int d) : blocks_(static_cast<std::size_t>(n), Matrix::Zero(d, d)) {
  if (n <= 0 || d <= 0) throw DimensionError("BlockDensity: n and d must be positive");
}

BlockDensity::BlockDensity(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw DimensionError("BlockDensity: no blocks");
  const auto d = blocks_.front().rows();
  for (const auto& b : blocks_)
    if (b.rows() != d || b.cols() != d || d == 0)
      throw DimensionError("BlockDensity: blocks must be square and share a dimension");
}

cplx BlockDensity::total_trace() const {
  cplx t = 0.0;
  for (const auto& b : blocks_) t += b.trace();
  return t;
}

std::vector<std::string> BlockDensity::check(const Tolerances& tol, bool normalized) const {
  std::vector<std::string> issues;
  for (int j = 0; j < n(); ++j) {
    const Matrix& b = (*this)[j];
    const double asym = (b - b.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol.hermitian) {
      std::ostringstream os;
      os << "block " << j + 1 << " is not Hermitian (deviation " << asym << ")";
      issues.push_back(os.str());
    }
    const double lo = min_hermitian_eigenvalue(b);
    if (lo < tol.min_eigenvalue) {
      std::ostringstream os;
      os << "block " << j + 1 << " has eigenvalue " << lo << " below " << tol.min_eigenvalue;
      issues.push_back(os.str());
    }
  }
  if (normalized) {
    const cplx tr = total_trace();
    if (std::abs(tr - 1.0) > tol.total_trace) {
      std::ostringstream os;
      os << "total trace " << tr.real() << (tr.imag() < 0 ? "" : "+") << tr.imag() << "i differs from 1";
      issues.push_back(os.str());
    }
  }
  return issues;
}

double BlockDensity::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks_) lo = std::min(lo, min_hermitian_eigenvalue(b));
  return lo;
}

Matrix BlockDensity::to_full() const {
  Matrix full = Matrix::Zero(n() * d(), n() * d());
  for (int j = 0; j < n(); ++j) full.block(j * d(), j * d(), d(), d()) = (*this)[j];
  return full;
}

BlockDensity BlockDensity::from_full_diagonal(const Matrix& full, int n, int d) {
  if (full.rows() != n * d || full.cols() != n * d)
    throw DimensionError("BlockDensity::from_full_diagonal: shape mismatch");
  BlockDensity out(n, d);
  for (int j = 0; j < n; ++j) out[j] = full.block(j * d, j * d, d, d);
  return out;
}

Vector BlockDensity::vectorize() const {
  const int dd = d() * d();
  Vector v(n() * dd);
  for (int j = 0; j < n(); ++j) v.segment(j * dd, dd) = Eigen::Map<const Vector>((*this)[j].data(), dd);
  return v;
}

BlockDensity BlockDensity::unvectorize(const Vector& v, int n, int d) {
  const int dd = d * d;
  if (v.size() != n * dd) throw DimensionError("BlockDensity::unvectorize: length mismatch");
  BlockDensity out(n, d);
  for (int j = 0; j < n; ++j) out[j] = Eigen::Map<const Matrix>(v.data() + j * dd, d, d);
  return out;
}

BlockDensity& BlockDensity::operator+=(const BlockDensity& other) {
  require_same_shape(*this, other, "BlockDensity::operator+=");
  for (int j = 0; j < n(); ++j) (*this)[j] += other[j];
  return *this;
}

BlockDensity& BlockDensity::operator-=(const BlockDensity& other) {
  require_same_shape(*this, other, "BlockDensity::operator-=");
  for (int j = 0; j < n(); ++j) (*this)[j] -= other[j];
  return *this;
}

BlockDensity& BlockDensity::operator*=(cplx s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

BlockDensity operator+(BlockDensity a, const BlockDensity& b) { return a += b; }
BlockDensity operator-(BlockDensity a, const BlockDensity& b) { return a -= b; }
BlockDensity operator*(cplx s, BlockDensity x) { return x *= s; }

// ---------------------------------------------------------------------------

Matrix block_sum(const BlockDensity& x) {
  Matrix s = Matrix::Zero(x.d(), x.d());
  for (int j = 0; j < x.n(); ++j) s += x[j];
  return s;
}

BlockDensity outer_blocks(const BlockVector& v) {
  BlockDensity out(v.n(), v.d());
  for (int j = 0; j < v.n(); ++j) out[j].noalias() = v[j] * v[j].adjoint();
  return out;
}

double trace_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(x);
  return svd.singularValues().sum();
}

double trace_norm(const BlockDensity& x) {
  double s = 0.0;
  for (int j = 0; j < x.n(); ++j) s += trace_norm(x[j]);
  return s;
}

double min_hermitian_eigenvalue(const Matrix& x) {
  const Matrix h = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_same_shape(const BlockDensity& a, const BlockDensity& b, const char* what) {
  if (a.n() != b.n() || a.d() != b.d()) throw DimensionError(std::string(what) + ": shape mismatch");
}

}  // namespace lindrate
