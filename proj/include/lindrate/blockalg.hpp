#pragma once

// Linear algebra over the block structure H_S (x) C^n.
//
// The extended space is ordered block-major: full index = block * d + a, so a
// full (n d) x (n d) matrix has the d x d block (i, j) at rows i*d.., cols j*d..

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lindrate {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr cplx kI{0.0, 1.0};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tolerances applied at reporting boundaries, never per integration step.
struct Tolerances {
  double hermitian = 1e-10;
  double min_eigenvalue = -1e-9;
  double total_trace = 1e-9;
};

class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(int n, int d);
  explicit BlockVector(std::vector<Vector> blocks);

  int n() const { return static_cast<int>(blocks_.size()); }
  int d() const { return blocks_.empty() ? 0 : static_cast<int>(blocks_.front().size()); }

  const Vector& operator[](int j) const { return blocks_[static_cast<std::size_t>(j)]; }
  Vector& operator[](int j) { return blocks_[static_cast<std::size_t>(j)]; }

  double squared_norm() const;
  double norm() const;
  bool is_zero() const;

  // Full vector in H_S (x) C^n, block-major.
  Vector flatten() const;

  BlockVector& operator+=(const BlockVector& other);
  BlockVector& operator*=(cplx s);

 private:
  std::vector<Vector> blocks_;
};

BlockVector operator+(BlockVector a, const BlockVector& b);
BlockVector operator*(cplx s, BlockVector v);

class BlockOperator {
 public:
  BlockOperator() = default;
  BlockOperator(int n, int d);  // zero blocks
  explicit BlockOperator(std::vector<Matrix> blocks);

  static BlockOperator uniform(int n, const Matrix& block);

  int n() const { return static_cast<int>(blocks_.size()); }
  int d() const { return blocks_.empty() ? 0 : static_cast<int>(blocks_.front().rows()); }

  const Matrix& operator[](int j) const { return blocks_[static_cast<std::size_t>(j)]; }
  Matrix& operator[](int j) { return blocks_[static_cast<std::size_t>(j)]; }

  BlockVector apply(const BlockVector& v) const;
  BlockOperator adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  bool is_zero() const;
  Matrix to_full() const;

 private:
  std::vector<Matrix> blocks_;
};

// n x n array of d x d matrices; entry (i, j) maps block j into block i.
class CouplingOperator {
 public:
  CouplingOperator() = default;
  CouplingOperator(int n, int d);

  int n() const { return n_; }
  int d() const { return d_; }

  const Matrix& operator()(int i, int j) const { return entries_[index(i, j)]; }
  Matrix& operator()(int i, int j) { return entries_[index(i, j)]; }

  // Action of S^j = sum_i R^{ij} (x) |e_i><e_j| : only block j of v is read.
  BlockVector apply_column(int j, const BlockVector& v) const;
  BlockVector apply(const BlockVector& v) const;
  bool column_is_zero(int j) const;
  Matrix to_full() const;
  Matrix column_to_full(int j) const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  int n_ = 0;
  int d_ = 0;
  std::vector<Matrix> entries_;
};

class BlockDensity {
 public:
  BlockDensity() = default;
  BlockDensity(int n, int d);  // zero blocks
  explicit BlockDensity(std::vector<Matrix> blocks);

  int n() const { return static_cast<int>(blocks_.size()); }
  int d() const { return blocks_.empty() ? 0 : static_cast<int>(blocks_.front().rows()); }

  const Matrix& operator[](int j) const { return blocks_[static_cast<std::size_t>(j)]; }
  Matrix& operator[](int j) { return blocks_[static_cast<std::size_t>(j)]; }

  cplx total_trace() const;
  // Empty when the blocks are Hermitian and PSD (and unit total trace if requested).
  std::vector<std::string> check(const Tolerances& tol = {}, bool normalized = false) const;
  double min_eigenvalue() const;

  Matrix to_full() const;
  static BlockDensity from_full_diagonal(const Matrix& full, int n, int d);

  // Column-stacked concatenation of the blocks (length n d^2) and its inverse.
  Vector vectorize() const;
  static BlockDensity unvectorize(const Vector& v, int n, int d);

  BlockDensity& operator+=(const BlockDensity& other);
  BlockDensity& operator-=(const BlockDensity& other);
  BlockDensity& operator*=(cplx s);

 private:
  std::vector<Matrix> blocks_;
};

BlockDensity operator+(BlockDensity a, const BlockDensity& b);
BlockDensity operator-(BlockDensity a, const BlockDensity& b);
BlockDensity operator*(cplx s, BlockDensity x);

// sum_i x_i : the system state.
Matrix block_sum(const BlockDensity& x);

// |v_i><v_i| per block.
BlockDensity outer_blocks(const BlockVector& v);

// sum_j Tr sqrt(x_j^* x_j).
double trace_norm(const BlockDensity& x);
double trace_norm(const Matrix& x);

// Smallest eigenvalue of the Hermitian part.
double min_hermitian_eigenvalue(const Matrix& x);

void require_same_shape(const BlockDensity& a, const BlockDensity& b, const char* what);

}  // namespace lindrate
