#include <doctest.h>

#include "lindrate/blockalg.hpp"
#include "oracles.hpp"

using namespace lindrate;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("block_sum adds the blocks") {
  const BlockDensity x({diag2(0.3, 0.2), diag2(0.1, 0.4)});
  CHECK((block_sum(x) - diag2(0.4, 0.6)).norm() < 1e-15);

  const BlockDensity single({diag2(0.7, 0.3)});
  CHECK((block_sum(single) - diag2(0.7, 0.3)).norm() == 0.0);
}

TEST_CASE("block_sum commutes with convex combination") {
  oracle::Gen g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = g.integer(1, 4), d = g.integer(1, 4);
    const BlockDensity a = g.density(n, d), b = g.density(n, d);
    const double lam = g.uniform();
    const Matrix lhs = block_sum(lam * a + (1.0 - lam) * b);
    const Matrix rhs = lam * block_sum(a) + (1.0 - lam) * block_sum(b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("outer_blocks of a basis vector") {
  BlockVector v(2, 2);
  v[0] << 1.0, 0.0;
  const BlockDensity x = outer_blocks(v);
  CHECK((x[0] - diag2(1.0, 0.0)).norm() == 0.0);
  CHECK(x[1].norm() == 0.0);
}

TEST_CASE("outer_blocks is positive with total trace equal to the squared norm") {
  oracle::Gen g(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(1, 5), d = g.integer(1, 5);
    BlockVector v = g.block_vector(n, d);
    const BlockDensity x = outer_blocks(v);
    CHECK(x.check().empty());
    CHECK(std::abs(x.total_trace() - cplx(v.squared_norm())) < 1e-14 * std::max(1.0, v.squared_norm()));
    v *= 1.0 / v.norm();
    CHECK(std::abs(outer_blocks(v).total_trace() - 1.0) < 1e-14);
  }
}

TEST_CASE("trace_norm examples") {
  CHECK(trace_norm(BlockDensity(3, 2)) == 0.0);
  oracle::Gen g(13);
  for (int trial = 0; trial < 50; ++trial) {
    const BlockDensity a = g.density(2, 2), b = g.density(2, 2);
    CHECK(trace_norm(a) == doctest::Approx(1.0).epsilon(1e-12));
    const double dist = trace_norm(a - b);
    CHECK(dist >= 0.0);
    CHECK(dist <= 2.0 + 1e-12);
  }
}

TEST_CASE("trace_norm equals the sum of singular values") {
  oracle::Gen g(14);
  for (int trial = 0; trial < 30; ++trial) {
    const BlockDensity x = g.blocks(3, 3);
    double expected = 0.0;
    for (int i = 0; i < 3; ++i) expected += Eigen::JacobiSVD<Matrix>(x[i]).singularValues().sum();
    CHECK(trace_norm(x) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("trace_norm is a norm") {
  oracle::Gen g(15);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.integer(1, 3), d = g.integer(1, 4);
    const BlockDensity a = g.blocks(n, d), b = g.blocks(n, d);
    const cplx s(g.normal(), g.normal());
    CHECK(std::abs(trace_norm(s * a) - std::abs(s) * trace_norm(a)) < 1e-12 * (1.0 + trace_norm(s * a)));
    CHECK(trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-12);
  }
}

TEST_CASE("density checks use the stated tolerances") {
  BlockDensity x({diag2(0.5, 0.5)});
  CHECK(x.check({}, true).empty());

  BlockDensity neg({diag2(1.0 + 1e-3, -1e-3)});
  CHECK_FALSE(neg.check().empty());
  BlockDensity tiny_neg({diag2(1.0 + 1e-10, -1e-10)});
  CHECK(tiny_neg.check().empty());

  BlockDensity nonherm({diag2(0.5, 0.5)});
  nonherm[0](0, 1) = 1e-6;
  CHECK_FALSE(nonherm.check().empty());

  BlockDensity unnorm({diag2(0.5, 0.6)});
  CHECK(unnorm.check().empty());
  CHECK_FALSE(unnorm.check({}, true).empty());
}

TEST_CASE("vectorize round trip and full embedding") {
  oracle::Gen g(16);
  const BlockDensity x = g.blocks(3, 2);
  const BlockDensity y = BlockDensity::unvectorize(x.vectorize(), 3, 2);
  CHECK(trace_norm(x - y) == 0.0);

  const Matrix full = x.to_full();
  CHECK(full.rows() == 6);
  CHECK((full.block(2, 2, 2, 2) - x[1]).norm() == 0.0);
  CHECK(full.block(0, 2, 2, 2).norm() == 0.0);
  const BlockDensity z = BlockDensity::from_full_diagonal(full, 3, 2);
  CHECK(trace_norm(x - z) == 0.0);
}

TEST_CASE("block operators act block by block") {
  oracle::Gen g(17);
  const BlockOperator A({g.matrix(3), g.matrix(3)});
  const BlockVector v = g.block_vector(2, 3);
  const BlockVector w = A.apply(v);
  for (int i = 0; i < 2; ++i) CHECK((w[i] - A[i] * v[i]).norm() < 1e-14);
  CHECK((A.to_full() * v.flatten() - w.flatten()).norm() < 1e-13);
  CHECK_FALSE(A.is_hermitian());
  const BlockOperator H({g.hermitian(3), g.hermitian(3)});
  CHECK(H.is_hermitian());
}

TEST_CASE("coupling operators map block j into block i") {
  oracle::Gen g(18);
  CouplingOperator S(3, 2);
  S(2, 0) = g.matrix(2);
  S(1, 1) = g.matrix(2);
  BlockVector v = g.block_vector(3, 2);
  const BlockVector c0 = S.apply_column(0, v);
  CHECK(c0[0].norm() == 0.0);
  CHECK(c0[1].norm() == 0.0);
  CHECK((c0[2] - S(2, 0) * v[0]).norm() < 1e-14);
  CHECK((S.to_full() * v.flatten() - S.apply(v).flatten()).norm() < 1e-13);
  CHECK((S.column_to_full(1) * v.flatten() - S.apply_column(1, v).flatten()).norm() < 1e-13);
  CHECK(S.column_is_zero(2));
  CHECK_FALSE(S.column_is_zero(0));
}

TEST_CASE("shape mismatches are rejected") {
  CHECK_THROWS_AS(BlockDensity(2, 2) + BlockDensity(3, 2), DimensionError);
  CHECK_THROWS_AS(BlockVector(2, 2) += BlockVector(2, 3), DimensionError);
}
