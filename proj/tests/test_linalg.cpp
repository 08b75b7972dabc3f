#include "pcsm/errors.hpp"
#include "pcsm/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pcsm;
using namespace pcsm::linalg;

namespace {

Matrix m(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) out(i, j++) = v;
    ++i;
  }
  return out;
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

// Random n x k matrix with full column rank, singular values spread over [0.1, 3].
Matrix random_full_rank(std::mt19937_64& rng, Index n, Index k) {
  std::normal_distribution<double> g;
  Matrix a(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j) a(i, j) = g(rng);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  Vector s(k);
  for (Index j = 0; j < k; ++j) s(j) = u(rng);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace

TEST(Pseudoinverse, Identity) {
  EXPECT_LT(max_abs(pseudoinverse(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)), 1e-14);
}

TEST(Pseudoinverse, ColumnVector) {
  const Matrix p = pseudoinverse(m({{2.0}, {0.0}}));
  ASSERT_EQ(p.rows(), 1);
  ASSERT_EQ(p.cols(), 2);
  EXPECT_NEAR(p(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.0, 1e-15);
}

TEST(Pseudoinverse, TallIdentityBlock) {
  const Matrix p = pseudoinverse(m({{1, 0}, {0, 1}, {0, 0}}));
  EXPECT_LT(max_abs(p - m({{1, 0, 0}, {0, 1, 0}})), 1e-14);
}

TEST(Pseudoinverse, RankDeficientThrows) {
  try {
    pseudoinverse(m({{1, 2}, {2, 4}, {3, 6}}));
    FAIL() << "expected RankDeficient";
  } catch (const PcsmError& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
  EXPECT_THROW(pseudoinverse(Matrix::Zero(3, 1)), PcsmError);
}

TEST(Pseudoinverse, ToleranceIsScaleInvariant) {
  // Scaling a well-conditioned matrix never triggers the rank test.
  const Matrix b = m({{1, 0}, {0, 1e-6}, {0, 0}});
  EXPECT_NO_THROW(pseudoinverse(b));
  EXPECT_NO_THROW(pseudoinverse(1e9 * b));
  EXPECT_THROW(pseudoinverse(m({{1, 0}, {0, 1e-13}, {0, 0}})), PcsmError);
}

TEST(RangeProjector, Examples) {
  EXPECT_LT(max_abs(range_projector(m({{1}, {0}})) - m({{1, 0}, {0, 0}})), 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_LT(max_abs(range_projector(m({{r}, {r}})) - m({{0.5, 0.5}, {0.5, 0.5}})), 1e-15);
  EXPECT_LT(max_abs(null_projector(m({{1}, {0}})) - m({{0, 0}, {0, 1}})), 1e-15);
}

TEST(NullspaceBasis, Examples) {
  const Matrix z1 = nullspace_basis(m({{1, 0}}));
  ASSERT_EQ(z1.cols(), 1);
  EXPECT_NEAR(std::abs(z1(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(z1(0, 0), 0.0, 1e-15);

  const Matrix z2 = nullspace_basis(m({{1, -1}}));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(z2(0, 0)), r, 1e-15);
  EXPECT_NEAR(z2(0, 0), z2(1, 0), 1e-15);

  EXPECT_EQ(nullspace_basis(m({{2, 1}, {1, 3}})).cols(), 0);
  EXPECT_THROW(nullspace_basis(m({{1, 2, 3}, {2, 4, 6}})), PcsmError);
}

TEST(ReducedHessian, Examples) {
  EXPECT_DOUBLE_EQ(reduced_hessian_min_eig(m({{0, 0}, {0, 2}}), m({{0}, {1}})), 2.0);
  EXPECT_NEAR(reduced_hessian_min_eig(Matrix::Identity(3, 3), nullspace_basis(m({{1, 1, 1}}))),
              1.0, 1e-14);
  EXPECT_DOUBLE_EQ(reduced_hessian_min_eig(m({{-3, 0}, {0, 5}}), m({{1}, {0}})), -3.0);
  EXPECT_EQ(reduced_hessian_min_eig(Matrix::Identity(2, 2), Matrix(2, 0)), kEmptyNullSpace);
}

TEST(ReducedHessian, AsymmetricInputThrows) {
  try {
    reduced_hessian_min_eig(m({{1, 1}, {0, 1}}), Matrix::Identity(2, 2));
    FAIL();
  } catch (const PcsmError& e) {
    EXPECT_EQ(e.code(), ErrorCode::AsymmetricInput);
  }
}

TEST(AcutePerturbation, Examples) {
  EXPECT_TRUE(is_acute_perturbation(m({{1}, {0}}), m({{1}, {0}})));
  EXPECT_FALSE(is_acute_perturbation(m({{1}, {0}}), m({{0}, {1}})));
  EXPECT_TRUE(is_acute_perturbation(m({{1}, {0}}), m({{1}, {1}})));
  EXPECT_FALSE(is_acute_perturbation(m({{1, 2}, {2, 4}, {0, 0}}), m({{1, 0}, {0, 1}, {0, 0}})));
}

TEST(Svd, FactorsReconstruct) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_full_rank(rng, 6, 3);
    const SvdFactors f = svd(a);
    Matrix sigma = Matrix::Zero(6, 3);
    sigma.diagonal() = f.singular_values;
    EXPECT_LT(max_abs(f.u * sigma * f.v.transpose() - a) / max_abs(a), 1e-10);
    EXPECT_LT(max_abs(f.u.transpose() * f.u - Matrix::Identity(6, 6)), 1e-10);
    EXPECT_LT(max_abs(f.v.transpose() * f.v - Matrix::Identity(3, 3)), 1e-10);
    for (Index j = 1; j < 3; ++j) EXPECT_GE(f.singular_values(j - 1), f.singular_values(j));
  }
}

// Moore-Penrose identities, projector properties, the pseudoinverse norm and
// null-space orthogonality on random matrices with m <= n <= 8.
TEST(LinalgProperties, RandomMatrices) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = dim(rng);
    const Index k = std::uniform_int_distribution<int>(1, static_cast<int>(n))(rng);
    const Matrix b = random_full_rank(rng, n, k);
    const Matrix bp = pseudoinverse(b);
    EXPECT_LT(max_abs(b * bp * b - b), 1e-9);
    EXPECT_LT(max_abs(bp * b * bp - bp), 1e-9);
    EXPECT_LT(max_abs(bp * b - Matrix::Identity(k, k)), 1e-9);

    const Matrix r = range_projector(b);
    const Matrix nproj = null_projector(b);
    EXPECT_LT(max_abs(r * r - r), 1e-9);
    EXPECT_LT(max_abs(r - r.transpose()), 1e-9);
    EXPECT_LT(max_abs(nproj * nproj - nproj), 1e-9);
    EXPECT_LT(max_abs(r + nproj - Matrix::Identity(n, n)), 1e-9);
    EXPECT_LT(max_abs(r * b - b), 1e-9);

    const Eigen::JacobiSVD<Matrix> ref(b);
    const double smin = ref.singularValues()(k - 1);
    const double pnorm = Eigen::JacobiSVD<Matrix>(bp).singularValues()(0);
    EXPECT_NEAR(pnorm * smin, 1.0, 1e-9);

    const Matrix z = nullspace_basis(b.transpose());
    ASSERT_EQ(z.cols(), n - k);
    if (z.cols() > 0) {
      EXPECT_LT(max_abs(b.transpose() * z), 1e-9);
      EXPECT_LT(max_abs(z.transpose() * z - Matrix::Identity(n - k, n - k)), 1e-9);
    }

    // Range-preserving change of basis keeps the perturbation acute.
    const Matrix mix = random_full_rank(rng, k, k);
    EXPECT_TRUE(is_acute_perturbation(b, b * mix));
  }
}

// lambda_min of Z^T H Z against random unit directions in span(Z).
TEST(LinalgProperties, ReducedHessianBruteForce) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 3;
    Matrix a(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) a(i, j) = g(rng);
    const Matrix h = 0.5 * (a + a.transpose());
    Matrix bt(1, n);
    for (Index j = 0; j < n; ++j) bt(0, j) = g(rng);
    const Matrix z = nullspace_basis(bt);
    const double lam = reduced_hessian_min_eig(h, z);
    double oracle = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10000; ++s) {
      Vector w(z.cols());
      for (Index j = 0; j < w.size(); ++j) w(j) = g(rng);
      const Vector d = z * w.normalized();
      oracle = std::min(oracle, d.dot(h * d));
    }
    EXPECT_LE(lam, oracle + 1e-6);
    EXPECT_GE(lam, oracle - 0.05);
  }
}
