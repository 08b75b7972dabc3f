#pragma once

// Dense linear algebra helpers shared by the problem model, the subproblem
// solvers and the theory calculators. Everything here is a pure function of
// its arguments.

#include <Eigen/Dense>

#include <limits>

namespace pcsm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

namespace linalg {

/// Singular values at or below this fraction of max(1, sigma_max) count as zero.
inline constexpr double kRankTolerance = 1e-12;

/// Returned by reduced_hessian_min_eig when the null space is trivial.
inline constexpr double kEmptyNullSpace = std::numeric_limits<double>::infinity();

struct SvdFactors {
  Matrix u;                // rows x rows, orthogonal
  Vector singular_values;  // nonincreasing, length min(rows, cols)
  Matrix v;                // cols x cols, orthogonal
};

/// Full SVD, A = U * diag(sigma) * V^T.
SvdFactors svd(const Matrix& a);

/// Absolute threshold below which a singular value of `a` is treated as zero.
double rank_threshold(const Vector& singular_values);

/// Numerical rank using the shared tolerance.
Index rank(const Matrix& a);

/// B^+ = (B^T B)^{-1} B^T for a full-column-rank B. Throws RankDeficient.
Matrix pseudoinverse(const Matrix& b);

/// Orthogonal projector B B^+ onto range(B).
Matrix range_projector(const Matrix& b);

/// Complementary projector I - B B^+ onto Null(B^T).
Matrix null_projector(const Matrix& b);

/// Orthonormal basis of Null(bt) for an m x n full-row-rank bt (m <= n).
/// The result is n x (n - m) and taken from the trailing right singular vectors.
Matrix nullspace_basis(const Matrix& bt);

/// lambda_min(Z^T H Z); +inf when Z has no columns. Throws AsymmetricInput.
double reduced_hessian_min_eig(const Matrix& h, const Matrix& z);

/// Eigenvalues of Z^T H Z in ascending order (empty for an empty basis).
Vector reduced_hessian_eigenvalues(const Matrix& h, const Matrix& z);

/// True iff rank(A A^+ B) equals the column count, with A and B both of full column rank.
bool is_acute_perturbation(const Matrix& a, const Matrix& b);

/// Symmetric eigendecomposition sorted ascending.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& h);

bool all_finite(const Matrix& a);

}  // namespace linalg
}  // namespace pcsm
