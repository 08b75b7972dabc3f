#include "pcsm/linalg.hpp"

#include "pcsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcsm::linalg {

namespace {

constexpr double kSymmetryTolerance = 1e-10;

// Full-column-rank factorization shared by pseudoinverse and the projectors.
SvdFactors checked_column_svd(const Matrix& b, const char* what) {
  if (b.cols() > b.rows()) {
    throw PcsmError(ErrorCode::RankDeficient,
                    std::string(what) + ": more columns than rows");
  }
  // Thin factors: only the leading b.cols() left singular vectors are needed.
  Eigen::JacobiSVD<Matrix> solver(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  if (b.cols() > 0 &&
      f.singular_values(b.cols() - 1) <= rank_threshold(f.singular_values)) {
    throw PcsmError(ErrorCode::RankDeficient,
                    std::string(what) + ": smallest singular value below tolerance");
  }
  return f;
}

}  // namespace

SvdFactors svd(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double rank_threshold(const Vector& singular_values) {
  const double smax = singular_values.size() > 0 ? singular_values(0) : 0.0;
  return kRankTolerance * std::max(1.0, smax);
}

Index rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> solver(a);
  const Vector& s = solver.singularValues();
  const double tol = rank_threshold(s);
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) ++r;
  }
  return r;
}

Matrix pseudoinverse(const Matrix& b) {
  const SvdFactors f = checked_column_svd(b, "pseudoinverse");
  const Index m = b.cols();
  // B^+ = V diag(1/sigma) U_1^T with U_1 the leading m left singular vectors.
  Matrix result = f.v * f.singular_values.head(m).cwiseInverse().asDiagonal() *
                  f.u.leftCols(m).transpose();
  return result;
}

Matrix range_projector(const Matrix& b) {
  const SvdFactors f = checked_column_svd(b, "range_projector");
  const Matrix u1 = f.u.leftCols(b.cols());
  return u1 * u1.transpose();
}

Matrix null_projector(const Matrix& b) {
  return Matrix::Identity(b.rows(), b.rows()) - range_projector(b);
}

Matrix nullspace_basis(const Matrix& bt) {
  const Index m = bt.rows();
  const Index n = bt.cols();
  if (m > n) {
    throw PcsmError(ErrorCode::RankDeficient, "nullspace_basis: more rows than columns");
  }
  const SvdFactors f = svd(bt);
  if (m > 0 && f.singular_values(m - 1) <= rank_threshold(f.singular_values)) {
    throw PcsmError(ErrorCode::RankDeficient, "nullspace_basis: rank-deficient rows");
  }
  return f.v.rightCols(n - m);
}

Vector reduced_hessian_eigenvalues(const Matrix& h, const Matrix& z) {
  if (h.rows() != h.cols() || h.rows() != z.rows()) {
    throw PcsmError(ErrorCode::InvalidArgument, "reduced_hessian: dimension mismatch");
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw PcsmError(ErrorCode::AsymmetricInput, "reduced_hessian: H is not symmetric");
  }
  if (z.cols() == 0) return Vector();
  Matrix reduced = z.transpose() * h * z;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

double reduced_hessian_min_eig(const Matrix& h, const Matrix& z) {
  const Vector values = reduced_hessian_eigenvalues(h, z);
  if (values.size() == 0) return kEmptyNullSpace;
  return values(0);
}

bool is_acute_perturbation(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const Index m = a.cols();
  if (rank(a) != m || rank(b) != m) return false;
  const Matrix projected = range_projector(a) * b;
  return rank(projected) == m;
}

SymmetricEigen symmetric_eigen(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  return {eig.eigenvalues(), eig.eigenvectors()};
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace pcsm::linalg
