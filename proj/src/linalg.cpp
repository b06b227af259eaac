#include "elfs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace elfs {
namespace {

template <typename Mat>
Mat pinv_impl(const Mat& a, double rel_cut) {
  if (a.size() == 0) return Mat::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = std::max(kAbsoluteCut, rel_cut * (sv.size() > 0 ? sv(0) : 0.0));
  Mat inv = Mat::Zero(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut && sv(i) > 0.0) {
      inv += svd.matrixV().col(i) * (1.0 / sv(i)) * svd.matrixU().col(i).adjoint();
    }
  }
  return inv;
}

}  // namespace

CMat pinv(const CMat& a, double rel_cut) { return pinv_impl(a, rel_cut); }

CMat pinv_hermitian(const CMat& a, double rel_cut) {
  if (a.size() == 0) return a;
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  const RVec& lam = es.eigenvalues();
  const double cut = std::max(kAbsoluteCut, rel_cut * lam.cwiseAbs().maxCoeff());
  CMat inv = CMat::Zero(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (std::abs(lam(i)) > cut && lam(i) != 0.0) {
      inv += es.eigenvectors().col(i) * (1.0 / lam(i)) * es.eigenvectors().col(i).adjoint();
    }
  }
  return inv;
}
RMat pinv(const RMat& a, double rel_cut) { return pinv_impl(a, rel_cut); }

int numerical_rank(const CMat& a, double rel_cut) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(a);
  const auto& sv = svd.singularValues();
  const double cut = std::max(kAbsoluteCut, rel_cut * sv(0));
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut && sv(i) > 0.0) ++r;
  }
  return r;
}

template <typename Mat>
Mat kernel_impl(const Mat& a, double rel_cut) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = std::max(kAbsoluteCut, rel_cut * (sv.size() > 0 ? sv(0) : 0.0));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut && sv(i) > 0.0) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

CMat kernel_basis(const CMat& a, double rel_cut) { return kernel_impl(a, rel_cut); }
RMat kernel_basis(const RMat& a, double rel_cut) { return kernel_impl(a, rel_cut); }

CMat hermitian_kernel_basis(const CMat& a, double rel_cut) {
  const Eigen::Index n = a.cols();
  if (n == 0) return CMat::Zero(0, 0);
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  const RVec& lam = es.eigenvalues();
  const double cut = std::max(kAbsoluteCut, rel_cut * lam.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::abs(lam(i)) > cut && lam(i) != 0.0)) keep.push_back(i);
  }
  CMat basis(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) basis.col(j) = es.eigenvectors().col(keep[j]);
  return basis;
}

CMat range_basis(const CMat& a, double rel_cut) {
  if (a.size() == 0) return CMat::Zero(a.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double cut = std::max(kAbsoluteCut, rel_cut * sv(0));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut && sv(i) > 0.0) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

CMat projector_onto(const CMat& basis, double rel_cut) {
  const CMat q = range_basis(basis, rel_cut);
  return q * q.adjoint();
}

// Largest singular value from the top eigenvalue of A^dagger A; well conditioned
// for the norm itself and much cheaper than a full SVD.
double op_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  const CMat gram = a.rows() < a.cols() ? CMat(a * a.adjoint()) : CMat(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<CMat> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double op_norm(const RMat& a) {
  if (a.size() == 0) return 0.0;
  const RMat gram = a.rows() < a.cols() ? RMat(a * a.transpose()) : RMat(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<RMat> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double projector_defect(const CMat& p) {
  return std::max(op_norm(CMat(p * p - p)), op_norm(CMat(p - p.adjoint())));
}

double unitarity_defect(const CMat& u) {
  return op_norm(CMat(u.adjoint() * u - CMat::Identity(u.cols(), u.cols())));
}

}  // namespace elfs
