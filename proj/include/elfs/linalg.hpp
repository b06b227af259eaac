#pragma once

#include <complex>

#include <Eigen/Dense>

namespace elfs {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Singular values below kPinvRelCut * sigma_max count as zero.
inline constexpr double kPinvRelCut = 1e-10;
// Operators here are O(1); anything below this is rounding noise, even when it is the
// largest singular value.
inline constexpr double kAbsoluteCut = 1e-13;

/// Moore-Penrose pseudoinverse through a full SVD with a relative rank cut.
CMat pinv(const CMat& a, double rel_cut = kPinvRelCut);
RMat pinv(const RMat& a, double rel_cut = kPinvRelCut);
/// Pseudoinverse of a Hermitian matrix through its eigendecomposition.
CMat pinv_hermitian(const CMat& a, double rel_cut = kPinvRelCut);
template <class Derived>
CMat pinv_hermitian(const Eigen::MatrixBase<Derived>& a, double rel_cut = kPinvRelCut) {
  return pinv_hermitian(CMat(a), rel_cut);
}

/// Orthonormal basis (columns) of ker(a).
CMat kernel_basis(const CMat& a, double rel_cut = kPinvRelCut);
RMat kernel_basis(const RMat& a, double rel_cut = kPinvRelCut);

/// Orthonormal basis of ker(a) for Hermitian a, eigenvalues below the relative cut dropped.
CMat hermitian_kernel_basis(const CMat& a, double rel_cut = kPinvRelCut);

/// Orthonormal basis (columns) of im(a).
CMat range_basis(const CMat& a, double rel_cut = kPinvRelCut);

/// Projector onto the column span of `basis` (columns need not be orthonormal).
CMat projector_onto(const CMat& basis, double rel_cut = kPinvRelCut);

/// Numerical rank with the same relative cut as pinv.
int numerical_rank(const CMat& a, double rel_cut = kPinvRelCut);

/// max(||P^2 - P||, ||P - P^dagger||) in operator 2-norm.
double projector_defect(const CMat& p);

/// ||U^dagger U - I|| in operator 2-norm.
double unitarity_defect(const CMat& u);

double op_norm(const CMat& a);
double op_norm(const RMat& a);

// Expression arguments are evaluated into the matching dense type.
template <class Derived>
auto pinv(const Eigen::MatrixBase<Derived>& a, double rel_cut = kPinvRelCut) {
  return pinv(Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>(a), rel_cut);
}
template <class Derived>
double op_norm(const Eigen::MatrixBase<Derived>& a) {
  return op_norm(Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>(a));
}

}  // namespace elfs
