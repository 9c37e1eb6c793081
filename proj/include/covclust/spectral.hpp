#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string_view>

#include "covclust/errors.hpp"

namespace covclust {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// d x d symmetric positive-semidefinite matrix. Construction symmetrizes by
/// averaging and rejects matrices with an eigenvalue below
/// -tol_psd * max|eigenvalue|.
template <typename Scalar>
class SymMatrix {
 public:
  static constexpr Scalar kPsdTol = Scalar(1e-10);

  template <typename Derived>
  explicit SymMatrix(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw Error("SymMatrix: matrix must be square and non-empty");
    mat_ = (m + m.transpose()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(mat_, Eigen::EigenvaluesOnly);
    const Scalar lo = es.eigenvalues().minCoeff();
    const Scalar hi = es.eigenvalues().cwiseAbs().maxCoeff();
    if (lo < -kPsdTol * hi)
      throw SingularMatrixError("SymMatrix: matrix is not positive semidefinite");
  }

  Eigen::Index dim() const { return mat_.rows(); }
  const MatrixX<Scalar>& mat() const { return mat_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

 private:
  MatrixX<Scalar> mat_;
};

using SymMatrixd = SymMatrix<double>;

/// Size/shape/orientation factorization S = gamma * beta * diag(shape) * beta^T
/// with gamma = det(S)^{1/d}, prod(shape) = 1 (descending), beta orthogonal.
template <typename Scalar>
struct SpectralDecomp {
  Scalar gamma;
  VectorX<Scalar> shape;
  MatrixX<Scalar> orientation;
};

/// Symmetric eigendecomposition, eigenvalues descending, with a deterministic
/// sign convention: the largest-magnitude entry of each eigenvector is
/// positive (first such entry on ties).
template <typename Scalar>
std::pair<VectorX<Scalar>, MatrixX<Scalar>> eigh_sym(const SymMatrix<Scalar>& S) {
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(S.mat());
  const Eigen::Index d = S.dim();
  VectorX<Scalar> lam(d);
  MatrixX<Scalar> vec(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    lam[j] = es.eigenvalues()[d - 1 - j];
    vec.col(j) = es.eigenvectors().col(d - 1 - j);
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::Index imax = 0;
    vec.col(j).cwiseAbs().maxCoeff(&imax);
    if (vec(imax, j) < Scalar(0)) vec.col(j) = -vec.col(j);
  }
  return {std::move(lam), std::move(vec)};
}

/// Spectral decomposition of a strictly positive definite matrix.
/// Throws SingularMatrixError when min eigenvalue <= 1e-12 * max.
template <typename Scalar>
SpectralDecomp<Scalar> decompose(const SymMatrix<Scalar>& S) {
  auto [lam, vec] = eigh_sym(S);
  const Eigen::Index d = S.dim();
  if (lam[d - 1] <= Scalar(1e-12) * lam[0])
    throw SingularMatrixError("decompose: matrix is numerically singular");
  // geometric mean via logs to stay stable for large d
  const Scalar gamma = std::exp(lam.array().log().sum() / Scalar(d));
  return {gamma, lam / gamma, std::move(vec)};
}

/// Rebuild gamma * beta * diag(shape) * beta^T.
/// Throws InvalidShapeError when prod(shape) deviates from 1 by > 1e-6.
template <typename Scalar>
SymMatrix<Scalar> compose(Scalar gamma, const VectorX<Scalar>& shape,
                          const MatrixX<Scalar>& orientation) {
  const Scalar logprod = shape.array().log().sum();
  if (std::abs(std::expm1(logprod)) > Scalar(1e-6))
    throw InvalidShapeError("compose: shape product deviates from 1");
  MatrixX<Scalar> m =
      gamma * orientation * shape.asDiagonal() * orientation.transpose();
  return SymMatrix<Scalar>(m);
}

/// n * (log|Sigma| + tr(Sigma^{-1} S)): differences across Sigma candidates
/// equal -2x differences of log Wishart densities W_d(nS | n, Sigma).
template <typename Scalar>
Scalar wishart_discrepancy(const SymMatrix<Scalar>& S, Scalar n,
                           const SymMatrix<Scalar>& Sigma) {
  Eigen::LLT<MatrixX<Scalar>> llt(Sigma.mat());
  if (llt.info() != Eigen::Success)
    throw SingularMatrixError("wishart_discrepancy: Sigma is not positive definite");
  const MatrixX<Scalar> L = llt.matrixL();
  const Scalar logdet = Scalar(2) * L.diagonal().array().log().sum();
  const Scalar tr = llt.solve(S.mat()).trace();
  return n * (logdet + tr);
}

// ---------------------------------------------------------------------------
// Parsimonious level registry
// ---------------------------------------------------------------------------

enum class Flag { Equal, Variable, Absent };

/// One of the 14 constraint levels on (size, shape, orientation).
/// Orientation `Absent` means axis-aligned (canonical axes); for spherical
/// shapes both shape and orientation carry no free parameters.
struct ParsimoniousLevel {
  std::string_view code;
  Flag size;
  Flag shape;
  Flag orient;
};

inline constexpr std::array<ParsimoniousLevel, 14> kParsimoniousLevels{{
    {"EII", Flag::Equal, Flag::Absent, Flag::Absent},
    {"VII", Flag::Variable, Flag::Absent, Flag::Absent},
    {"EEI", Flag::Equal, Flag::Equal, Flag::Absent},
    {"EVI", Flag::Equal, Flag::Variable, Flag::Absent},
    {"VEI", Flag::Variable, Flag::Equal, Flag::Absent},
    {"VVI", Flag::Variable, Flag::Variable, Flag::Absent},
    {"EEE", Flag::Equal, Flag::Equal, Flag::Equal},
    {"EEV", Flag::Equal, Flag::Equal, Flag::Variable},
    {"EVE", Flag::Equal, Flag::Variable, Flag::Equal},
    {"VEE", Flag::Variable, Flag::Equal, Flag::Equal},
    {"VVE", Flag::Variable, Flag::Variable, Flag::Equal},
    {"EVV", Flag::Equal, Flag::Variable, Flag::Variable},
    {"VEV", Flag::Variable, Flag::Equal, Flag::Variable},
    {"VVV", Flag::Variable, Flag::Variable, Flag::Variable},
}};

inline const ParsimoniousLevel& level_by_code(std::string_view code) {
  for (const auto& lv : kParsimoniousLevels)
    if (lv.code == code) return lv;
  throw Error("unknown parsimonious level: " + std::string(code));
}

/// Covariance parameter count for one of the 14 levels with k groups in
/// dimension d (size + shape + orientation contributions).
inline long cov_param_count(const ParsimoniousLevel& level, long k, long d) {
  const long size = level.size == Flag::Variable ? k : 1;
  long shape = 0;
  switch (level.shape) {
    case Flag::Absent: shape = 0; break;
    case Flag::Equal: shape = d - 1; break;
    case Flag::Variable: shape = k * (d - 1); break;
  }
  long orient = 0;
  switch (level.orient) {
    case Flag::Absent: orient = 0; break;
    case Flag::Equal: orient = d * (d - 1) / 2; break;
    case Flag::Variable: orient = k * d * (d - 1) / 2; break;
  }
  return size + shape + orient;
}

// ---------------------------------------------------------------------------
// Intermediate families
// ---------------------------------------------------------------------------

enum class FamilyKind { Cpc, Prop };

/// G-class intermediate family: orientations shared within each of G classes
/// (Cpc) or orientation and shape shared, so matrices in a class are
/// proportional (Prop).
struct IntermediateFamily {
  FamilyKind kind;
  long G;
};

inline long intermediate_param_count(const IntermediateFamily& family, long k, long d) {
  if (family.G < 1 || family.G > k) throw InvalidGError("G must lie in [1, k]");
  const long orient = family.G * d * (d - 1) / 2;
  if (family.kind == FamilyKind::Cpc) return k + k * (d - 1) + orient;
  return k + family.G * (d - 1) + orient;
}

}  // namespace covclust
