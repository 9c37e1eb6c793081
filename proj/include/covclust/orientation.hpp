#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

#include "covclust/errors.hpp"
#include "covclust/spectral.hpp"

namespace covclust {

/// Weighted trace-discrepancy problem: find an orthogonal beta minimizing
/// sum_i w_i sum_l (beta^T S_i beta)_ll / lambda_{i,l}, with w_i = n_i/gamma_i.
/// Shapes are per-matrix (equal across i for proportional-family calls).
template <typename Scalar>
struct OrientationProblem {
  std::vector<MatrixX<Scalar>> scatters;
  std::vector<Scalar> weights;
  std::vector<VectorX<Scalar>> shapes;
};

template <typename Scalar>
struct OrientationFit {
  MatrixX<Scalar> beta;
  bool converged;
  std::vector<Scalar> objective_trace;
};

template <typename Scalar>
Scalar orientation_objective(const MatrixX<Scalar>& beta,
                             const OrientationProblem<Scalar>& prob) {
  Scalar total = 0;
  for (std::size_t i = 0; i < prob.scatters.size(); ++i) {
    const VectorX<Scalar> proj =
        (beta.transpose() * prob.scatters[i] * beta).diagonal();
    total += prob.weights[i] * (proj.array() / prob.shapes[i].array()).sum();
  }
  return total;
}

/// Majorization-minimization over the orthogonal group. Each sweep builds
/// G = sum_i w_i (alpha_i I - S_i) beta Lambda_i^{-1} with alpha_i the largest
/// eigenvalue of S_i (so alpha_i I - S_i is PSD and the surrogate is linear
/// in beta) and sets beta to the orthogonal maximizer U V^T of tr(G^T beta).
/// The objective never increases. Non-convergence is reported via the flag,
/// not an error.
template <typename Scalar>
OrientationFit<Scalar> fit_common_orientation(const OrientationProblem<Scalar>& prob,
                                              const MatrixX<Scalar>& init,
                                              int max_iter = 500,
                                              Scalar tol = Scalar(1e-10)) {
  const std::size_t r = prob.scatters.size();
  if (r == 0 || prob.weights.size() != r || prob.shapes.size() != r)
    throw Error("fit_common_orientation: inconsistent problem");
  const Eigen::Index d = prob.scatters.front().rows();

  MatrixX<Scalar> beta = init;
  OrientationFit<Scalar> fit{beta, true, {orientation_objective(beta, prob)}};

  // spherical shapes: objective is rotation-invariant, nothing to fit
  bool spherical = true;
  for (const auto& lam : prob.shapes)
    if (((lam.array() - Scalar(1)).abs() > Scalar(1e-12)).any()) {
      spherical = false;
      break;
    }
  if (spherical) return fit;

  std::vector<Scalar> alphas(r);
  for (std::size_t i = 0; i < r; ++i) {
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(prob.scatters[i],
                                                      Eigen::EigenvaluesOnly);
    alphas[i] = es.eigenvalues().maxCoeff();
  }

  fit.converged = false;
  for (int it = 0; it < max_iter; ++it) {
    MatrixX<Scalar> grad = MatrixX<Scalar>::Zero(d, d);
    for (std::size_t i = 0; i < r; ++i) {
      MatrixX<Scalar> psd = -prob.scatters[i];
      psd.diagonal().array() += alphas[i];
      grad += prob.weights[i] * psd * beta *
              prob.shapes[i].cwiseInverse().asDiagonal();
    }
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(
        grad, Eigen::ComputeThinU | Eigen::ComputeThinV);
    beta = svd.matrixU() * svd.matrixV().transpose();
    const Scalar f = orientation_objective(beta, prob);
    const Scalar prev = fit.objective_trace.back();
    fit.objective_trace.push_back(f);
    if (std::abs(prev - f) <= tol * std::max(Scalar(1), std::abs(f))) {
      fit.converged = true;
      break;
    }
  }
  fit.beta = std::move(beta);
  return fit;
}

/// Permutation putting the projected variances of `scatter` under `beta` in
/// descending order; applied jointly to beta columns and shape slots for a
/// canonical serialization order.
template <typename Scalar>
std::vector<Eigen::Index> canonical_column_order(const MatrixX<Scalar>& beta,
                                                 const MatrixX<Scalar>& scatter) {
  const VectorX<Scalar> proj = (beta.transpose() * scatter * beta).diagonal();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(proj.size()));
  for (std::size_t l = 0; l < order.size(); ++l) order[l] = static_cast<Eigen::Index>(l);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return proj[a] > proj[b]; });
  return order;
}

}  // namespace covclust
