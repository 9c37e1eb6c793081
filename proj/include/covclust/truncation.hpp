#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "covclust/errors.hpp"
#include "covclust/spectral.hpp"

namespace covclust {

/// A group has scatter-like values outside the feasible band [m, c*m]; the
/// operator clamps them at the likelihood-optimal threshold m.
template <typename Scalar>
struct TruncationResult {
  MatrixX<Scalar> truncated;  // J x L
  Scalar m_opt;
};

/// Clamp d into [m, c*m].
template <typename Scalar>
Scalar truncate(Scalar d, Scalar m, Scalar c) {
  if (d < m) return m;
  if (d > c * m) return c * m;
  return d;
}

namespace detail {

template <typename Scalar>
Scalar ot_objective(const VectorX<Scalar>& weights, const MatrixX<Scalar>& values,
                    Scalar m, Scalar c) {
  Scalar total = 0;
  for (Eigen::Index j = 0; j < values.rows(); ++j)
    for (Eigen::Index l = 0; l < values.cols(); ++l) {
      const Scalar dm = truncate(values(j, l), m, c);
      total += weights[j] * (std::log(dm) + values(j, l) / dm);
    }
  return total;
}

}  // namespace detail

/// Optimal truncation OT_c for weights {n_j} and values {d_jl} >= 0, c >= 1.
/// m_opt minimizes sum_j n_j sum_l (log d_jl^m + d_jl / d_jl^m); candidates
/// are the breakpoints {d_jl, d_jl/c} plus the per-regime stationary points
/// (weighted means), ties resolved toward the smaller m. c = +inf means no
/// constraint and short-circuits to the identity.
template <typename Scalar>
TruncationResult<Scalar> optimal_truncation(const VectorX<Scalar>& weights,
                                            const MatrixX<Scalar>& values, Scalar c) {
  const Eigen::Index J = values.rows(), L = values.cols();
  if (weights.size() != J) throw Error("optimal_truncation: weight/value shape mismatch");
  if ((weights.array() <= Scalar(0)).any())
    throw Error("optimal_truncation: weights must be positive");
  if ((values.array() < Scalar(0)).any())
    throw Error("optimal_truncation: values must be non-negative");
  if (!(c >= Scalar(1))) throw Error("optimal_truncation: c must be >= 1");
  if ((values.array() == Scalar(0)).all())
    throw AllZeroValuesError("optimal_truncation: all values are zero");

  if (std::isinf(c)) {
    Scalar mpos = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index j = 0; j < J; ++j)
      for (Eigen::Index l = 0; l < L; ++l)
        if (values(j, l) > 0) mpos = std::min(mpos, values(j, l));
    return {values, mpos};
  }

  // breakpoints of the piecewise-smooth objective
  std::vector<Scalar> edges;
  edges.reserve(static_cast<std::size_t>(2 * J * L));
  for (Eigen::Index j = 0; j < J; ++j)
    for (Eigen::Index l = 0; l < L; ++l)
      if (values(j, l) > 0) {
        edges.push_back(values(j, l));
        edges.push_back(values(j, l) / c);
      }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Scalar> candidates(edges);
  auto stationary = [&](Scalar lo, Scalar hi, Scalar probe) {
    Scalar A = 0, B = 0;
    for (Eigen::Index j = 0; j < J; ++j)
      for (Eigen::Index l = 0; l < L; ++l) {
        const Scalar v = values(j, l);
        if (v < probe) {
          A += weights[j];
          B += weights[j] * v;
        } else if (v > c * probe) {
          A += weights[j];
          B += weights[j] * v / c;
        }
      }
    if (A > 0) {
      const Scalar m = std::clamp(B / A, lo, hi);
      if (m > 0 && std::isfinite(m)) candidates.push_back(m);
    }
  };
  for (std::size_t e = 0; e + 1 < edges.size(); ++e)
    stationary(edges[e], edges[e + 1], (edges[e] + edges[e + 1]) / 2);
  stationary(Scalar(0), edges.front(), edges.front() / 2);
  stationary(edges.back(), std::numeric_limits<Scalar>::max(), edges.back() * 2);

  std::sort(candidates.begin(), candidates.end());
  Scalar best_m = 0, best_f = std::numeric_limits<Scalar>::infinity();
  for (Scalar m : candidates) {
    if (m <= 0) continue;
    const Scalar f = detail::ot_objective(weights, values, m, c);
    if (f < best_f) {
      best_f = f;
      best_m = m;
    }
  }
  MatrixX<Scalar> out(J, L);
  for (Eigen::Index j = 0; j < J; ++j)
    for (Eigen::Index l = 0; l < L; ++l) out(j, l) = truncate(values(j, l), best_m, c);
  return {std::move(out), best_m};
}

/// Shape constraint: truncate at the optimal threshold, then rescale to
/// product 1. The output satisfies max/min <= c_sh.
template <typename Scalar>
VectorX<Scalar> constrained_shape(const VectorX<Scalar>& raw, Scalar c_sh) {
  VectorX<Scalar> vals = raw;
  if (std::isinf(c_sh)) {
    if ((vals.array() <= Scalar(0)).any())
      throw SingularMatrixError(
          "constrained_shape: non-positive entry with constraints disabled");
  } else {
    VectorX<Scalar> w(1);
    w[0] = 1;
    MatrixX<Scalar> row = vals.transpose();
    vals = optimal_truncation<Scalar>(w, row, c_sh).truncated.row(0).transpose();
  }
  const Scalar logmean = vals.array().log().mean();
  return vals / std::exp(logmean);
}

/// Size constraint across groups: OT with one value per group; the output
/// ratio max/min is at most c_vol.
template <typename Scalar>
VectorX<Scalar> constrained_sizes(const VectorX<Scalar>& n,
                                  const VectorX<Scalar>& gamma_opt, Scalar c_vol) {
  if (n.size() != gamma_opt.size())
    throw Error("constrained_sizes: length mismatch");
  if (std::isinf(c_vol)) {
    if ((gamma_opt.array() <= Scalar(0)).any())
      throw SingularMatrixError(
          "constrained_sizes: non-positive size with constraints disabled");
    return gamma_opt;
  }
  MatrixX<Scalar> col = gamma_opt;
  return optimal_truncation<Scalar>(n, col, c_vol).truncated.col(0);
}

}  // namespace covclust
