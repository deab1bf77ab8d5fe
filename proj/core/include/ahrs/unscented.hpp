#pragma once

// Additive-noise unscented transform machinery, generic over state/observation size.
// The attitude filter in ukf.hpp is built on these primitives; tests drive them directly
// with linear maps to compare against a reference Kalman filter.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace ahrs {

struct UkfParams {
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda(int dim) const { return alpha * alpha * (dim + kappa) - dim; }
  double gamma(int dim) const { return std::sqrt(dim + lambda(dim)); }
};

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Covariance could not be factorized even after the PSD repair.
class CholeskyFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <int N>
struct SigmaWeights {
  Eigen::Matrix<double, 2 * N + 1, 1> mean;
  Eigen::Matrix<double, 2 * N + 1, 1> cov;
};

template <int N>
SigmaWeights<N> make_weights(const UkfParams& p) {
  const double lambda = p.lambda(N);
  const double spread = N + lambda;
  if (!(spread > 0.0) || !(p.alpha > 0.0) || p.alpha > 1.0) {
    throw InvalidParams("UKF parameters require L + lambda > 0 and alpha in (0, 1]");
  }
  SigmaWeights<N> w;
  w.mean.setConstant(1.0 / (2.0 * spread));
  w.cov.setConstant(1.0 / (2.0 * spread));
  w.mean[0] = lambda / spread;
  w.cov[0] = lambda / spread + (1.0 - p.alpha * p.alpha + p.beta);
  return w;
}

template <int N>
using SigmaMatrix = Eigen::Matrix<double, N, 2 * N + 1>;

/// Result of a sigma-point draw; `repaired` is set when the covariance needed jitter.
template <int N>
struct SigmaPoints {
  SigmaMatrix<N> points;
  bool repaired = false;
};

/// Lower Cholesky factor of P. On failure adds 1e-12 * trace(P) / N to the diagonal,
/// symmetrizes and retries once; throws CholeskyFailure if that fails too.
template <int N>
Eigen::Matrix<double, N, N> covariance_sqrt(const Eigen::Matrix<double, N, N>& P, bool* repaired) {
  using Mat = Eigen::Matrix<double, N, N>;
  if (P.isZero(0.0)) return Mat::Zero();
  Eigen::LLT<Mat> llt(P);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double jitter = 1e-12 * P.trace() / N;
  const Mat fixed = 0.5 * (P + P.transpose()) + Mat::Identity() * std::max(jitter, 0.0);
  llt.compute(fixed);
  if (llt.info() != Eigen::Success) {
    throw CholeskyFailure("covariance is not positive semi-definite after repair");
  }
  if (repaired) *repaired = true;
  return llt.matrixL();
}

template <int N>
SigmaPoints<N> draw_sigma_points(const Eigen::Matrix<double, N, 1>& x,
                                 const Eigen::Matrix<double, N, N>& P, double gamma) {
  SigmaPoints<N> out;
  const Eigen::Matrix<double, N, N> s = covariance_sqrt<N>(P, &out.repaired);
  out.points.col(0) = x;
  for (int i = 0; i < N; ++i) {
    out.points.col(1 + i) = x + gamma * s.col(i);
    out.points.col(1 + N + i) = x - gamma * s.col(i);
  }
  return out;
}

/// Weighted mean, accumulated as offsets from the central point. Algebraically equal to
/// sum(W_i * Y_i) because the mean weights sum to one, but it avoids cancelling the
/// large opposite-signed weights produced by small alpha.
template <int M, int Cols>
Eigen::Matrix<double, M, 1> weighted_mean(const Eigen::Matrix<double, M, Cols>& points,
                                          const Eigen::Matrix<double, Cols, 1>& weights) {
  Eigen::Matrix<double, M, 1> mean = points.col(0);
  for (int i = 1; i < Cols; ++i) mean += weights[i] * (points.col(i) - points.col(0));
  return mean;
}

template <int M, int K, int Cols>
Eigen::Matrix<double, M, K> weighted_cross_covariance(
    const Eigen::Matrix<double, M, Cols>& a, const Eigen::Matrix<double, M, 1>& a_mean,
    const Eigen::Matrix<double, K, Cols>& b, const Eigen::Matrix<double, K, 1>& b_mean,
    const Eigen::Matrix<double, Cols, 1>& weights) {
  Eigen::Matrix<double, M, K> out = Eigen::Matrix<double, M, K>::Zero();
  for (int i = 0; i < Cols; ++i) {
    out += weights[i] * (a.col(i) - a_mean) * (b.col(i) - b_mean).transpose();
  }
  return out;
}

template <int N>
Eigen::Matrix<double, N, N> symmetrized(const Eigen::Matrix<double, N, N>& P) {
  return 0.5 * (P + P.transpose());
}

template <int N>
struct GaussianEstimate {
  Eigen::Matrix<double, N, 1> x;
  Eigen::Matrix<double, N, N> P;
};

/// A-priori estimate through the process map `f` (N-vector -> N-vector) plus additive Q.
template <int N, typename Process>
GaussianEstimate<N> unscented_predict(const GaussianEstimate<N>& prior, Process&& f,
                                      const UkfParams& params, const Eigen::Matrix<double, N, N>& Q,
                                      bool* repaired = nullptr) {
  const SigmaWeights<N> w = make_weights<N>(params);
  const SigmaPoints<N> sigma = draw_sigma_points<N>(prior.x, prior.P, params.gamma(N));
  if (repaired) *repaired = sigma.repaired;

  SigmaMatrix<N> propagated;
  for (int i = 0; i < 2 * N + 1; ++i) propagated.col(i) = f(sigma.points.col(i));

  GaussianEstimate<N> out;
  out.x = weighted_mean<N, 2 * N + 1>(propagated, w.mean);
  out.P = weighted_cross_covariance<N, N, 2 * N + 1>(propagated, out.x, propagated, out.x, w.cov) + Q;
  out.P = symmetrized<N>(out.P);
  return out;
}

enum class UpdateStatus { Applied, SingularInnovation };

template <int N>
struct UpdateResult {
  GaussianEstimate<N> estimate;
  UpdateStatus status = UpdateStatus::Applied;
  bool repaired = false;
};

inline constexpr double kMaxInnovationCondition = 1e12;

/// Checks that the innovation covariance is safely invertible.
template <int M>
bool innovation_invertible(const Eigen::Matrix<double, M, M>& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, M, M>> eig(S, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  return lo > 0.0 && hi / lo <= kMaxInnovationCondition;
}

/// Correction with redrawn sigma points and observation map `h` (N-vector -> M-vector).
template <int N, int M, typename Observation>
UpdateResult<N> unscented_update(const GaussianEstimate<N>& prior,
                                 const Eigen::Matrix<double, M, 1>& y, Observation&& h,
                                 const UkfParams& params, const Eigen::Matrix<double, M, M>& R) {
  constexpr int kCols = 2 * N + 1;
  const SigmaWeights<N> w = make_weights<N>(params);
  const SigmaPoints<N> sigma = draw_sigma_points<N>(prior.x, prior.P, params.gamma(N));

  Eigen::Matrix<double, M, kCols> predicted;
  for (int i = 0; i < kCols; ++i) predicted.col(i) = h(sigma.points.col(i));

  const Eigen::Matrix<double, M, 1> y_mean = weighted_mean<M, kCols>(predicted, w.mean);
  // Deviations are taken about the prior mean, which the redrawn centre point equals.
  const Eigen::Matrix<double, M, M> Pyy =
      symmetrized<M>(weighted_cross_covariance<M, M, kCols>(predicted, y_mean, predicted, y_mean, w.cov) + R);
  const Eigen::Matrix<double, N, M> Pxy =
      weighted_cross_covariance<N, M, kCols>(sigma.points, prior.x, predicted, y_mean, w.cov);

  UpdateResult<N> out;
  out.repaired = sigma.repaired;
  if (!innovation_invertible<M>(Pyy)) {
    out.estimate = prior;
    out.status = UpdateStatus::SingularInnovation;
    return out;
  }
  const Eigen::Matrix<double, N, M> K = Pyy.ldlt().solve(Pxy.transpose()).transpose();
  out.estimate.x = prior.x + K * (y - y_mean);
  out.estimate.P = symmetrized<N>(prior.P - K * Pyy * K.transpose());
  return out;
}

}  // namespace ahrs
