#pragma once

#include <cmath>

#include "noisevar/errors.hpp"

// Closed-form steady state of the scalar random-walk model
//   x[k+1] = x[k] + w[k],  y[k] = x[k] + v[k],  Var w = Q,  Var v = R
// tracked by the constant-gain predictor x_hat[k] = x_hat[k-1] + K (y[k] - x_hat[k-1]).
namespace noisevar::steady_state {

inline void require_gain(double K) {
  if (!(K > 0.0 && K < 1.0)) throw ContractError("gain K must lie in (0, 1)");
}

// Prediction-error variance M, the fixed point of
// M = M - 2KM + K^2 (M + R) + Q.
inline double error_variance(double K, double Q, double R) {
  require_gain(K);
  return (K * K * R + Q) / (2.0 * K - K * K);
}

// Innovation variance C = M + R.
inline double innovation_variance(double K, double Q, double R) {
  return error_variance(K, Q, R) + R;
}

// Inverse of innovation_variance in R: R = (C (2K - K^2) - Q) / (2K).
inline double noise_variance(double C, double K, double Q) {
  require_gain(K);
  return (C * (2.0 * K - K * K) - Q) / (2.0 * K);
}

// Process-noise variance consistent with a given (M, R) pair.
inline double process_variance(double M, double R, double K) {
  require_gain(K);
  return M * (2.0 * K - K * K) - K * K * R;
}

// Lag-j innovation autocovariance:
//   C_0 = M + R,  C_j = (1-K)^(j-1) ((1-K) M - K R)  for j >= 1.
inline double lag_autocovariance(double K, double M, double R, int j) {
  require_gain(K);
  if (j < 0) throw ContractError("lag must be non-negative");
  if (j == 0) return M + R;
  return std::pow(1.0 - K, j - 1) * ((1.0 - K) * M - K * R);
}

}  // namespace noisevar::steady_state
