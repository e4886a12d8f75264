#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "noisevar/errors.hpp"
#include "noisevar/estimator.hpp"
#include "noisevar/steady_state.hpp"

// Scalar correlation-method baselines: fit (Q, R) of the random-walk model to
// sample innovation autocovariances at lags 0..L by ordinary least squares.
// Both parameterizations span the same column space, so on any input they
// produce the same (Q, R); they differ only in which pair is solved for.
namespace noisevar {

inline constexpr std::size_t kDefaultMaxLag = 4;

struct LagCovariances {
  std::vector<double> c;  // c[j], j = 0..max_lag
  std::size_t max_lag = 0;
  std::size_t n = 0;  // innovations used
};

struct BaselineEstimate {
  double q_hat = 0.0;
  double r_hat = 0.0;
  bool q_clipped = false;
  bool r_clipped = false;
  double residual = 0.0;  // Euclidean norm of the least-squares residual
};

enum class BaselineMethod { Mehra, Als };

inline const char* to_string(BaselineMethod method) {
  return method == BaselineMethod::Mehra ? "mehra" : "als";
}

// Biased (1/n) sample autocovariances about the window mean.
inline LagCovariances innovation_autocovariance(std::span<const double> eta, std::size_t max_lag) {
  if (max_lag < 1) throw ContractError("max lag must be at least 1");
  if (eta.size() < max_lag + 2)
    throw ContractError("need at least " + std::to_string(max_lag + 2) +
                        " innovations for lags up to " + std::to_string(max_lag));
  const std::size_t n = eta.size();
  double mean = 0.0;
  for (double e : eta) mean += e;
  mean /= static_cast<double>(n);

  LagCovariances out;
  out.max_lag = max_lag;
  out.n = n;
  out.c.assign(max_lag + 1, 0.0);
  for (std::size_t j = 0; j <= max_lag; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i + j < n; ++i) acc += (eta[i] - mean) * (eta[i + j] - mean);
    out.c[j] = acc / static_cast<double>(n);
  }
  return out;
}

// Model autocovariance of the innovation at lag j for steady-state
// prediction-error variance M and noise variance R.
inline double theoretical_lag_model(double K, double M, double R, int j) {
  if (M < 0.0 || R < 0.0) throw ContractError("M and R must be non-negative");
  return steady_state::lag_autocovariance(K, M, R, j);
}

namespace detail {

struct TwoColumnSolution {
  double x0 = 0.0;
  double x1 = 0.0;
  double residual = 0.0;
};

// min || [a0 a1] x - b ||_2 by modified Gram-Schmidt.
inline TwoColumnSolution least_squares_2(std::span<const double> a0, std::span<const double> a1,
                                         std::span<const double> b) {
  const std::size_t rows = b.size();
  auto dot = [rows](std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += u[i] * v[i];
    return s;
  };
  const double r00 = std::sqrt(dot(a0, a0));
  const double a1_norm = std::sqrt(dot(a1, a1));
  if (r00 == 0.0 || a1_norm == 0.0) throw FitError("least-squares design has a zero column");

  std::vector<double> q0(rows), q1(rows);
  for (std::size_t i = 0; i < rows; ++i) q0[i] = a0[i] / r00;
  const double r01 = dot(q0, a1);
  for (std::size_t i = 0; i < rows; ++i) q1[i] = a1[i] - r01 * q0[i];
  const double r11 = std::sqrt(dot(q1, q1));
  if (r11 <= 1e-12 * a1_norm) throw FitError("least-squares normal equations are singular");
  for (double& v : q1) v /= r11;

  TwoColumnSolution s;
  s.x1 = dot(q1, b) / r11;
  s.x0 = (dot(q0, b) - r01 * s.x1) / r00;
  double rr = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double e = b[i] - a0[i] * s.x0 - a1[i] * s.x1;
    rr += e * e;
  }
  s.residual = std::sqrt(rr);
  return s;
}

inline void clip(BaselineEstimate& est) {
  if (est.q_hat < 0.0) {
    est.q_hat = 0.0;
    est.q_clipped = true;
  }
  if (est.r_hat < 0.0) {
    est.r_hat = 0.0;
    est.r_clipped = true;
  }
}

}  // namespace detail

// Unknowns (M, R): c0 = M + R, cj = (1-K)^(j-1) ((1-K) M - K R).
// Q follows from the steady-state relation Q = M (2K - K^2) - K^2 R.
inline BaselineEstimate fit_mehra(const LagCovariances& lags, double K) {
  steady_state::require_gain(K);
  if (lags.max_lag < 1 || lags.c.size() != lags.max_lag + 1)
    throw ContractError("lag covariances must cover lags 0..L with L >= 1");
  const std::size_t rows = lags.c.size();
  std::vector<double> col_m(rows), col_r(rows);
  for (std::size_t j = 0; j < rows; ++j) {
    const int lag = static_cast<int>(j);
    col_m[j] = steady_state::lag_autocovariance(K, 1.0, 0.0, lag);
    col_r[j] = steady_state::lag_autocovariance(K, 0.0, 1.0, lag);
  }
  const auto sol = detail::least_squares_2(col_m, col_r, lags.c);

  BaselineEstimate est;
  est.r_hat = sol.x1;
  est.q_hat = steady_state::process_variance(sol.x0, sol.x1, K);
  est.residual = sol.residual;
  detail::clip(est);
  return est;
}

// Unknowns (Q, R) directly, with M eliminated through M = (K^2 R + Q) / (2K - K^2).
inline BaselineEstimate fit_als(const LagCovariances& lags, double K) {
  steady_state::require_gain(K);
  if (lags.max_lag < 1 || lags.c.size() != lags.max_lag + 1)
    throw ContractError("lag covariances must cover lags 0..L with L >= 1");
  const std::size_t rows = lags.c.size();
  const double m_per_q = steady_state::error_variance(K, 1.0, 0.0);
  const double m_per_r = steady_state::error_variance(K, 0.0, 1.0);
  std::vector<double> col_q(rows), col_r(rows);
  for (std::size_t j = 0; j < rows; ++j) {
    const int lag = static_cast<int>(j);
    col_q[j] = steady_state::lag_autocovariance(K, m_per_q, 0.0, lag);
    col_r[j] = steady_state::lag_autocovariance(K, m_per_r, 1.0, lag);
  }
  const auto sol = detail::least_squares_2(col_q, col_r, lags.c);

  BaselineEstimate est;
  est.q_hat = sol.x0;
  est.r_hat = sol.x1;
  est.residual = sol.residual;
  detail::clip(est);
  return est;
}

inline BaselineEstimate fit_baseline(const LagCovariances& lags, double K, BaselineMethod method) {
  return method == BaselineMethod::Mehra ? fit_mehra(lags, K) : fit_als(lags, K);
}

// Same predictor and window as run_algorithm1; each step refits the lag model
// over the current window. Steps whose window is too short for the lag count,
// or whose fit fails, are emitted with fit_failed set and zero estimates.
inline std::vector<EstimateRecord> run_baseline(std::span<const double> stream,
                                                const EstimatorConfig& config,
                                                BaselineMethod method,
                                                std::size_t max_lag = kDefaultMaxLag) {
  config.validate();
  if (stream.empty()) throw ContractError("measurement stream is empty");
  if (max_lag < 1) throw ContractError("max lag must be at least 1");

  EstimatorState state(config);
  std::vector<double> window;
  std::vector<EstimateRecord> out;
  out.reserve(stream.size() - 1);
  for (double y : stream) {
    const auto eta = filter_step(state, config, y);
    if (!eta) continue;

    EstimateRecord rec;
    rec.k = state.samples() - 1;
    rec.y = y;
    rec.eta = *eta;
    rec.warmup = rec.k < config.window;
    rec.q_hat = 0.0;

    state.window().copy_to(window);
    if (window.size() < max_lag + 2) {
      rec.fit_failed = true;
      out.push_back(rec);
      continue;
    }
    const auto lags = innovation_autocovariance(window, max_lag);
    rec.c_hat = lags.c[0];
    try {
      const auto est = fit_baseline(lags, config.gain, method);
      rec.r_hat = est.r_hat;
      rec.q_hat = est.q_hat;
      rec.q_clipped = est.q_clipped;
      rec.r_clipped = est.r_clipped;
    } catch (const FitError&) {
      rec.fit_failed = true;
    }
    out.push_back(rec);
  }
  return out;
}

}  // namespace noisevar
