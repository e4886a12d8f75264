#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "noisevar/errors.hpp"
#include "noisevar/estimator.hpp"

/**
 * @file
 * Error analysis of the mean-based estimator, in executable form.
 *
 * With x_hat[0] = y[0] the innovation splits exactly into a noise-driven and
 * a signal-driven part,
 *
 *     eta[k]   = eta1[k] + eta2[k]
 *     eta1[k]  = sum_{i=1..k} (1-K)^(i-1) dv[k-i],   dv[k] = v[k+1] - v[k]
 *     eta2[k]  = sum_{i=1..k} (1-K)^(i-1) w[k-i],    w[k]  = x[k+1] - x[k]
 *
 * so the windowed sample variance decomposes as C_hat = S11 + S22 + 2 S12.
 * S11 tends to 2R/(2-K); the signal term S22 is what biases R_hat upward,
 * by roughly (2-K)/2 times the windowed variance of w.
 *
 * Nothing here applies to the MAD estimator.
 */
namespace noisevar::analysis {

/// Innovation at step k >= 1 from the closed form
///   (1-K)^(k-1) x0_residual + sum (1-K)^(i-1) (w[k-i] + dv[k-i]).
/// w and dv must cover indices 0..k-1.
inline double innovation_closed_form(std::span<const double> w, std::span<const double> dv,
                                     double K, double x0_residual, std::size_t k) {
  if (!(K > 0.0 && K < 1.0)) throw ContractError("gain K must lie in (0, 1)");
  if (k < 1) throw ContractError("closed form is defined for k >= 1");
  if (w.size() < k || dv.size() < k)
    throw ContractError("w and dv must cover indices 0.." + std::to_string(k - 1));
  const double decay = 1.0 - K;
  double acc = 0.0;
  double weight = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    acc += weight * (w[k - i] + dv[k - i]);
    weight *= decay;
  }
  return acc + std::pow(decay, static_cast<double>(k - 1)) * x0_residual;
}

/// eta1 and eta2 for k = 0..n by the recursion e[k+1] = (1-K) e[k] + d[k], e[0] = 0.
/// Equivalent to the closed-form sums, O(n) instead of O(n^2).
inline std::pair<std::vector<double>, std::vector<double>> innovation_components(
    std::span<const double> w, std::span<const double> dv, double K) {
  if (!(K > 0.0 && K < 1.0)) throw ContractError("gain K must lie in (0, 1)");
  if (w.size() != dv.size()) throw ContractError("w and dv must have equal length");
  const std::size_t n = w.size();
  std::vector<double> eta1(n + 1, 0.0), eta2(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    eta1[k + 1] = (1.0 - K) * eta1[k] + dv[k];
    eta2[k + 1] = (1.0 - K) * eta2[k] + w[k];
  }
  return {std::move(eta1), std::move(eta2)};
}

/// eta1[k] written directly in the noise samples:
///   v[k] - K sum_{i=1..k-1} (1-K)^(k-1-i) v[i] - (1-K)^(k-1) v[0].
inline double eta1_from_noise(std::span<const double> v, double K, std::size_t k) {
  if (!(K > 0.0 && K < 1.0)) throw ContractError("gain K must lie in (0, 1)");
  if (k < 1 || v.size() <= k) throw ContractError("v must cover indices 0..k with k >= 1");
  double acc = v[k] - std::pow(1.0 - K, static_cast<double>(k - 1)) * v[0];
  double weight = 1.0;
  for (std::size_t i = k - 1; i >= 1; --i) {
    acc -= K * weight * v[i];
    weight *= 1.0 - K;
  }
  return acc;
}

/// Limit of Var(eta1[k]) as k grows: 2R/(2-K).
inline double eta1_variance_limit(double K, double R) {
  if (!(K > 0.0 && K < 1.0)) throw ContractError("gain K must lie in (0, 1)");
  if (R < 0.0) throw ContractError("R must be non-negative");
  return 2.0 * R / (2.0 - K);
}

struct InnovationDecomposition {
  std::vector<double> eta1;  // window slice, oldest first
  std::vector<double> eta2;
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;

  double total() const noexcept { return s11 + s22 + 2.0 * s12; }
};

/// Windowed second moments of eta1, eta2 and their cross term over
/// [k - min(k, m), k], with the same normalization as windowed_variance_mean.
/// Both sequences are indexed by absolute step and must cover the window.
inline InnovationDecomposition decompose(std::span<const double> eta1,
                                         std::span<const double> eta2, std::size_t k,
                                         std::size_t m) {
  if (k < 1 || m < 1) throw ContractError("decompose needs k >= 1 and m >= 1");
  if (eta1.size() <= k || eta2.size() <= k)
    throw ContractError("eta sequences must cover the window ending at k");
  const std::size_t span_len = std::min(k, m);
  const std::size_t first = k - span_len;
  const std::size_t count = span_len + 1;

  InnovationDecomposition d;
  d.eta1.assign(eta1.begin() + static_cast<std::ptrdiff_t>(first),
                eta1.begin() + static_cast<std::ptrdiff_t>(k + 1));
  d.eta2.assign(eta2.begin() + static_cast<std::ptrdiff_t>(first),
                eta2.begin() + static_cast<std::ptrdiff_t>(k + 1));

  double mean1 = 0.0, mean2 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    mean1 += d.eta1[i];
    mean2 += d.eta2[i];
  }
  mean1 /= static_cast<double>(count);
  mean2 /= static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double a = d.eta1[i] - mean1;
    const double b = d.eta2[i] - mean2;
    d.s11 += a * a;
    d.s22 += b * b;
    d.s12 += a * b;
  }
  const double denom = static_cast<double>(span_len);
  d.s11 /= denom;
  d.s22 /= denom;
  d.s12 /= denom;
  return d;
}

/// Approximate bias of R_hat from signal variation:
///   (2-K)/(2m) sum (w_i - mean w)^2
/// over the m+1 increments w[k-m-1] .. w[k-1].
inline double predicted_bias(std::span<const double> w_window, double K, std::size_t m) {
  if (!(K > 0.0 && K < 1.0)) throw ContractError("gain K must lie in (0, 1)");
  if (m < 1 || w_window.size() != m + 1)
    throw ContractError("predicted_bias needs exactly m + 1 increments");
  double mean = 0.0;
  for (double v : w_window) mean += v;
  mean /= static_cast<double>(w_window.size());
  double ss = 0.0;
  for (double v : w_window) ss += (v - mean) * (v - mean);
  return (2.0 - K) / (2.0 * static_cast<double>(m)) * ss;
}

struct DiagnosticRow {
  std::size_t k = 0;
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;
  double c_hat = 0.0;
  double predicted_bias = 0.0;
  double realized_err = 0.0;
};

/// Per-step decomposition for a run where the true signal is known.
///
/// Rows start at k = m + 1, the first step whose bias window w[k-m-1..k-1]
/// exists. c_hat is the mean-based innovation variance of the actual filter
/// run on y. realized_err = (1 - K/2) c_hat - R, where R is r_true[k] when
/// given and otherwise the windowed sample variance of v = y - x.
inline std::vector<DiagnosticRow> diagnose(std::span<const double> x, std::span<const double> y,
                                           std::optional<std::span<const double>> r_true,
                                           double K, std::size_t m) {
  if (x.size() != y.size()) throw ContractError("x and y must have equal length");
  if (r_true && r_true->size() != y.size())
    throw ContractError("r_true must have the same length as y");
  EstimatorConfig config;
  config.gain = K;
  config.window = m;
  config.variability = Variability::Mean;
  config.validate();

  const std::size_t n = y.size();
  if (n < 2) return {};
  std::vector<double> v(n), w(n - 1), dv(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = y[i] - x[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w[i] = x[i + 1] - x[i];
    dv[i] = v[i + 1] - v[i];
  }
  const auto [eta1, eta2] = innovation_components(w, dv, K);

  std::vector<DiagnosticRow> rows;
  EstimatorState state(config);
  std::vector<double> window;
  for (std::size_t k = 0; k < n; ++k) {
    filter_step(state, config, y[k]);
    if (k < m + 1) continue;

    state.window().copy_to(window);
    DiagnosticRow row;
    row.k = k;
    row.c_hat = windowed_variance_mean(window, k, m);
    const auto d = decompose(eta1, eta2, k, m);
    row.s11 = d.s11;
    row.s22 = d.s22;
    row.s12 = d.s12;
    row.predicted_bias = predicted_bias(
        std::span<const double>(w).subspan(k - m - 1, m + 1), K, m);
    const double r =
        r_true ? (*r_true)[k]
               : windowed_variance_mean(std::span<const double>(v).subspan(k - m, m + 1), k, m);
    row.realized_err = estimate_r(row.c_hat, K) - r;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace noisevar::analysis
