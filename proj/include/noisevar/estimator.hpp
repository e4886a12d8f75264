#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisevar/errors.hpp"
#include "noisevar/ring_window.hpp"
#include "noisevar/robust_stats.hpp"

/**
 * @file
 * Streaming measurement-noise variance estimation from the innovations of a
 * constant-gain predictor.
 *
 * The predictor tracks y[k] = x[k] + v[k] with
 *
 *     x_pred[k] = x_hat[k-1]
 *     eta[k]    = y[k] - x_pred[k]
 *     x_hat[k]  = x_pred[k] + K eta[k]
 *
 * and the innovation variance C over a moving window of the last m+1
 * innovations gives the noise variance estimate R_hat = C_hat (1 - K/2).
 * C_hat is either a plain sample variance or a squared, scaled median
 * absolute deviation; the latter is insensitive to isolated outliers and
 * abrupt signal changes.
 */
namespace noisevar {

enum class Variability {
  Mean,  ///< sum of squared deviations over the window, divided by min(k, m)
  Mad,   ///< (a * MAD)^2 over the window
};

struct EstimatorConfig {
  double gain = 0.9902;             ///< K, must lie in (0, 1)
  std::size_t window = 100;         ///< m; the window holds m+1 innovations
  double mad_scale = kGaussianMadScale;  ///< a, used by Variability::Mad
  Variability variability = Variability::Mad;

  void validate() const {
    if (!(gain > 0.0 && gain < 1.0)) throw ContractError("gain K must lie in (0, 1)");
    if (window < 1) throw ContractError("window length m must be at least 1");
    if (!(mad_scale > 0.0) || !std::isfinite(mad_scale))
      throw ContractError("MAD scale a must be positive and finite");
  }
};

/// One output row of the estimator. Baseline runs fill q_hat and the fit flags.
struct EstimateRecord {
  std::size_t k = 0;
  double y = 0.0;
  double eta = 0.0;
  double c_hat = 0.0;
  double r_hat = 0.0;
  std::optional<double> q_hat;
  bool warmup = false;  ///< k < m: the window is only partially filled
  bool q_clipped = false;
  bool r_clipped = false;
  bool fit_failed = false;
};

/// Resumable filter state. Copyable; a copy continues independently.
class EstimatorState {
 public:
  explicit EstimatorState(const EstimatorConfig& config) : window_(config.window + 1) {}

  double x_hat() const noexcept { return x_hat_; }

  /// Number of samples consumed. The last consumed sample has index samples()-1.
  std::size_t samples() const noexcept { return samples_; }

  /// Innovations eta[max(0, k-m)] .. eta[k], oldest first, after step k.
  /// eta[0] is the initial residual y[0] - x_hat[0], which is zero.
  const RingWindow<double>& window() const noexcept { return window_; }

 private:
  friend std::optional<double> filter_step(EstimatorState&, const EstimatorConfig&, double);

  double x_hat_ = 0.0;
  std::size_t samples_ = 0;
  RingWindow<double> window_;
};

/// Consume one measurement. Returns the innovation for k >= 1 and nothing for
/// the initializing sample k = 0. Throws InputError on NaN or infinity and
/// leaves the state untouched.
inline std::optional<double> filter_step(EstimatorState& state, const EstimatorConfig& config,
                                         double y) {
  if (!std::isfinite(y)) {
    throw InputError(state.samples_, "non-finite measurement at index " +
                                         std::to_string(state.samples_));
  }
  if (state.window_.capacity() != config.window + 1)
    throw ContractError("state was created for a different window length");

  if (state.samples_ == 0) {
    state.x_hat_ = y;
    state.window_.push(0.0);
    state.samples_ = 1;
    return std::nullopt;
  }
  const double eta = y - state.x_hat_;
  state.x_hat_ += config.gain * eta;
  state.window_.push(eta);
  ++state.samples_;
  return eta;
}

namespace detail {

inline void check_window(std::size_t size, std::size_t k, std::size_t m) {
  if (k < 1) throw ContractError("windowed variance needs k >= 1");
  if (m < 1) throw ContractError("window length m must be at least 1");
  if (size != std::min(k, m) + 1)
    throw ContractError("window must hold min(k, m) + 1 innovations, got " +
                        std::to_string(size));
}

}  // namespace detail

/// Sum of squared deviations from the window mean, divided by min(k, m), i.e.
/// one less than the number of samples in the window.
inline double windowed_variance_mean(std::span<const double> window, std::size_t k,
                                     std::size_t m) {
  detail::check_window(window.size(), k, m);
  double mean = 0.0;
  for (double v : window) mean += v;
  mean /= static_cast<double>(window.size());
  double ss = 0.0;
  for (double v : window) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(std::min(k, m));
}

/// (a * med |eta_i - med eta|)^2 over the window.
inline double windowed_variance_mad(std::span<const double> window, std::size_t k,
                                    std::size_t m, double a, std::vector<double>& scratch) {
  detail::check_window(window.size(), k, m);
  if (!(a > 0.0)) throw ContractError("MAD scale a must be positive");
  const double scale = a * median_absolute_deviation(window, scratch);
  return scale * scale;
}

inline double windowed_variance_mad(std::span<const double> window, std::size_t k,
                                    std::size_t m, double a) {
  std::vector<double> scratch;
  return windowed_variance_mad(window, k, m, a, scratch);
}

/// Noise variance from innovation variance with the process-noise term dropped:
/// R_hat = C_hat (1 - K/2).
inline double estimate_r(double c_hat, double K) {
  if (!(c_hat >= 0.0)) throw ContractError("innovation variance must be non-negative");
  if (!(K > 0.0 && K < 1.0)) throw ContractError("gain K must lie in (0, 1)");
  return c_hat * (1.0 - 0.5 * K);
}

/// Push-style wrapper around filter_step and the windowed estimators.
class NoiseVarianceEstimator {
 public:
  explicit NoiseVarianceEstimator(EstimatorConfig config)
      : config_((config.validate(), config)), state_(config_) {}

  const EstimatorConfig& config() const noexcept { return config_; }
  const EstimatorState& state() const noexcept { return state_; }

  /// Returns a record for every sample after the first.
  std::optional<EstimateRecord> update(double y) {
    const auto eta = filter_step(state_, config_, y);
    if (!eta) return std::nullopt;

    const std::size_t k = state_.samples() - 1;
    state_.window().copy_to(values_);
    const double c_hat =
        config_.variability == Variability::Mean
            ? windowed_variance_mean(values_, k, config_.window)
            : windowed_variance_mad(values_, k, config_.window, config_.mad_scale, scratch_);

    EstimateRecord rec;
    rec.k = k;
    rec.y = y;
    rec.eta = *eta;
    rec.c_hat = c_hat;
    rec.r_hat = estimate_r(c_hat, config_.gain);
    rec.warmup = k < config_.window;
    return rec;
  }

 private:
  EstimatorConfig config_;
  EstimatorState state_;
  std::vector<double> values_;
  std::vector<double> scratch_;
};

/// Run the estimator over a whole stream: one record per k >= 1.
inline std::vector<EstimateRecord> run_algorithm1(std::span<const double> stream,
                                                  const EstimatorConfig& config) {
  if (stream.empty()) throw ContractError("measurement stream is empty");
  NoiseVarianceEstimator estimator(config);
  std::vector<EstimateRecord> out;
  out.reserve(stream.size() - 1);
  for (double y : stream) {
    if (auto rec = estimator.update(y)) out.push_back(*rec);
  }
  return out;
}

}  // namespace noisevar
