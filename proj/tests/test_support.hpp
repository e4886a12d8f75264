#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Test-only helpers. Random draws go through std::normal_distribution, not the
// library's own Gaussian source, so oracles stay independent of it.
namespace noisevar::testing {

inline std::vector<double> gaussian(std::size_t n, double stddev, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

// Order statistic by full sort.
inline double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean_of(const std::vector<double>& v, std::size_t from = 0) {
  double s = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) s += v[i];
  return s / static_cast<double>(v.size() - from);
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Innovations of y under x_hat[k] = x_hat[k-1] + K (y[k] - x_hat[k-1]), x_hat[0] = y[0].
// Index 0 holds the zero initial residual.
inline std::vector<double> reference_innovations(const std::vector<double>& y, double K) {
  std::vector<double> eta(y.size(), 0.0);
  double xh = y[0];
  for (std::size_t k = 1; k < y.size(); ++k) {
    eta[k] = y[k] - xh;
    xh += K * eta[k];
  }
  return eta;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace noisevar::testing
