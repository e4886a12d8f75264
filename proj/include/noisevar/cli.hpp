#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "noisevar/analysis.hpp"
#include "noisevar/baselines.hpp"
#include "noisevar/csv.hpp"
#include "noisevar/errors.hpp"
#include "noisevar/estimator.hpp"
#include "noisevar/signal_gen.hpp"
#include "noisevar/svg_plot.hpp"

// Command implementations behind the `noisevar` tool. Each command formats
// values computed by the library modules; none of them does estimator math.
namespace noisevar::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

enum class EstimatorChoice { Alg1Mad, Alg1Mean, Mehra, Als, All };

struct RunConfig {
  std::optional<std::string> input;     // CSV with a `y` column
  std::optional<std::string> scenario;  // scenario file, generated on the fly
  std::optional<std::uint64_t> seed;    // overrides the scenario seed
  EstimatorChoice estimator = EstimatorChoice::Alg1Mad;
  double gain = 0.9902;
  std::size_t window = 100;
  double mad_scale = kGaussianMadScale;
  std::size_t lags = kDefaultMaxLag;
  std::optional<std::string> output;  // stdout when absent
  std::optional<std::string> plot;

  EstimatorConfig estimator_config(Variability variability = Variability::Mad) const {
    EstimatorConfig c;
    c.gain = gain;
    c.window = window;
    c.mad_scale = mad_scale;
    c.variability = variability;
    return c;
  }
};

// Thrown for bad flag combinations; maps to kUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Series {
  std::vector<double> t;  // sample times, or sample indices when unknown
  bool t_is_time = false;
  std::vector<double> y;
  std::optional<std::vector<double>> x;
  std::optional<std::vector<double>> r_true;
};

namespace detail {

inline Series from_scenario(const Scenario& s) {
  return Series{s.t, true, s.y, s.x, s.r_true};
}

inline Series load_series(const RunConfig& run) {
  if (run.input && run.scenario) throw UsageError("give either --input or --scenario, not both");
  if (run.scenario) {
    auto spec = load_scenario(*run.scenario);
    if (run.seed) spec.seed = *run.seed;
    return from_scenario(generate(spec));
  }
  if (!run.input) throw UsageError("an --input CSV or a --scenario file is required");

  std::ifstream in(*run.input);
  if (!in) throw DataError(0, "cannot open input '" + *run.input + "'");
  const auto table = csv::read(in);
  const auto y = table.column("y");
  if (!y) throw DataError(1, "input has no 'y' column");
  Series s;
  s.y.assign(y->begin(), y->end());
  if (const auto t = table.column("t")) {
    s.t.assign(t->begin(), t->end());
    s.t_is_time = true;
  } else {
    for (std::size_t i = 0; i < s.y.size(); ++i) s.t.push_back(static_cast<double>(i));
  }
  if (const auto x = table.column("x")) s.x.emplace(x->begin(), x->end());
  if (const auto r = table.column("r_true")) s.r_true.emplace(r->begin(), r->end());
  if (s.y.empty()) throw DataError(2, "input has no data rows");
  return s;
}

// Everything is rendered in memory first, so a failing command never leaves a
// partial file. The file is replaced through a rename.
inline void emit(const std::optional<std::string>& path, const std::string& content,
                 std::ostream& out) {
  if (!path || *path == "-") {
    out << content;
    return;
  }
  const std::string tmp = *path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError(0, "cannot write '" + *path + "'");
    f << content;
    if (!f.flush()) {
      std::remove(tmp.c_str());
      throw DataError(0, "failed writing '" + *path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw DataError(0, "cannot write '" + *path + "': " + ec.message());
  }
}

inline double fit_status(const EstimateRecord& r) {
  return (r.q_clipped ? 1.0 : 0.0) + (r.r_clipped ? 2.0 : 0.0) + (r.fit_failed ? 4.0 : 0.0);
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractError& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const SpecError& e) {
    err << "scenario error: " << e.what() << '\n';
    return kData;
  } catch (const InputError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

struct AllResults {
  std::vector<EstimateRecord> mad, mean, mehra, als;
};

inline AllResults run_all(const RunConfig& run, std::span<const double> y) {
  AllResults r;
  r.mad = run_algorithm1(y, run.estimator_config(Variability::Mad));
  r.mean = run_algorithm1(y, run.estimator_config(Variability::Mean));
  r.mehra = run_baseline(y, run.estimator_config(), BaselineMethod::Mehra, run.lags);
  r.als = run_baseline(y, run.estimator_config(), BaselineMethod::Als, run.lags);
  return r;
}

inline std::string render_all_csv(const Series& s, const AllResults& r) {
  std::ostringstream out;
  csv::Writer w(out);
  std::vector<std::string> header = {"k",           "y",           "eta",
                                     "r_hat_alg1_mad", "r_hat_alg1_mean", "r_hat_mehra",
                                     "q_hat_mehra", "r_hat_als",   "q_hat_als"};
  if (s.r_true) header.push_back("r_true");
  header.push_back("warmup");
  w.header(header);
  std::vector<double> row;
  for (std::size_t i = 0; i < r.mad.size(); ++i) {
    const auto& a = r.mad[i];
    row = {static_cast<double>(a.k), a.y, a.eta, a.r_hat, r.mean[i].r_hat, r.mehra[i].r_hat,
           r.mehra[i].q_hat.value_or(0.0), r.als[i].r_hat, r.als[i].q_hat.value_or(0.0)};
    if (s.r_true) row.push_back((*s.r_true)[a.k]);
    row.push_back(a.warmup ? 1.0 : 0.0);
    w.row(row);
  }
  return out.str();
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& run, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    auto spec = run.scenario ? load_scenario(*run.scenario) : default_section5_spec();
    if (run.seed) spec.seed = *run.seed;
    const auto s = generate(spec);
    std::ostringstream buf;
    csv::Writer w(buf);
    w.header(std::vector<std::string>{"k", "t", "x", "y", "r_true"});
    for (std::size_t k = 0; k < s.y.size(); ++k) {
      w.row(std::vector<double>{static_cast<double>(k), s.t[k], s.x[k], s.y[k], s.r_true[k]});
    }
    detail::emit(run.output, buf.str(), out);
  });
}

inline int cmd_estimate(const RunConfig& run, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    run.estimator_config().validate();
    const auto s = detail::load_series(run);

    if (run.estimator == EstimatorChoice::All) {
      detail::emit(run.output, detail::render_all_csv(s, detail::run_all(run, s.y)), out);
      return;
    }

    std::vector<EstimateRecord> records;
    bool baseline = false;
    switch (run.estimator) {
      case EstimatorChoice::Alg1Mad:
        records = run_algorithm1(s.y, run.estimator_config(Variability::Mad));
        break;
      case EstimatorChoice::Alg1Mean:
        records = run_algorithm1(s.y, run.estimator_config(Variability::Mean));
        break;
      case EstimatorChoice::Mehra:
        records = run_baseline(s.y, run.estimator_config(), BaselineMethod::Mehra, run.lags);
        baseline = true;
        break;
      default:
        records = run_baseline(s.y, run.estimator_config(), BaselineMethod::Als, run.lags);
        baseline = true;
        break;
    }

    std::ostringstream buf;
    csv::Writer w(buf);
    std::vector<std::string> header = {"k", "y", "eta", "c_hat", "r_hat"};
    if (baseline) {
      header.push_back("q_hat");
      header.push_back("fit_status");
    }
    if (s.r_true) {
      header.push_back("r_true");
      header.push_back("err");
    }
    header.push_back("warmup");
    w.header(header);
    std::vector<double> row;
    for (const auto& r : records) {
      row = {static_cast<double>(r.k), r.y, r.eta, r.c_hat, r.r_hat};
      if (baseline) {
        row.push_back(r.q_hat.value_or(0.0));
        row.push_back(detail::fit_status(r));
      }
      if (s.r_true) {
        row.push_back((*s.r_true)[r.k]);
        row.push_back(r.r_hat - (*s.r_true)[r.k]);
      }
      row.push_back(r.warmup ? 1.0 : 0.0);
      w.row(row);
    }
    detail::emit(run.output, buf.str(), out);
  });
}

inline std::string render_comparison_svg(const Series& s, const detail::AllResults& r) {
  auto sqrt_series = [](const std::vector<EstimateRecord>& recs, const Series& src,
                        std::string label, std::string color) {
    svg::Series out{std::move(label), std::move(color), {}, {}};
    for (const auto& rec : recs) {
      out.x.push_back(src.t[rec.k]);
      out.y.push_back(std::sqrt(rec.r_hat));
    }
    return out;
  };

  svg::Panel signal{"measurement and signal", {}, std::nullopt, std::nullopt};
  signal.series.push_back({"y (measured)", "#9e9e9e", s.t, s.y});
  if (s.x) signal.series.push_back({"x (true)", "#000000", s.t, *s.x});

  svg::Panel noise{"noise standard deviation", {}, 0.0, std::nullopt};
  double ref = 0.0;
  if (s.r_true) {
    svg::Series truth{"true std", "#000000", s.t, {}};
    for (double r2 : *s.r_true) {
      truth.y.push_back(std::sqrt(r2));
      ref = std::max(ref, std::sqrt(r2));
    }
    noise.series.push_back(std::move(truth));
  } else {
    for (const auto& rec : r.mad) ref = std::max(ref, std::sqrt(rec.r_hat));
  }
  // Baseline spikes would flatten everything else; they are clamped at the top.
  noise.y_max = ref > 0.0 ? 3.0 * ref : 1.0;
  noise.series.push_back(sqrt_series(r.mad, s, "MAD", "#d62728"));
  noise.series.push_back(sqrt_series(r.mehra, s, "Mehra LS", "#1f77b4"));
  noise.series.push_back(sqrt_series(r.als, s, "ALS", "#2ca02c"));

  return svg::render({signal, noise}, s.t_is_time ? "time [s]" : "sample");
}

inline int cmd_compare(const RunConfig& run, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    if (!run.plot) throw UsageError("compare needs --plot <file.svg>");
    run.estimator_config().validate();
    const auto s = detail::load_series(run);
    const auto results = detail::run_all(run, s.y);
    const auto csv_text = detail::render_all_csv(s, results);
    const auto svg_text = render_comparison_svg(s, results);
    detail::emit(run.plot, svg_text, out);
    detail::emit(run.output, csv_text, out);
  });
}

inline int cmd_diagnose(const RunConfig& run, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    run.estimator_config(Variability::Mean).validate();
    const auto s = detail::load_series(run);
    if (!s.x) {
      throw DataError(1,
                      "diagnose needs an 'x' column (the true signal) to recover the signal "
                      "increments w and noise differences dv");
    }
    std::optional<std::span<const double>> r_true;
    if (s.r_true) r_true = std::span<const double>(*s.r_true);
    const auto rows = analysis::diagnose(*s.x, s.y, r_true, run.gain, run.window);

    std::ostringstream buf;
    csv::Writer w(buf);
    w.header(std::vector<std::string>{"k", "s11", "s22", "s12", "c_hat", "predicted_bias",
                                      "realized_err"});
    for (const auto& r : rows) {
      w.row(std::vector<double>{static_cast<double>(r.k), r.s11, r.s22, r.s12, r.c_hat,
                                r.predicted_bias, r.realized_err});
    }
    detail::emit(run.output, buf.str(), out);
  });
}

}  // namespace noisevar::cli
