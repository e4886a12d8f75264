#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "noisevar/errors.hpp"

// Synthetic scenarios: a piecewise signal x, white Gaussian noise with a
// piecewise-constant standard deviation, and additive measurement outliers.
namespace noisevar {

struct ConstantSegment {
  double level = 0.0;
};

// Starts at `from` and moves linearly to `to` over `ramp` seconds, then holds.
// A ramp of 0 jumps straight to `to`.
struct StepSegment {
  double from = 0.0;
  double to = 0.0;
  double ramp = 0.0;
};

// center + amplitude * sin(phase), phase accumulated from the instantaneous
// frequency, which moves linearly f_start -> f_peak over the first half of the
// segment and f_peak -> f_end over the second half.
struct ChirpSegment {
  double amplitude = 1.0;
  double f_start = 1.0;
  double f_peak = 1.0;
  double f_end = 1.0;
  double center = 0.0;
};

struct Segment {
  double start = 0.0;
  double end = 0.0;
  std::variant<ConstantSegment, StepSegment, ChirpSegment> shape;
};

struct NoiseLevel {
  double start = 0.0;
  double std = 0.0;
};

struct Outlier {
  double time = 0.0;
  std::optional<double> magnitude;  // default: 20x the local noise std
};

inline constexpr double kDefaultOutlierNoiseMultiple = 20.0;

struct ScenarioSpec {
  double sample_rate = 100.0;
  double duration = 25.0;
  std::uint64_t seed = 0;
  std::vector<Segment> segments;
  std::vector<NoiseLevel> noise_profile;
  std::vector<Outlier> outliers;

  std::size_t sample_count() const {
    return static_cast<std::size_t>(std::llround(duration * sample_rate));
  }
  std::size_t index_of(double t) const {
    return static_cast<std::size_t>(std::llround(t * sample_rate));
  }
};

struct Scenario {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> r_true;
};

namespace detail {

inline constexpr double kTimeTolerance = 1e-9;

inline std::string indexed(const char* name, std::size_t i) {
  return std::string(name) + "[" + std::to_string(i) + "]";
}

}  // namespace detail

inline void validate(const ScenarioSpec& spec) {
  using detail::indexed;
  using detail::kTimeTolerance;
  if (!(spec.sample_rate > 0.0) || !std::isfinite(spec.sample_rate))
    throw SpecError("sample_rate", "must be positive");
  if (!(spec.duration > 0.0) || !std::isfinite(spec.duration))
    throw SpecError("duration", "must be positive");
  if (spec.sample_count() < 2) throw SpecError("duration", "yields fewer than two samples");
  const double nyquist = spec.sample_rate / 2.0;

  if (spec.segments.empty()) throw SpecError("segment", "at least one segment is required");
  double expected_start = 0.0;
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const auto& seg = spec.segments[i];
    const auto field = indexed("segment", i);
    if (std::abs(seg.start - expected_start) > kTimeTolerance)
      throw SpecError(field + ".start", "segments must tile [0, duration) without gaps or overlap");
    if (!(seg.end > seg.start)) throw SpecError(field + ".end", "must exceed start");
    if (const auto* step = std::get_if<StepSegment>(&seg.shape); step && !(step->ramp >= 0.0))
      throw SpecError(field + ".ramp", "must be non-negative");
    if (const auto* chirp = std::get_if<ChirpSegment>(&seg.shape)) {
      const std::pair<const char*, double> freqs[] = {
          {"f_start", chirp->f_start}, {"f_peak", chirp->f_peak}, {"f_end", chirp->f_end}};
      for (const auto& [name, f] : freqs) {
        if (!(f > 0.0 && f < nyquist))
          throw SpecError(field + "." + name, "must be positive and below Nyquist");
      }
    }
    expected_start = seg.end;
  }
  if (std::abs(expected_start - spec.duration) > kTimeTolerance)
    throw SpecError(indexed("segment", spec.segments.size() - 1) + ".end",
                    "last segment must end at duration");

  if (spec.noise_profile.empty()) throw SpecError("noise", "at least one noise level is required");
  for (std::size_t i = 0; i < spec.noise_profile.size(); ++i) {
    const auto& level = spec.noise_profile[i];
    const auto field = indexed("noise", i);
    if (i == 0 && std::abs(level.start) > kTimeTolerance)
      throw SpecError(field + ".start", "first noise level must start at 0");
    if (i > 0 && !(level.start > spec.noise_profile[i - 1].start))
      throw SpecError(field + ".start", "start times must be strictly increasing");
    if (!(level.std >= 0.0) || !std::isfinite(level.std))
      throw SpecError(field + ".std", "must be non-negative");
  }

  for (std::size_t i = 0; i < spec.outliers.size(); ++i) {
    const auto& o = spec.outliers[i];
    const auto field = indexed("outlier", i);
    if (!(o.time >= 0.0) || spec.index_of(o.time) >= spec.sample_count())
      throw SpecError(field + ".time", "must fall inside [0, duration)");
    if (o.magnitude && !std::isfinite(*o.magnitude))
      throw SpecError(field + ".magnitude", "must be finite");
  }
}

namespace detail {

// libm's log/sin are not guaranteed to round identically across builds (glibc
// even gives sincos() and sin()/cos() different last bits), so the generator
// uses its own versions built from +, -, *, / and frexp/ldexp only.

// Natural log for finite x > 0, within a few ulp.
inline double portable_log(double x) {
  int e = 0;
  double m = std::frexp(x, &e);  // m in [0.5, 1)
  if (m < std::numbers::sqrt2 / 2.0) {
    m *= 2.0;
    --e;
  }
  // log(m) = 2 atanh(s), |s| <= 0.1716
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  double series = 1.0 / 25.0;
  for (int odd = 23; odd >= 1; odd -= 2) series = 1.0 / odd + s2 * series;
  constexpr double ln2_hi = 0x1.62e42fefa3800p-1;
  constexpr double ln2_lo = 0x1.ef35793c76730p-45;
  const double de = static_cast<double>(e);
  return de * ln2_hi + (de * ln2_lo + 2.0 * s * series);
}

// sin(x) for |x| up to about 1e6 (three-part Cody-Waite reduction; each
// leading part has 30 bits so n * part is exact).
inline double portable_sin(double x) {
  constexpr double two_pi_a = 0x1.921fb54000000p+2;
  constexpr double two_pi_b = 0x1.10b4611800000p-28;
  constexpr double two_pi_c = 0x1.313198a2e0370p-59;
  constexpr double pi = std::numbers::pi;
  const double n = std::nearbyint(x / (two_pi_a + two_pi_b));
  double r = ((x - n * two_pi_a) - n * two_pi_b) - n * two_pi_c;  // [-pi, pi]
  if (r > pi / 2.0) r = pi - r;
  if (r < -pi / 2.0) r = -pi - r;
  const double r2 = r * r;
  // Taylor series to r^23; the truncation error is below 1e-19 on [-pi/2, pi/2].
  double poly = 0.0;
  for (int n_odd = 23; n_odd >= 3; n_odd -= 2) poly = (1.0 - r2 * poly) / (n_odd * (n_odd - 1));
  return r * (1.0 - r2 * poly);
}

// Standard normal draws from the raw 64-bit engine output (Marsaglia's polar
// method), so that output depends only on the seed and not on the standard
// library's distribution implementation.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * portable_log(s) / s);
    spare_ = v * f;
    cached_ = true;
    return u * f;
  }

 private:
  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool cached_ = false;
};

inline double noise_std_at(const ScenarioSpec& spec, std::size_t k) {
  double std = spec.noise_profile.front().std;
  for (const auto& level : spec.noise_profile) {
    if (spec.index_of(level.start) <= k) std = level.std;
  }
  return std;
}

}  // namespace detail

/// Deterministic in (spec, spec.seed).
inline Scenario generate(const ScenarioSpec& spec) {
  validate(spec);
  const std::size_t n = spec.sample_count();
  Scenario out;
  out.t.resize(n);
  out.x.resize(n);
  out.y.resize(n);
  out.r_true.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.t[k] = static_cast<double>(k) / spec.sample_rate;

  for (const auto& seg : spec.segments) {
    const std::size_t first = spec.index_of(seg.start);
    const std::size_t last = std::min(spec.index_of(seg.end), n);
    double phase = 0.0;
    for (std::size_t k = first; k < last; ++k) {
      const double local = out.t[k] - seg.start;
      out.x[k] = std::visit(
          [&](const auto& shape) -> double {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, ConstantSegment>) {
              return shape.level;
            } else if constexpr (std::is_same_v<T, StepSegment>) {
              if (shape.ramp <= 0.0) return shape.to;
              const double frac = std::min(1.0, local / shape.ramp);
              return shape.from + (shape.to - shape.from) * frac;
            } else {
              const double half = 0.5 * (seg.end - seg.start);
              const double f = local < half
                                   ? shape.f_start + (shape.f_peak - shape.f_start) * local / half
                                   : shape.f_peak + (shape.f_end - shape.f_peak) * (local - half) / half;
              const double value = shape.center + shape.amplitude * detail::portable_sin(phase);
              phase += 2.0 * std::numbers::pi * f / spec.sample_rate;
              return value;
            }
          },
          seg.shape);
    }
  }

  detail::GaussianSource gauss(spec.seed);
  for (std::size_t k = 0; k < n; ++k) {
    const double std = detail::noise_std_at(spec, k);
    out.r_true[k] = std * std;
    out.y[k] = out.x[k] + std * gauss.next();
  }
  for (const auto& o : spec.outliers) {
    const std::size_t k = spec.index_of(o.time);
    out.y[k] += o.magnitude.value_or(kDefaultOutlierNoiseMultiple * detail::noise_std_at(spec, k));
  }
  return out;
}

/// Canonical reproduction scenario, 25 s at 100 Hz:
///  - steady at 0 until t = 5 s;
///  - a disturbance with two overshooting jumps, at 5 s (to 6, settling at 2.5)
///    and 7.5 s (to 7, settling at 4);
///  - from 10 s an oscillation around 4 whose frequency rises 0.5 -> 3.5 Hz and
///    falls back to 0.5 Hz by 20 s (exactly 20 cycles, so it ends at the center);
///  - constant at 4 from 20 s with a +3.0 measurement outlier at 22 s.
/// Noise std: 0.1 until 5 s, 0.15 until 15 s, then 0.1.
/// scenarios/section5.cfg holds the same values.
inline ScenarioSpec default_section5_spec() {
  ScenarioSpec spec;
  spec.sample_rate = 100.0;
  spec.duration = 25.0;
  spec.seed = 20200705;
  spec.segments = {
      {0.0, 5.0, ConstantSegment{0.0}},
      {5.0, 7.5, StepSegment{6.0, 2.5, 0.01}},
      {7.5, 10.0, StepSegment{7.0, 4.0, 0.01}},
      {10.0, 20.0, ChirpSegment{1.0, 0.5, 3.5, 0.5, 4.0}},
      {20.0, 25.0, ConstantSegment{4.0}},
  };
  spec.noise_profile = {{0.0, 0.1}, {5.0, 0.15}, {15.0, 0.1}};
  spec.outliers = {{22.0, 3.0}};
  return spec;
}

// ---------------------------------------------------------------------------
// Flat text format, one `key = value` per line, '#' starts a comment:
//
//   sample_rate = 100
//   duration = 25
//   seed = 20200705
//   segment = constant 0 5 level=0
//   segment = step 5 7.5 from=6 to=2.5 ramp=0.01
//   segment = chirp 10 20 amplitude=1 f_start=0.5 f_peak=3.5 f_end=0.5 center=4
//   noise = 0 0.1
//   outlier = 22 3.0        (magnitude optional)
//
// `segment`, `noise` and `outlier` may repeat; order is preserved.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline double parse_number(std::string_view text, const std::string& field) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw SpecError(field, "expected a number, got '" + std::string(text) + "'");
  return value;
}

inline std::map<std::string, double> parse_named(const std::vector<std::string>& tokens,
                                                 std::size_t from, const std::string& field) {
  std::map<std::string, double> out;
  for (std::size_t i = from; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos)
      throw SpecError(field, "expected name=value, got '" + tokens[i] + "'");
    const auto name = tokens[i].substr(0, eq);
    out[name] = parse_number(std::string_view(tokens[i]).substr(eq + 1), field + "." + name);
  }
  return out;
}

inline double take(std::map<std::string, double>& named, const std::string& name,
                   const std::string& field) {
  const auto it = named.find(name);
  if (it == named.end()) throw SpecError(field + "." + name, "missing");
  const double v = it->second;
  named.erase(it);
  return v;
}

inline Segment parse_segment(const std::vector<std::string>& tok, const std::string& field) {
  if (tok.size() < 3) throw SpecError(field, "expected '<kind> <start> <end> name=value...'");
  Segment seg;
  seg.start = parse_number(tok[1], field + ".start");
  seg.end = parse_number(tok[2], field + ".end");
  auto named = parse_named(tok, 3, field);
  if (tok[0] == "constant") {
    seg.shape = ConstantSegment{take(named, "level", field)};
  } else if (tok[0] == "step") {
    StepSegment s;
    s.from = take(named, "from", field);
    s.to = take(named, "to", field);
    s.ramp = named.contains("ramp") ? take(named, "ramp", field) : 0.0;
    seg.shape = s;
  } else if (tok[0] == "chirp") {
    ChirpSegment c;
    c.amplitude = take(named, "amplitude", field);
    c.f_start = take(named, "f_start", field);
    c.f_peak = take(named, "f_peak", field);
    c.f_end = take(named, "f_end", field);
    c.center = take(named, "center", field);
    seg.shape = c;
  } else {
    throw SpecError(field + ".kind", "unknown segment kind '" + tok[0] + "'");
  }
  if (!named.empty()) throw SpecError(field + "." + named.begin()->first, "unknown parameter");
  return seg;
}

}  // namespace detail

inline ScenarioSpec parse_scenario(std::istream& in) {
  using detail::indexed;
  ScenarioSpec spec;
  spec.segments.clear();
  spec.noise_profile.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = detail::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw SpecError("line " + std::to_string(line_no), "expected 'key = value'");
    const std::string key{detail::trim(body.substr(0, eq))};
    const std::string_view value = detail::trim(body.substr(eq + 1));

    if (key == "sample_rate") {
      spec.sample_rate = detail::parse_number(value, key);
    } else if (key == "duration") {
      spec.duration = detail::parse_number(value, key);
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || ptr != value.data() + value.size())
        throw SpecError("seed", "expected an unsigned 64-bit integer");
      spec.seed = seed;
    } else if (key == "segment") {
      spec.segments.push_back(
          detail::parse_segment(detail::split_ws(value), indexed("segment", spec.segments.size())));
    } else if (key == "noise") {
      const auto field = indexed("noise", spec.noise_profile.size());
      const auto tok = detail::split_ws(value);
      if (tok.size() != 2) throw SpecError(field, "expected '<start> <std>'");
      spec.noise_profile.push_back(
          {detail::parse_number(tok[0], field + ".start"), detail::parse_number(tok[1], field + ".std")});
    } else if (key == "outlier") {
      const auto field = indexed("outlier", spec.outliers.size());
      const auto tok = detail::split_ws(value);
      if (tok.empty() || tok.size() > 2) throw SpecError(field, "expected '<time> [magnitude]'");
      Outlier o;
      o.time = detail::parse_number(tok[0], field + ".time");
      if (tok.size() == 2) o.magnitude = detail::parse_number(tok[1], field + ".magnitude");
      spec.outliers.push_back(o);
    } else {
      throw SpecError(key, "unknown key on line " + std::to_string(line_no));
    }
  }
  validate(spec);
  return spec;
}

inline ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("path", "cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

}  // namespace noisevar
