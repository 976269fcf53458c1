#include "mpvr/waveform.hpp"

#include <algorithm>
#include <cmath>

#include "mpvr/errors.hpp"

namespace mpvr {

void GlitchWaveform::validate() const {
  if (t_r < 0.0 || t_g < 0.0 || t_f < 0.0)
    throw ConfigError("glitch edge/flat-top times must be non-negative");
  if (t_start < 0.0) throw ConfigError("glitch t_start must be non-negative");
  if (!(std::isfinite(nominal_v) && std::isfinite(amplitude)))
    throw ConfigError("glitch voltages must be finite");
}

double glitch_value(const GlitchWaveform& g, double t) {
  const double rel = t - g.t_start;
  if (rel < 0.0 || rel > g.total_duration()) return g.nominal_v;
  if (rel < g.t_r) return g.nominal_v + g.amplitude * (rel / g.t_r);
  if (rel <= g.t_r + g.t_g) return g.nominal_v + g.amplitude;
  // Falling edge. t_f == 0 cannot be reached here: rel would exceed the
  // total duration check above except exactly at the step, which the flat-top
  // branch already captured.
  return g.nominal_v + g.amplitude * (1.0 - (rel - g.t_r - g.t_g) / g.t_f);
}

SampledTrace sample(const GlitchWaveform& g, double dt, double duration, double t0) {
  g.validate();
  if (dt <= 0.0) throw ConfigError("sample: dt must be positive");
  if (duration <= 0.0) throw ConfigError("sample: duration must be positive");
  const double edge = std::min(g.t_r > 0.0 ? g.t_r : duration,
                               g.t_f > 0.0 ? g.t_f : duration);
  if (g.amplitude != 0.0 && dt > edge / 4.0 * (1.0 + 1e-12))
    throw ResolutionError("sample: dt too coarse to resolve glitch edges");

  SampledTrace tr;
  tr.dt = dt;
  tr.t0 = t0;
  const auto n = static_cast<std::size_t>(std::floor(duration / dt)) + 1;
  tr.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    tr.samples[i] = glitch_value(g, t0 + static_cast<double>(i) * dt);
  return tr;
}

std::string to_string(AttackerModelViolation v) {
  switch (v) {
    case AttackerModelViolation::kClockOutOfRange: return "clock-out-of-range";
    case AttackerModelViolation::kTooShortDuration: return "too-short-duration";
    case AttackerModelViolation::kExceedsTwiceNominal: return "exceeds-2x-nominal";
  }
  return "unknown";
}

std::vector<AttackerModelViolation> check_attacker_model(const GlitchWaveform& g,
                                                         double cc_clock_hz,
                                                         double cc_nominal_v) {
  g.validate();
  std::vector<AttackerModelViolation> out;
  if (cc_clock_hz < 50e6 || cc_clock_hz > 1e9)
    out.push_back(AttackerModelViolation::kClockOutOfRange);
  if (g.total_duration() < 0.5 / cc_clock_hz)
    out.push_back(AttackerModelViolation::kTooShortDuration);
  if (std::abs(g.nominal_v + g.amplitude) > 2.0 * cc_nominal_v)
    out.push_back(AttackerModelViolation::kExceedsTwiceNominal);
  return out;
}

}  // namespace mpvr
