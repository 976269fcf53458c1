#pragma once

#include <string>
#include <vector>

namespace mpvr {

// Trapezoidal supply disturbance superposed on a nominal rail. A positive
// amplitude is an over-voltage glitch, a negative one an under-voltage glitch.
struct GlitchWaveform {
  double nominal_v = 0.0;  // volts
  double amplitude = 0.0;  // volts, signed deviation on the flat top
  double t_start = 0.0;    // seconds
  double t_r = 0.0;        // rise time, seconds
  double t_g = 0.0;        // flat-top duration, seconds
  double t_f = 0.0;        // fall time, seconds

  double total_duration() const { return t_r + t_g + t_f; }
  double t_end() const { return t_start + total_duration(); }

  // Fundamental frequency of the glitch, 1/(t_r+t_g+t_f). Zero-duration
  // glitches have no meaningful frequency; returns 0 for those.
  double f_in() const {
    const double d = total_duration();
    return d > 0.0 ? 1.0 / d : 0.0;
  }

  void validate() const;  // throws ConfigError on invariant violation
};

// Piecewise-linear trapezoid evaluation; nominal_v outside the glitch window.
double glitch_value(const GlitchWaveform& g, double t);

// Uniformly sampled rail voltage.
struct SampledTrace {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<double> samples;
};

// samples[i] = glitch_value(g, t0 + i*dt). Throws ResolutionError when dt is
// too coarse to represent nonzero glitch edges (dt must be <= min(t_r,t_f)/4
// over the nonzero edges).
SampledTrace sample(const GlitchWaveform& g, double dt, double duration, double t0 = 0.0);

// Threat-model constraint checks.
enum class AttackerModelViolation {
  kClockOutOfRange,     // CC clock outside [50 MHz, 1 GHz]
  kTooShortDuration,    // total duration < half the CC switching period
  kExceedsTwiceNominal  // |nominal + amplitude| > 2 * CC nominal voltage
};

std::string to_string(AttackerModelViolation v);

// Empty result means the glitch is admissible under the threat model.
std::vector<AttackerModelViolation> check_attacker_model(const GlitchWaveform& g,
                                                         double cc_clock_hz,
                                                         double cc_nominal_v);

}  // namespace mpvr
