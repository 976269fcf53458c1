#include "mpvr/attenuation.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "mpvr/errors.hpp"

namespace mpvr {

void PhaseSampledGlitch::validate() const {
  if (v_g.empty()) throw ConfigError("phase-sampled glitch must have at least one sample");
  if (c_tot <= 0.0) throw ConfigError("phase-sampled glitch: c_tot must be positive");
}

double transmitted_glitch_energy(const PhaseSampledGlitch& g) {
  g.validate();
  double sum_sq = 0.0;
  for (double v : g.v_g) sum_sq += v * v;
  return g.c_tot / (2.0 * g.n()) * sum_sq;
}

namespace {

// Sum of squared deviations over the n connection instants for a given
// alignment offset, plus the count of nonzero samples.
std::pair<double, int> sampled_energy_sum(const GlitchWaveform& g, double t_s, int n,
                                          double offset) {
  double sum_sq = 0.0;
  int nonzero = 0;
  for (int i = 0; i < n; ++i) {
    const double t = g.t_start + offset + static_cast<double>(i) * t_s / n;
    const double dev = glitch_value(g, t) - g.nominal_v;
    if (dev != 0.0) ++nonzero;
    sum_sq += dev * dev;
  }
  return {sum_sq, nonzero};
}

}  // namespace

std::vector<EnergyRow> energy_vs_phases(const GlitchWaveform& glitch, double c_tot,
                                        double f_sw, const std::vector<int>& n_list,
                                        GlitchAlignment alignment, int alignment_trials) {
  glitch.validate();
  if (c_tot <= 0.0) throw ConfigError("energy_vs_phases: c_tot must be positive");
  if (f_sw <= 0.0) throw ConfigError("energy_vs_phases: f_sw must be positive");
  if (alignment_trials < 2) throw ConfigError("energy_vs_phases: need >= 2 alignment trials");
  const double t_s = 1.0 / f_sw;

  std::vector<EnergyRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    if (n < 1) throw ConfigError("energy_vs_phases: phase counts must be >= 1");
    double sum_sq = 0.0;
    int nonzero = 0;
    if (alignment == GlitchAlignment::kWorstCase) {
      // The attacker controls the glitch phase relative to the interleave
      // clock, so the security-relevant bound maximizes the coupled energy.
      // The sampling pattern is periodic in the alignment with period T_s/n,
      // so scanning one grid spacing covers every alignment.
      for (int k = 0; k < alignment_trials; ++k) {
        const double offset = (t_s / n) * (static_cast<double>(k) / (alignment_trials - 1));
        const auto [s, nz] = sampled_energy_sum(glitch, t_s, n, offset);
        if (s > sum_sq) {
          sum_sq = s;
          nonzero = nz;
        }
      }
    } else {
      int worst_nz = 0;
      for (int k = 0; k < alignment_trials; ++k) {
        const double offset = (t_s / n) * ((static_cast<double>(k) + 0.5) / alignment_trials);
        const auto [s, nz] = sampled_energy_sum(glitch, t_s, n, offset);
        sum_sq += s;
        worst_nz = std::max(worst_nz, nz);
      }
      sum_sq /= alignment_trials;
      nonzero = worst_nz;
    }
    rows.push_back({n, c_tot / (2.0 * n) * sum_sq, 2 * nonzero < n});
  }
  return rows;
}

void FirSpec::validate() const {
  if (coefficients.empty()) throw ConfigError("FIR: need at least one tap");
  if (sample_rate <= 0.0) throw ConfigError("FIR: sample_rate must be positive");
}

FirSpec FirSpec::moving_average(int n_taps, double sample_rate) {
  if (n_taps < 1) throw ConfigError("FIR: n_taps must be >= 1");
  FirSpec s;
  s.coefficients.assign(n_taps, 1.0 / n_taps);
  s.sample_rate = sample_rate;
  return s;
}

double fir_response(const FirSpec& spec, double f) {
  spec.validate();
  if (f < 0.0) throw ConfigError("fir_response: f must be non-negative");
  std::complex<double> acc{0.0, 0.0};
  const double w = -2.0 * std::numbers::pi * f / spec.sample_rate;
  for (int i = 0; i < spec.n_taps(); ++i)
    acc += spec.coefficients[i] * std::polar(1.0, w * i);
  return std::abs(acc);
}

double moving_average_response(int n_taps, double sample_rate, double f) {
  if (n_taps < 1 || sample_rate <= 0.0)
    throw ConfigError("moving_average_response: invalid parameters");
  const double x = std::numbers::pi * f / sample_rate;
  const double den = std::sin(x);
  if (std::abs(den) < 1e-15) return 1.0;  // f at a multiple of the sample rate
  return std::abs(std::sin(x * n_taps) / (n_taps * den));
}

NyquistMargin nyquist_margin(double f_sw, const GlitchWaveform& glitch) {
  if (f_sw <= 0.0) throw ConfigError("nyquist_margin: f_sw must be positive");
  const double guard = 0.5 / f_sw;
  return {glitch.total_duration() < guard, guard};
}

}  // namespace mpvr
