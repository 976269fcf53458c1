#pragma once

#include <cstdint>
#include <vector>

#include "mpvr/waveform.hpp"

namespace mpvr {

// Glitch deviation sampled at the N phase-connection instants of one
// switching period. Entries are deviations from nominal; zero means the
// glitch was absent at that instant.
struct PhaseSampledGlitch {
  std::vector<double> v_g;  // volts, length N
  double c_tot = 0.0;       // farads

  int n() const { return static_cast<int>(v_g.size()); }
  void validate() const;
};

// E = (c_tot / (2 N)) * sum v_g[i]^2.
double transmitted_glitch_energy(const PhaseSampledGlitch& g);

enum class GlitchAlignment {
  kWorstCase,      // alignment maximizing the sampled energy (security bound)
  kUniformAverage  // energy averaged over alignments uniform in one period
};

struct EnergyRow {
  int n;
  double energy_joules;
  // True when the sampled glitch occupies fewer than n/2 connection instants,
  // the condition under which more phases keep reducing the coupled energy.
  bool precondition_ok;
};

// Samples the glitch at the n phase-connection instants (spacing T_s/n) for
// each requested n and applies the transmitted-energy formula.
std::vector<EnergyRow> energy_vs_phases(const GlitchWaveform& glitch, double c_tot,
                                        double f_sw, const std::vector<int>& n_list,
                                        GlitchAlignment alignment = GlitchAlignment::kWorstCase,
                                        int alignment_trials = 512);

// Discrete-time filter sampled at one tap per phase-connection event.
struct FirSpec {
  std::vector<double> coefficients;  // b_i
  double sample_rate = 0.0;          // hertz, N * f_sw for the regulator case

  int n_taps() const { return static_cast<int>(coefficients.size()); }
  void validate() const;

  // Equal coefficients summing to 1 — the filter an N-phase regulator forms.
  static FirSpec moving_average(int n_taps, double sample_rate);
};

// |sum b_i exp(-j 2 pi f i / sample_rate)|.
double fir_response(const FirSpec& spec, double f);

// Closed form for the equal-coefficient case:
// |sin(pi f N / fs) / (N sin(pi f / fs))|.
double moving_average_response(int n_taps, double sample_rate, double f);

struct NyquistMargin {
  bool is_protected;
  double max_protected_duration;  // seconds, 1/(2 f_sw)
};

// Design rule: the regulator distorts glitches shorter than half its
// switching period.
NyquistMargin nyquist_margin(double f_sw, const GlitchWaveform& glitch);

}  // namespace mpvr
