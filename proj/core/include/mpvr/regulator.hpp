#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mpvr/waveform.hpp"

namespace mpvr {

// 2:1 switched-capacitor multiphase regulator. Phases are identical
// sub-converters with uniform clock offsets i*T_s/N; per-phase flying
// capacitance is c_fly_per_phase so that C_tot = N * c_fly_per_phase.
struct RegulatorConfig {
  int n_phases = 1;
  double c_fly_per_phase = 0.0;  // farads
  double r_on = 0.0;             // ohms per switch
  double f_sw = 0.0;             // per-phase switching frequency, hertz
  // Topology constants for the series-parallel 2:1 cell, from the
  // charge-multiplier vectors (a_r = a_c = 1/2 per element). Overridable.
  double beta_top = 2.0;
  double gamma_top = 0.25;
  double epsilon_nonoverlap = 0.0;  // dead time, seconds

  double c_tot() const { return n_phases * c_fly_per_phase; }
  double t_s() const { return 1.0 / f_sw; }
  void validate() const;

  // Same total flying capacitance regardless of phase count: N-sweeps hold
  // total silicon constant.
  static RegulatorConfig from_total(int n_phases, double c_tot, double r_on, double f_sw);
};

// Electrical model of the cryptographic load plus its power-draw profile and
// fault-tolerance window.
struct LoadModel {
  double r_l = 0.0;    // ohms
  double c_l = 0.0;    // farads
  double c_out = 0.0;  // regulator output capacitor, farads
  double p_avg = 0.0;  // watts
  double p_min = 0.0;
  double p_max = 0.0;
  double v_nominal = 0.0;  // volts
  double v_tol_low = 0.0;  // fault-tolerance window
  double v_tol_high = 0.0;
  double cc_clock_hz = 200e6;  // load-power resample rate

  void validate() const;

  // AES S-box load: 256 uW average at 0.9 V (156.3..387.22 uW), 200 MHz clock,
  // +-10% tolerance window.
  static LoadModel sbox_default();
};

struct EquivalentImpedance {
  double r_fsl;  // beta_top * r_on
  double r_ssl;  // gamma_top / (C_tot * f_sw)
  double r_eq;   // sqrt(r_fsl^2 + r_ssl^2)
};

EquivalentImpedance equivalent_impedance(const RegulatorConfig& cfg);

// First-order LPF magnitude in the optimal operating region:
//   1 / sqrt(1 + 4 pi^2 f^2 r_l^2 (c_l + c_out + C_tot)^2).
// optimal_region_assumed must be set by the caller; otherwise the general
// form applies and this throws ConfigError.
double lpf_transfer_magnitude(const RegulatorConfig& cfg, const LoadModel& load,
                              double f_in, bool optimal_region_assumed = true);

// General first-order magnitude with the DC term r_eq/r_l as printed:
//   1 / sqrt((r_eq/r_l)^2 + 4 pi^2 f^2 r_l^2 (c_l + c_out + C_tot)^2).
double lpf_transfer_magnitude_general(const RegulatorConfig& cfg,
                                      const LoadModel& load, double f_in);

// f_3dB = 1 / (2 pi r_l (c_l + c_out + c_eq)).
double cutoff_frequency(const LoadModel& load, double c_eq);

struct PhaseEvent {
  double t;
  int phase;
  bool connect;  // true: input path engaged; false: released (to dead time or ground path)
};

struct SimulationTrace {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<double> v_out;
  std::vector<double> v_in;
  std::vector<PhaseEvent> phase_events;
  std::optional<double> steady_state_reached_at;
  double v_nominal = 0.0;

  // Charge ledger for conservation checks: all in coulombs, cumulative over
  // the run. c_node is the lumped output-node capacitance c_out + c_l.
  double charge_from_phases = 0.0;
  double charge_to_load = 0.0;
  double c_node = 0.0;
  // max per-step |C_node*dv - (dq_phases - dq_load)| relative to the average
  // charge transferred per switching period.
  double max_step_charge_imbalance = 0.0;

  std::size_t index_at(double t) const;
  double time_at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double duration() const { return static_cast<double>(v_out.size() - 1) * dt; }
};

// Discrete-time integration of the switched network. Each phase alternates
// between an input->output charge path and an output->ground discharge path
// (2:1 reconfiguration), both through 2*r_on. Load power is piecewise
// constant per CC clock cycle, seeded uniform in [p_min, p_max].
// Deterministic for a given seed.
// Preconditions: dt <= T_s/(200*n_phases), duration >= 10*T_s.
SimulationTrace simulate(const RegulatorConfig& cfg, const LoadModel& load,
                         const GlitchWaveform& supply, double duration,
                         double dt, std::uint64_t seed);

// Unregulated baseline: the supply waveform applied directly to the load.
SimulationTrace passthrough_trace(const LoadModel& load, const GlitchWaveform& supply,
                                  double duration, double dt);

// Max |v_out - v_nominal| over post-transient samples. Throws
// SimulationError if steady state was never reached.
double peak_glitch_at_load(const SimulationTrace& trace, double v_nominal);

// Max - min of v_out over the last full switching-period window of a
// glitch-free steady-state region.
double output_ripple(const SimulationTrace& trace, double t_s);

struct ParameterRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct OperatingPointResult {
  RegulatorConfig config;
  double achieved_ratio;  // r_eq / r_l
};

// Grid search over (r_on, f_sw) at fixed total capacitance, minimizing
// |r_eq/r_l - 1|; near-ties prefer r_fsl = r_ssl balance, then lower f_sw.
// Throws SimulationError if no point achieves r_eq/r_l within [0.5, 2].
OperatingPointResult optimize_operating_point(const LoadModel& load, double c_tot_budget,
                                              ParameterRange r_on_range,
                                              ParameterRange f_sw_range,
                                              int n_phases = 1);

// Switching frequency at which r_fsl equals r_ssl for the given sizing.
double balanced_switching_frequency(double c_tot, double beta_top, double gamma_top,
                                    double r_on);

struct Overhead {
  double area_pct;
  double efficiency_pct;
};

// Measured efficiency and area overhead by phase count. Exact values for
// n in {1,2,4,8,16,24,32}; log-interpolated between anchors otherwise.
// Throws ConfigError for n_phases > 64 or < 1.
Overhead overhead_estimate(int n_phases);

}  // namespace mpvr
