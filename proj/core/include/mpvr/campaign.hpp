#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpvr/infective.hpp"

namespace mpvr {

enum class KeyPolicy {
  kFixed,          // every trial uses spec.key / spec.plaintext
  kPerTrialRandom  // key and plaintext drawn from the trial seed
};

// One Monte Carlo experiment: `trials` independent end-to-end runs with
// per-trial seeds base_seed + i. No regulator means the supply waveform is
// applied directly to the load (the unprotected baseline).
struct CampaignSpec {
  int trials = 1;
  std::uint64_t base_seed = 1;
  std::optional<RegulatorConfig> regulator;
  std::optional<DetectorConfig> detector;
  LoadModel load;
  FaultModel fault_model;
  GlitchWaveform glitch;  // template; see randomize_t_start
  // Attack alignment is unknown to the defender: shift t_start by a seeded
  // uniform offset in [0, T_s) per trial. Ignored for the unprotected target.
  bool randomize_t_start = true;
  Block key{};
  Block plaintext{};
  KeyPolicy key_policy = KeyPolicy::kFixed;
  double duration = 0.0;  // seconds; 0 = window_end + 2 switching periods
  double dt = 0.0;        // seconds; 0 = finest of the resolution guards

  void validate() const;
  double resolved_dt() const;
  double resolved_duration() const;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  bool faulted = false;       // pipeline output != correct ciphertext
  bool contaminated = false;
  double peak_deviation = 0.0;  // volts
  std::string error;            // nonempty when the trial raised
};

struct FaultCampaignResult {
  int trials = 0;
  int faults = 0;
  int contaminated_count = 0;
  int exploitable = 0;  // faulted and not contaminated
  int error_count = 0;
  double success_rate_pct = 0.0;     // 100 * faults / trials, exact counts
  double fault_coverage_pct = 0.0;   // 100 - success_rate_pct
  double exploitable_rate_pct = 0.0;
  double max_peak_deviation = 0.0;   // volts, max over error-free trials
  std::vector<TrialRecord> per_trial;
};

FaultCampaignResult run_campaign(const CampaignSpec& spec);

// ---- Sweeps. Each row is reproducible by a standalone run_campaign with the
// row's parameters; seeds are identical across rows (paired comparison).

struct PhaseSweepRow {
  int n_phases = 0;  // 0 = unprotected (no regulator)
  double success_rate_pct = 0.0;
  double coverage_pct = 0.0;
  double peak_deviation = 0.0;  // volts, max over trials
};

struct PhaseSweepResult {
  std::vector<PhaseSweepRow> rows;
  bool coverage_monotone = false;  // non-decreasing over the regulated rows
};

// Holds C_tot, r_on and f_sw fixed while varying the phase count. When
// include_unprotected is set, an n=0 anchor row applies the glitch (re-based
// on the load's nominal rail) directly to the load.
PhaseSweepResult sweep_phases(const CampaignSpec& spec, const std::vector<int>& n_list,
                              bool include_unprotected = true);

struct CapacitorSweepRow {
  double c_tot = 0.0;           // farads
  double peak_deviation = 0.0;  // volts
  double energy_joules = 0.0;   // worst-case transmitted glitch energy
};

struct CapacitorSweepResult {
  std::vector<CapacitorSweepRow> rows;
  double first_octave_slope = 0.0;  // relative peak-deviation change per octave
  double last_octave_slope = 0.0;
  // First capacitance from which every following octave changes the peak
  // deviation by less than 5%.
  std::optional<double> saturation_c;
};

CapacitorSweepResult sweep_capacitor(const CampaignSpec& spec,
                                     const std::vector<double>& c_list);

struct FrequencySweepRow {
  double f_sw = 0.0;  // hertz
  int n_phases = 0;
  double peak_deviation = 0.0;  // volts
};

std::vector<FrequencySweepRow> sweep_frequency(const CampaignSpec& spec,
                                               const std::vector<double>& f_list,
                                               const std::vector<int>& n_list);

struct DurationSweepRow {
  double t_total = 0.0;  // seconds, glitch rise+top+fall
  int n_phases = 0;      // 0 = unprotected
  double peak_deviation = 0.0;   // volts
  bool nyquist_protected = false;  // t_total < 1 / (2 f_sw)
};

std::vector<DurationSweepRow> sweep_duration(const CampaignSpec& spec,
                                             const std::vector<double>& t_list,
                                             const std::vector<int>& n_list);

// The stock attack scenario: 1.8 V supply glitched by +2 V (500 ps edges,
// 1 ns top) against the S-box load behind a 200 pF / 60 MHz regulator with
// low-resistance switches. Detector thresholds from the fault window.
CampaignSpec default_scenario();

// Capacitor-study variant: single phase, slower switches and a small output
// capacitor so the flying-capacitance sweep spans the knee of the coupling
// curve.
CampaignSpec capacitor_scenario();

}  // namespace mpvr
