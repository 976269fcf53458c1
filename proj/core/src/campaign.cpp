#include "mpvr/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpvr/attenuation.hpp"
#include "mpvr/errors.hpp"
#include "mpvr/rng.hpp"

namespace mpvr {

namespace {

// Sub-stream tags so per-trial draws for different purposes never collide.
constexpr std::uint64_t kAlignTag = 0xa119;
constexpr std::uint64_t kKeyTag = 0x6b65;
constexpr std::uint64_t kMaskTag = 0x1f3c;  // shared with end_to_end

double min_positive(double a, double b) {
  if (a <= 0.0) return b;
  if (b <= 0.0) return a;
  return std::min(a, b);
}

}  // namespace

void CampaignSpec::validate() const {
  if (trials < 1) throw ConfigError("campaign: trials must be >= 1");
  load.validate();
  glitch.validate();
  fault_model.validate();
  if (regulator) regulator->validate();
  if (detector) detector->validate();
  if (fault_model.window_start < 0.0)
    throw ConfigError("campaign: evaluation window must start at t >= 0");
  if (fault_model.window_end > resolved_duration())
    throw ConfigError("campaign: evaluation window extends past the simulated duration");
}

double CampaignSpec::resolved_dt() const {
  if (dt > 0.0) return dt;
  double d = std::numeric_limits<double>::infinity();
  if (regulator) d = regulator->t_s() / (200.0 * regulator->n_phases);
  // Keep the waveform sampler's edge guard satisfied with headroom.
  double feature = min_positive(glitch.t_r, glitch.t_f);
  if (!regulator) feature = min_positive(feature, glitch.t_g);
  if (feature > 0.0) d = std::min(d, feature / 5.0);
  if (!std::isfinite(d)) d = resolved_duration() / 4000.0;
  return d;
}

double CampaignSpec::resolved_duration() const {
  if (duration > 0.0) return duration;
  if (regulator) {
    const double t_s = regulator->t_s();
    return std::max(fault_model.window_end + t_s, 10.0 * t_s);
  }
  return fault_model.window_end + glitch.total_duration() + fault_model.window_end * 0.05;
}

namespace {

TrialRecord run_trial(const CampaignSpec& spec, std::uint64_t seed, double duration,
                      double dt) {
  TrialRecord rec;
  rec.seed = seed;

  GlitchWaveform g = spec.glitch;
  if (spec.regulator && spec.randomize_t_start) {
    Rng align(derive_seed(seed, kAlignTag));
    g.t_start += align.next_double() * spec.regulator->t_s();
  }

  Block key = spec.key;
  Block pt = spec.plaintext;
  if (spec.key_policy == KeyPolicy::kPerTrialRandom) {
    Rng kr(derive_seed(seed, kKeyTag));
    for (auto& b : key) b = static_cast<std::uint8_t>(kr.next_u64());
    for (auto& b : pt) b = static_cast<std::uint8_t>(kr.next_u64());
  }

  const SimulationTrace trace =
      spec.regulator ? simulate(*spec.regulator, spec.load, g, duration, dt, seed)
                     : passthrough_trace(spec.load, g, duration, dt);

  const SupplyEvaluation eval =
      evaluate_under_supply(trace, spec.fault_model, key, pt, seed);

  Block ct = eval.ciphertext;
  if (spec.detector) {
    const DetectionResult det = detect(trace, *spec.detector, spec.fault_model.window_start,
                                       spec.fault_model.window_end);
    if (det.triggered) {
      auto [mask, next] = prng_next(PrngState::from_seed(derive_seed(seed, kMaskTag)));
      (void)next;
      ct = aes128_encrypt_faulted(key, pt, eval.faulted ? eval.fault_round : 0, eval.e1,
                                  mask);
      rec.contaminated = true;
    }
  }
  // Output comparator: any result different from the correct ciphertext
  // counts as a fault, contaminated or not.
  rec.faulted = ct != eval.correct_ciphertext;

  const std::size_t lo = trace.index_at(spec.fault_model.window_start);
  const std::size_t hi = trace.index_at(spec.fault_model.window_end);
  double peak = 0.0;
  for (std::size_t i = lo; i <= hi; ++i)
    peak = std::max(peak, std::abs(trace.v_out[i] - spec.load.v_nominal));
  rec.peak_deviation = peak;
  return rec;
}

}  // namespace

FaultCampaignResult run_campaign(const CampaignSpec& spec) {
  spec.validate();
  const double dt = spec.resolved_dt();
  const double duration = spec.resolved_duration();

  FaultCampaignResult res;
  res.trials = spec.trials;
  res.per_trial.reserve(static_cast<std::size_t>(spec.trials));
  for (int i = 0; i < spec.trials; ++i) {
    const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(i);
    TrialRecord rec;
    try {
      rec = run_trial(spec, seed, duration, dt);
    } catch (const Error& e) {
      rec.seed = seed;
      rec.error = e.what();
      ++res.error_count;
    }
    if (rec.error.empty()) {
      if (rec.faulted) ++res.faults;
      if (rec.contaminated) ++res.contaminated_count;
      if (rec.faulted && !rec.contaminated) ++res.exploitable;
      res.max_peak_deviation = std::max(res.max_peak_deviation, rec.peak_deviation);
    }
    res.per_trial.push_back(std::move(rec));
  }
  // Integer counts all the way down; one division at the end.
  res.success_rate_pct = 100.0 * res.faults / res.trials;
  res.fault_coverage_pct = 100.0 - res.success_rate_pct;
  res.exploitable_rate_pct = 100.0 * res.exploitable / res.trials;
  return res;
}

namespace {

CampaignSpec with_phases(const CampaignSpec& spec, int n) {
  CampaignSpec s = spec;
  RegulatorConfig reg = *spec.regulator;
  reg.n_phases = n;
  reg.c_fly_per_phase = spec.regulator->c_tot() / n;  // C_tot held constant
  s.regulator = reg;
  s.dt = 0.0;  // re-resolve: the step guard tightens with the phase count
  return s;
}

CampaignSpec unprotected(const CampaignSpec& spec) {
  CampaignSpec s = spec;
  s.regulator.reset();
  s.glitch.nominal_v = spec.load.v_nominal;  // supply rail is the load rail
  s.dt = 0.0;
  s.duration = 0.0;
  return s;
}

}  // namespace

PhaseSweepResult sweep_phases(const CampaignSpec& spec, const std::vector<int>& n_list,
                              bool include_unprotected) {
  if (!spec.regulator) throw ConfigError("sweep_phases: spec needs a regulator");
  if (n_list.empty()) throw ConfigError("sweep_phases: empty n_list");

  PhaseSweepResult out;
  if (include_unprotected) {
    const FaultCampaignResult r = run_campaign(unprotected(spec));
    out.rows.push_back({0, r.success_rate_pct, r.fault_coverage_pct, r.max_peak_deviation});
  }
  for (int n : n_list) {
    const FaultCampaignResult r = run_campaign(with_phases(spec, n));
    out.rows.push_back({n, r.success_rate_pct, r.fault_coverage_pct, r.max_peak_deviation});
  }
  out.coverage_monotone = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i - 1].n_phases == 0) continue;  // the anchor row sits apart
    if (out.rows[i].coverage_pct < out.rows[i - 1].coverage_pct)
      out.coverage_monotone = false;
  }
  return out;
}

CapacitorSweepResult sweep_capacitor(const CampaignSpec& spec,
                                     const std::vector<double>& c_list) {
  if (!spec.regulator) throw ConfigError("sweep_capacitor: spec needs a regulator");
  if (c_list.size() < 2) throw ConfigError("sweep_capacitor: need at least two points");

  CapacitorSweepResult out;
  for (double c : c_list) {
    if (c <= 0.0) throw ConfigError("sweep_capacitor: capacitance must be positive");
    CampaignSpec s = spec;
    RegulatorConfig reg = *spec.regulator;
    reg.c_fly_per_phase = c / reg.n_phases;
    s.regulator = reg;
    const FaultCampaignResult r = run_campaign(s);
    const auto energy = energy_vs_phases(s.glitch, c, reg.f_sw, {reg.n_phases},
                                         GlitchAlignment::kWorstCase);
    out.rows.push_back({c, r.max_peak_deviation, energy.front().energy_joules});
  }

  // Relative peak-deviation change normalized per octave of capacitance.
  auto octave_slope = [&](std::size_t i) {
    const auto& a = out.rows[i - 1];
    const auto& b = out.rows[i];
    const double octaves = std::log2(b.c_tot / a.c_tot);
    if (a.peak_deviation <= 0.0 || octaves <= 0.0) return 0.0;
    return (b.peak_deviation - a.peak_deviation) / a.peak_deviation / octaves;
  };
  out.first_octave_slope = octave_slope(1);
  out.last_octave_slope = octave_slope(out.rows.size() - 1);
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    bool flat = true;
    for (std::size_t j = i; j < out.rows.size(); ++j)
      if (std::abs(octave_slope(j)) >= 0.05) flat = false;
    if (flat) {
      out.saturation_c = out.rows[i - 1].c_tot;
      break;
    }
  }
  return out;
}

std::vector<FrequencySweepRow> sweep_frequency(const CampaignSpec& spec,
                                               const std::vector<double>& f_list,
                                               const std::vector<int>& n_list) {
  if (!spec.regulator) throw ConfigError("sweep_frequency: spec needs a regulator");
  if (f_list.empty() || n_list.empty())
    throw ConfigError("sweep_frequency: empty sweep axis");

  std::vector<FrequencySweepRow> rows;
  for (double f : f_list) {
    if (f <= 0.0) throw ConfigError("sweep_frequency: frequency must be positive");
    // The template's window and glitch placement are laid out in multiples of
    // its switching period; keep that layout as the period changes.
    const double scale = 1.0 / (f * spec.regulator->t_s());
    for (int n : n_list) {
      CampaignSpec s = with_phases(spec, n);
      s.regulator->f_sw = f;
      s.fault_model.window_start *= scale;
      s.fault_model.window_end *= scale;
      s.glitch.t_start *= scale;
      s.duration = 0.0;
      const FaultCampaignResult r = run_campaign(s);
      rows.push_back({f, n, r.max_peak_deviation});
    }
  }
  return rows;
}

std::vector<DurationSweepRow> sweep_duration(const CampaignSpec& spec,
                                             const std::vector<double>& t_list,
                                             const std::vector<int>& n_list) {
  if (!spec.regulator) throw ConfigError("sweep_duration: spec needs a regulator");
  if (t_list.empty() || n_list.empty())
    throw ConfigError("sweep_duration: empty sweep axis");

  std::vector<DurationSweepRow> rows;
  for (double t_total : t_list) {
    if (t_total <= 0.0) throw ConfigError("sweep_duration: duration must be positive");
    CampaignSpec base = spec;
    GlitchWaveform& g = base.glitch;
    if (t_total >= g.t_r + g.t_f) {
      g.t_g = t_total - g.t_r - g.t_f;
    } else {
      // Too short for the template's edges: degenerate to a triangle.
      g.t_r = g.t_f = 0.5 * t_total;
      g.t_g = 0.0;
    }
    const bool guarded = nyquist_margin(spec.regulator->f_sw, g).is_protected;
    for (int n : n_list) {
      if (n == 0) {
        const FaultCampaignResult r = run_campaign(unprotected(base));
        rows.push_back({t_total, 0, r.max_peak_deviation, guarded});
      } else {
        const FaultCampaignResult r = run_campaign(with_phases(base, n));
        rows.push_back({t_total, n, r.max_peak_deviation, guarded});
      }
    }
  }
  return rows;
}

CampaignSpec default_scenario() {
  CampaignSpec s;
  s.trials = 2000;
  s.base_seed = 0x5eed;
  s.load = LoadModel::sbox_default();
  s.regulator = RegulatorConfig::from_total(1, 200e-12, 0.1, 60e6);
  // The dead time suppresses the resampling kick a freshly connecting phase
  // delivers when a glitch straddles a clock edge; without it the N = 4 worst
  // case sits within 3% of the N = 1 typical coupling and the fault-rate
  // ordering across phase counts becomes threshold noise.
  s.regulator->epsilon_nonoverlap = 1e-9;
  const double t_s = s.regulator->t_s();
  s.fault_model.v_fault_low = s.load.v_tol_low;
  s.fault_model.v_fault_high = s.load.v_tol_high;
  s.fault_model.window_start = 6.0 * t_s;
  s.fault_model.window_end = 8.0 * t_s;
  s.glitch.nominal_v = 1.8;
  s.glitch.amplitude = 2.0;
  s.glitch.t_start = 6.0 * t_s;  // randomized over one period per trial
  s.glitch.t_r = 500e-12;
  s.glitch.t_g = 1e-9;
  s.glitch.t_f = 500e-12;
  s.key = block_from_hex("000102030405060708090a0b0c0d0e0f");
  s.plaintext = block_from_hex("00112233445566778899aabbccddeeff");
  return s;
}

CampaignSpec capacitor_scenario() {
  CampaignSpec s = default_scenario();
  s.trials = 64;
  // Light constant load and a small output capacitor: the sweep then tracks
  // the flying-capacitor coupling knee instead of DC sag.
  s.load.p_avg = s.load.p_min = s.load.p_max = 1e-6;
  s.load.r_l = s.load.v_nominal * s.load.v_nominal / s.load.p_avg;
  s.load.c_out = 250e-12;
  s.regulator = RegulatorConfig::from_total(1, 500e-15, 0.75, 60e6);
  return s;
}

}  // namespace mpvr
