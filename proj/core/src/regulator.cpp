#include "mpvr/regulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mpvr/errors.hpp"
#include "mpvr/rng.hpp"

namespace mpvr {

void RegulatorConfig::validate() const {
  if (n_phases < 1) throw ConfigError("regulator: n_phases must be >= 1");
  if (c_fly_per_phase <= 0.0) throw ConfigError("regulator: c_fly_per_phase must be positive");
  if (r_on <= 0.0) throw ConfigError("regulator: r_on must be positive");
  if (f_sw <= 0.0) throw ConfigError("regulator: f_sw must be positive");
  if (beta_top <= 0.0 || gamma_top <= 0.0)
    throw ConfigError("regulator: topology constants must be positive");
  if (epsilon_nonoverlap < 0.0 || epsilon_nonoverlap >= 0.5 * t_s())
    throw ConfigError("regulator: epsilon_nonoverlap must be in [0, T_s/2)");
}

RegulatorConfig RegulatorConfig::from_total(int n_phases, double c_tot, double r_on,
                                            double f_sw) {
  RegulatorConfig cfg;
  cfg.n_phases = n_phases;
  cfg.c_fly_per_phase = c_tot / n_phases;
  cfg.r_on = r_on;
  cfg.f_sw = f_sw;
  return cfg;
}

void LoadModel::validate() const {
  if (r_l <= 0.0) throw ConfigError("load: r_l must be positive");
  if (c_l < 0.0 || c_out < 0.0) throw ConfigError("load: capacitances must be non-negative");
  if (!(p_min <= p_avg && p_avg <= p_max)) throw ConfigError("load: need p_min <= p_avg <= p_max");
  if (!(v_tol_low < v_nominal && v_nominal < v_tol_high))
    throw ConfigError("load: tolerance window must bracket v_nominal");
  if (cc_clock_hz <= 0.0) throw ConfigError("load: cc_clock_hz must be positive");
}

LoadModel LoadModel::sbox_default() {
  LoadModel m;
  m.v_nominal = 0.9;
  m.p_avg = 256e-6;
  m.p_min = 156.3e-6;
  m.p_max = 387.22e-6;
  m.r_l = m.v_nominal * m.v_nominal / m.p_avg;
  m.c_l = 50e-15;
  m.c_out = 3.65e-9;
  m.v_tol_low = 0.9 * m.v_nominal;
  m.v_tol_high = 1.1 * m.v_nominal;
  m.cc_clock_hz = 200e6;
  return m;
}

EquivalentImpedance equivalent_impedance(const RegulatorConfig& cfg) {
  cfg.validate();
  EquivalentImpedance z;
  z.r_fsl = cfg.beta_top * cfg.r_on;
  z.r_ssl = cfg.gamma_top / (cfg.c_tot() * cfg.f_sw);
  z.r_eq = std::hypot(z.r_fsl, z.r_ssl);
  return z;
}

double lpf_transfer_magnitude(const RegulatorConfig& cfg, const LoadModel& load,
                              double f_in, bool optimal_region_assumed) {
  if (!optimal_region_assumed)
    throw ConfigError(
        "lpf_transfer_magnitude requires the optimal-region assumption; "
        "use lpf_transfer_magnitude_general otherwise");
  cfg.validate();
  load.validate();
  if (f_in < 0.0) throw ConfigError("lpf: f_in must be non-negative");
  const double c = load.c_l + load.c_out + cfg.c_tot();
  const double w = 2.0 * std::numbers::pi * f_in * load.r_l * c;
  return 1.0 / std::sqrt(1.0 + w * w);
}

double lpf_transfer_magnitude_general(const RegulatorConfig& cfg, const LoadModel& load,
                                      double f_in) {
  load.validate();
  if (f_in < 0.0) throw ConfigError("lpf: f_in must be non-negative");
  const double ratio = equivalent_impedance(cfg).r_eq / load.r_l;
  const double c = load.c_l + load.c_out + cfg.c_tot();
  const double w = 2.0 * std::numbers::pi * f_in * load.r_l * c;
  return 1.0 / std::sqrt(ratio * ratio + w * w);
}

double cutoff_frequency(const LoadModel& load, double c_eq) {
  const double c = load.c_l + load.c_out + c_eq;
  if (load.r_l <= 0.0 || c <= 0.0)
    throw ConfigError("cutoff_frequency: need positive r_l and total capacitance");
  return 1.0 / (2.0 * std::numbers::pi * load.r_l * c);
}

std::size_t SimulationTrace::index_at(double t) const {
  if (t < t0 || t > t0 + duration() + dt)
    throw SimulationError("trace: time outside trace");
  const double i = (t - t0) / dt;
  return std::min(static_cast<std::size_t>(i + 0.5), v_out.size() - 1);
}

namespace {

enum class PhaseState { kCharge, kDischarge, kDead };

inline PhaseState phase_state(double local, double half, double t_s, double eps) {
  if (local < half - eps) return PhaseState::kCharge;
  if (local >= half && local < t_s - eps) return PhaseState::kDischarge;
  return PhaseState::kDead;
}

}  // namespace

SimulationTrace simulate(const RegulatorConfig& cfg, const LoadModel& load,
                         const GlitchWaveform& supply, double duration, double dt,
                         std::uint64_t seed) {
  cfg.validate();
  load.validate();
  supply.validate();
  const double t_s = cfg.t_s();
  if (dt <= 0.0 || dt > t_s / (200.0 * cfg.n_phases) * (1.0 + 1e-9))
    throw ResolutionError("simulate: dt must satisfy dt <= T_s/(200*n_phases)");
  if (duration < 10.0 * t_s)
    throw ResolutionError("simulate: duration must cover at least 10 switching periods");

  const int n = cfg.n_phases;
  const double c_fly = cfg.c_fly_per_phase;
  const double half = 0.5 * t_s;
  const double eps = cfg.epsilon_nonoverlap;
  const double c_node = load.c_out + load.c_l;
  if (c_node <= 0.0) throw ConfigError("simulate: c_out + c_l must be positive");

  const double tau = 2.0 * cfg.r_on * c_fly;
  const double relax = 1.0 - std::exp(-dt / tau);  // fraction of gap closed per step
  const double k_branch = c_fly * relax;

  const double v_in0 = supply.nominal_v;
  const double v_peak = v_in0 + std::max(0.0, supply.amplitude);
  const double v_floor = 1e-3;

  const auto n_steps = static_cast<std::size_t>(std::floor(duration / dt));

  SimulationTrace tr;
  tr.dt = dt;
  tr.t0 = 0.0;
  tr.v_nominal = load.v_nominal;
  tr.c_node = c_node;
  tr.v_out.reserve(n_steps + 1);
  tr.v_in.reserve(n_steps + 1);

  // Warm start at the ideal 2:1 operating point.
  double v_out = 0.5 * v_in0;
  std::vector<double> v_fly(n, 0.5 * v_in0);
  std::vector<double> local(n);   // per-phase clock position in [0, T_s)
  std::vector<PhaseState> prev_state(n);
  for (int i = 0; i < n; ++i) {
    const double off = static_cast<double>(i) * t_s / n;
    local[i] = std::fmod(t_s - off, t_s);
    prev_state[i] = phase_state(local[i], half, t_s, eps);
  }

  // Seeded piecewise-constant load power, one draw per CC clock cycle.
  Rng load_rng(derive_seed(seed, 0x10ad));
  const double t_cc = 1.0 / load.cc_clock_hz;
  double p_now = (load.p_min == load.p_max) ? load.p_min
                                            : load_rng.uniform(load.p_min, load.p_max);
  double next_resample = t_cc;

  // Steady-state detection: period-averaged v_out change < 0.1 mV between
  // consecutive T_s windows.
  const auto steps_per_period = static_cast<std::size_t>(std::llround(t_s / dt));
  double window_sum = 0.0;
  double prev_window_avg = 0.0;
  bool have_prev_window = false;
  std::size_t window_count = 0;

  const double charge_scale = std::max(load.p_avg / load.v_nominal, 1e-9) * t_s;

  tr.v_out.push_back(v_out);
  tr.v_in.push_back(glitch_value(supply, 0.0));

  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    const double v_sup = glitch_value(supply, t + 0.5 * dt);

    if (t >= next_resample) {
      if (load.p_min != load.p_max) p_now = load_rng.uniform(load.p_min, load.p_max);
      next_resample += t_cc;
    }
    const double q_load = p_now / std::max(v_out, v_floor) * dt;

    // Connected-branch sums for the implicit node update: the new node
    // voltage x satisfies
    //   c_node (x - v) = sum_charge k (v_sup - x - w) + sum_dis k (w - x) - q_load.
    double sum_drive = 0.0;
    int m_connected = 0;
    for (int i = 0; i < n; ++i) {
      const PhaseState st = phase_state(local[i], half, t_s, eps);
      if (st == PhaseState::kCharge) {
        sum_drive += v_sup - v_fly[i];
        ++m_connected;
      } else if (st == PhaseState::kDischarge) {
        sum_drive += v_fly[i];
        ++m_connected;
      }
      if (st != prev_state[i]) {
        if (st == PhaseState::kCharge)
          tr.phase_events.push_back({t, i, true});
        else if (prev_state[i] == PhaseState::kCharge)
          tr.phase_events.push_back({t, i, false});
        prev_state[i] = st;
      }
    }

    const double x = (c_node * v_out + k_branch * sum_drive - q_load) /
                     (c_node + k_branch * m_connected);

    double dq_phases = 0.0;
    for (int i = 0; i < n; ++i) {
      const PhaseState st = prev_state[i];
      if (st == PhaseState::kCharge) {
        const double dw = relax * ((v_sup - x) - v_fly[i]);
        v_fly[i] += dw;
        dq_phases += c_fly * dw;  // series path: supply charge flows into the node
      } else if (st == PhaseState::kDischarge) {
        const double dw = relax * (x - v_fly[i]);
        v_fly[i] += dw;
        dq_phases -= c_fly * dw;
      }
      local[i] += dt;
      if (local[i] >= t_s) local[i] -= t_s;
    }

    const double imbalance =
        std::abs(c_node * (x - v_out) - (dq_phases - q_load)) / charge_scale;
    tr.max_step_charge_imbalance = std::max(tr.max_step_charge_imbalance, imbalance);
    tr.charge_from_phases += dq_phases;
    tr.charge_to_load += q_load;

    v_out = x;
    if (v_out < 0.0 || v_out > 2.0 * v_peak)
      throw SimulationError("simulate: output voltage left [0, 2*v_in_peak]");

    tr.v_out.push_back(v_out);
    tr.v_in.push_back(v_sup);

    window_sum += v_out;
    if (++window_count == steps_per_period) {
      const double avg = window_sum / static_cast<double>(steps_per_period);
      if (have_prev_window && !tr.steady_state_reached_at &&
          std::abs(avg - prev_window_avg) < 0.1e-3)
        tr.steady_state_reached_at = t + dt;
      prev_window_avg = avg;
      have_prev_window = true;
      window_sum = 0.0;
      window_count = 0;
    }
  }
  return tr;
}

SimulationTrace passthrough_trace(const LoadModel& load, const GlitchWaveform& supply,
                                  double duration, double dt) {
  SampledTrace s = sample(supply, dt, duration);
  SimulationTrace tr;
  tr.dt = dt;
  tr.t0 = s.t0;
  tr.v_out = s.samples;
  tr.v_in = std::move(s.samples);
  tr.v_nominal = load.v_nominal;
  tr.c_node = load.c_l;
  tr.steady_state_reached_at = 0.0;
  return tr;
}

double peak_glitch_at_load(const SimulationTrace& trace, double v_nominal) {
  if (!trace.steady_state_reached_at)
    throw SimulationError("peak_glitch_at_load: steady state never reached");
  const std::size_t start = trace.index_at(*trace.steady_state_reached_at);
  double peak = 0.0;
  for (std::size_t i = start; i < trace.v_out.size(); ++i)
    peak = std::max(peak, std::abs(trace.v_out[i] - v_nominal));
  return peak;
}

double output_ripple(const SimulationTrace& trace, double t_s) {
  if (!trace.steady_state_reached_at)
    throw SimulationError("output_ripple: steady state never reached");
  const auto span = static_cast<std::size_t>(std::llround(t_s / trace.dt));
  if (span == 0 || span >= trace.v_out.size())
    throw SimulationError("output_ripple: trace shorter than one switching period");
  const std::size_t end = trace.v_out.size();
  double lo = trace.v_out[end - span], hi = lo;
  for (std::size_t i = end - span; i < end; ++i) {
    lo = std::min(lo, trace.v_out[i]);
    hi = std::max(hi, trace.v_out[i]);
  }
  return hi - lo;
}

OperatingPointResult optimize_operating_point(const LoadModel& load, double c_tot_budget,
                                              ParameterRange r_on_range,
                                              ParameterRange f_sw_range, int n_phases) {
  load.validate();
  if (c_tot_budget <= 0.0) throw ConfigError("optimize: c_tot_budget must be positive");
  if (r_on_range.lo <= 0.0 || r_on_range.hi < r_on_range.lo ||
      f_sw_range.lo <= 0.0 || f_sw_range.hi < f_sw_range.lo)
    throw ConfigError("optimize: parameter ranges must be positive and ordered");

  constexpr int kGrid = 96;
  auto grid_point = [](const ParameterRange& r, int i) {
    if (r.hi == r.lo) return r.lo;
    const double f = static_cast<double>(i) / (kGrid - 1);
    return r.lo * std::pow(r.hi / r.lo, f);  // log-spaced
  };

  bool found = false;
  RegulatorConfig best;
  double best_primary = 0.0, best_balance = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      RegulatorConfig cfg = RegulatorConfig::from_total(
          n_phases, c_tot_budget, grid_point(r_on_range, i), grid_point(f_sw_range, j));
      const EquivalentImpedance z = equivalent_impedance(cfg);
      const double primary = std::abs(z.r_eq / load.r_l - 1.0);
      const double balance = std::abs(std::log(z.r_fsl / z.r_ssl));
      const bool better =
          !found || primary < best_primary - 1e-9 ||
          (primary < best_primary + 1e-9 &&
           (balance < best_balance - 1e-9 ||
            (balance < best_balance + 1e-9 && cfg.f_sw < best.f_sw)));
      if (better) {
        found = true;
        best = cfg;
        best_primary = primary;
        best_balance = balance;
      }
    }
  }
  const double ratio = equivalent_impedance(best).r_eq / load.r_l;
  if (ratio < 0.5 || ratio > 2.0)
    throw SimulationError("optimize: no operating point achieves r_eq/r_l within [0.5, 2]");
  return {best, ratio};
}

double balanced_switching_frequency(double c_tot, double beta_top, double gamma_top,
                                    double r_on) {
  if (c_tot <= 0.0 || beta_top <= 0.0 || gamma_top <= 0.0 || r_on <= 0.0)
    throw ConfigError("balanced_switching_frequency: parameters must be positive");
  return gamma_top / (c_tot * beta_top * r_on);
}

Overhead overhead_estimate(int n_phases) {
  static constexpr int kN[] = {1, 2, 4, 8, 16, 24, 32};
  static constexpr double kArea[] = {0.0, 2.62, 3.93, 4.58, 4.9, 5.02, 5.07};
  static constexpr double kEff[] = {84.4, 84.54, 84.68, 84.9, 85.56, 86.0, 85.41};
  if (n_phases < 1 || n_phases > 64)
    throw ConfigError("overhead_estimate: n_phases must be in [1, 64]");
  for (int i = 0; i < 7; ++i)
    if (kN[i] == n_phases) return {kArea[i], kEff[i]};

  // Between (or just past) the anchors: linear in ln(n), which saturates the
  // area curve the way the measured rows do. Beyond 32 the last segment's
  // slope is extended.
  int seg = 5;  // default: extend [24, 32]
  for (int i = 0; i < 6; ++i)
    if (n_phases > kN[i] && n_phases < kN[i + 1]) seg = i;
  const double x0 = std::log(static_cast<double>(kN[seg]));
  const double x1 = std::log(static_cast<double>(kN[seg + 1]));
  const double f = (std::log(static_cast<double>(n_phases)) - x0) / (x1 - x0);
  return {kArea[seg] + f * (kArea[seg + 1] - kArea[seg]),
          kEff[seg] + f * (kEff[seg + 1] - kEff[seg])};
}

}  // namespace mpvr
