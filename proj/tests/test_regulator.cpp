#include <cmath>

#include "doctest.h"
#include "mpvr/errors.hpp"
#include "mpvr/regulator.hpp"

using namespace mpvr;

namespace {

GlitchWaveform flat_supply(double v) {
  GlitchWaveform g;
  g.nominal_v = v;
  return g;
}

LoadModel constant_load(double r_l, double c_l, double c_out, double p, double v_nom) {
  LoadModel load;
  load.r_l = r_l;
  load.c_l = c_l;
  load.c_out = c_out;
  load.p_avg = load.p_min = load.p_max = p;
  load.v_nominal = v_nom;
  load.v_tol_low = 0.9 * v_nom;
  load.v_tol_high = 1.1 * v_nom;
  return load;
}

}  // namespace

TEST_CASE("equivalent impedance, hand-computed") {
  RegulatorConfig cfg = RegulatorConfig::from_total(1, 1e-9, 1.0, 50e6);
  const EquivalentImpedance z = equivalent_impedance(cfg);
  CHECK(z.r_fsl == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(z.r_ssl == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(z.r_eq == doctest::Approx(5.385164807134504).epsilon(1e-14));
}

TEST_CASE("impedance is invariant to phase count at fixed C_tot") {
  const EquivalentImpedance a =
      equivalent_impedance(RegulatorConfig::from_total(1, 1e-9, 1.0, 50e6));
  const EquivalentImpedance b =
      equivalent_impedance(RegulatorConfig::from_total(8, 1e-9, 1.0, 50e6));
  CHECK(a.r_eq == doctest::Approx(b.r_eq).epsilon(1e-15));
}

TEST_CASE("LPF magnitude oracles") {
  // c_l + c_out + C_tot = 1 nF, r_l = 1 kOhm, f = 1 MHz
  RegulatorConfig cfg = RegulatorConfig::from_total(1, 0.5e-9, 1.0, 50e6);
  LoadModel load = constant_load(1000.0, 0.3e-9, 0.2e-9, 1e-6, 0.9);
  CHECK(lpf_transfer_magnitude(cfg, load, 1e6) ==
        doctest::Approx(0.15717672547758985).epsilon(1e-14));
  CHECK(lpf_transfer_magnitude_general(cfg, load, 1e6) ==
        doctest::Approx(0.1591547334573357).epsilon(1e-14));
  // DC behavior: optimal-region form passes DC through, general form is the
  // divider floor r_l typically dwarfs.
  CHECK(lpf_transfer_magnitude(cfg, load, 0.0) == doctest::Approx(1.0));
  const double r_eq = equivalent_impedance(cfg).r_eq;
  CHECK(lpf_transfer_magnitude_general(cfg, load, 0.0) ==
        doctest::Approx(load.r_l / r_eq).epsilon(1e-12));
  // monotone decreasing in f
  CHECK(lpf_transfer_magnitude(cfg, load, 2e6) < lpf_transfer_magnitude(cfg, load, 1e6));
}

TEST_CASE("cutoff frequency for the S-box load sizing") {
  LoadModel load = LoadModel::sbox_default();
  CHECK(load.r_l == doctest::Approx(3164.0625).epsilon(1e-12));
  load.c_l = 50e-15;
  load.c_out = 3.65e-9;
  CHECK(cutoff_frequency(load, 1e-9) ==
        doctest::Approx(10817.264657455617).epsilon(1e-12));
}

TEST_CASE("balanced switching frequency") {
  // gamma/(C f) = beta r_on  =>  f = gamma/(C beta r_on)
  CHECK(balanced_switching_frequency(1e-9, 2.0, 0.25, 1.0) ==
        doctest::Approx(125e6).epsilon(1e-12));
  RegulatorConfig cfg = RegulatorConfig::from_total(1, 1e-9, 1.0, 125e6);
  const EquivalentImpedance z = equivalent_impedance(cfg);
  CHECK(z.r_fsl == doctest::Approx(z.r_ssl).epsilon(1e-12));
}

TEST_CASE("overhead table anchors") {
  struct Row {
    int n;
    double area, eff;
  };
  const Row rows[] = {{1, 0.0, 84.4},  {2, 2.62, 84.54},  {4, 3.93, 84.68},
                      {8, 4.58, 84.9}, {16, 4.9, 85.56},  {24, 5.02, 86.0},
                      {32, 5.07, 85.41}};
  for (const Row& r : rows) {
    const Overhead o = overhead_estimate(r.n);
    CHECK(o.area_pct == doctest::Approx(r.area).epsilon(1e-12));
    CHECK(o.efficiency_pct == doctest::Approx(r.eff).epsilon(1e-12));
  }
  // interpolation stays between the bracketing anchors
  const Overhead mid = overhead_estimate(12);
  CHECK(mid.area_pct > 4.58);
  CHECK(mid.area_pct < 4.9);
  CHECK_THROWS_AS(overhead_estimate(0), ConfigError);
  CHECK_THROWS_AS(overhead_estimate(65), ConfigError);
}

TEST_CASE("config validation") {
  RegulatorConfig cfg = RegulatorConfig::from_total(4, 200e-12, 0.1, 60e6);
  CHECK(cfg.c_fly_per_phase == doctest::Approx(50e-12).epsilon(1e-15));
  CHECK(cfg.c_tot() == doctest::Approx(200e-12).epsilon(1e-15));
  CHECK_NOTHROW(cfg.validate());
  cfg.r_on = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(RegulatorConfig::from_total(0, 1e-9, 1.0, 50e6).validate(), ConfigError);
}

TEST_CASE("simulation resolution and duration guards") {
  RegulatorConfig cfg = RegulatorConfig::from_total(2, 200e-12, 0.1, 60e6);
  LoadModel load = constant_load(3164.0625, 50e-15, 1e-9, 256e-6, 0.9);
  const GlitchWaveform g = flat_supply(1.8);
  const double ts = cfg.t_s();
  // dt just above T_s/(200 N)
  CHECK_THROWS_AS(simulate(cfg, load, g, 12 * ts, ts / (200 * 2) * 1.5, 1), ResolutionError);
  // duration below 10 T_s
  CHECK_THROWS_AS(simulate(cfg, load, g, 5 * ts, ts / 1000, 1), ResolutionError);
}

TEST_CASE("unloaded steady state sits at half the rail") {
  RegulatorConfig cfg = RegulatorConfig::from_total(2, 200e-12, 0.1, 60e6);
  // effectively open-circuit load
  LoadModel load = constant_load(1e9, 50e-15, 1e-9, 0.0, 0.9);
  const double ts = cfg.t_s();
  SimulationTrace tr = simulate(cfg, load, flat_supply(1.8), 40 * ts, ts / 1000, 7);
  CHECK(tr.steady_state_reached_at.has_value());
  CHECK(tr.v_out.back() == doctest::Approx(0.9).epsilon(1e-3));
}

TEST_CASE("loaded steady state matches the r_eq droop model") {
  // Constant-power loads drawing through r_eq: V = v_in/2 - I * r_eq with
  // I = P / V, evaluated at nominal. Checked to 5% across a small grid.
  const double v_in = 1.8;
  const double p = 256e-6;
  for (double c_tot : {100e-12, 300e-12, 1e-9}) {
    for (double f_sw : {30e6, 45e6, 60e6}) {
      RegulatorConfig cfg = RegulatorConfig::from_total(1, c_tot, 0.1, f_sw);
      LoadModel load = constant_load(1e9, 50e-15, 1e-9, p, 0.9);
      const double ts = cfg.t_s();
      SimulationTrace tr = simulate(cfg, load, flat_supply(v_in), 60 * ts, ts / 800, 3);
      // mean of the final switching period
      const std::size_t w = static_cast<std::size_t>(ts / tr.dt);
      double mean = 0.0;
      for (std::size_t i = tr.v_out.size() - w; i < tr.v_out.size(); ++i) mean += tr.v_out[i];
      mean /= static_cast<double>(w);
      const double r_eq = equivalent_impedance(cfg).r_eq;
      const double expected = v_in / 2 - (p / 0.9) * r_eq;
      CHECK(mean == doctest::Approx(expected).epsilon(0.05));
      CHECK(tr.max_step_charge_imbalance < 1e-3);
    }
  }
}

TEST_CASE("ripple shrinks with phase count") {
  LoadModel load = constant_load(1e9, 50e-15, 500e-12, 256e-6, 0.9);
  double prev = 1e9;
  for (int n : {1, 4, 16}) {
    RegulatorConfig cfg = RegulatorConfig::from_total(n, 200e-12, 0.1, 60e6);
    const double ts = cfg.t_s();
    SimulationTrace tr =
        simulate(cfg, load, flat_supply(1.8), 40 * ts, ts / (250 * n), 11);
    const double rip = output_ripple(tr, ts);
    CHECK(rip < prev);
    prev = rip;
  }
}

TEST_CASE("operating-point search balances r_eq against the load") {
  LoadModel load = LoadModel::sbox_default();
  // 1 pF budget: r_ssl reaches the kOhm range the S-box load needs
  OperatingPointResult res = optimize_operating_point(
      load, 1e-12, ParameterRange{100.0, 2000.0}, ParameterRange{10e6, 200e6});
  CHECK(res.achieved_ratio == doctest::Approx(1.0).epsilon(0.1));
  const EquivalentImpedance z = equivalent_impedance(res.config);
  CHECK(z.r_eq / load.r_l == doctest::Approx(res.achieved_ratio).epsilon(1e-12));
  // Infeasible: load resistance far below anything the grid reaches.
  LoadModel heavy = constant_load(0.001, 50e-15, 1e-9, 1.0, 0.9);
  CHECK_THROWS_AS(optimize_operating_point(heavy, 1e-12, ParameterRange{10.0, 50.0},
                                           ParameterRange{1e6, 2e6}),
                  SimulationError);
}
