// mpvr-cli: simulate, analyze, campaign, sweep, check.
//
// Exit codes: 0 ok; 1 usage/config error; 2 numerical/simulation error;
// 3 invariant violation found by self-checks.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpvr/attenuation.hpp"
#include "mpvr/campaign.hpp"
#include "mpvr/config.hpp"
#include "mpvr/errors.hpp"
#include "mpvr/io.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out_dir;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "INI config file");
  cmd->add_option("--set", o.overrides, "override: section.key=value")->take_all();
  cmd->add_option("--seed", o.seed, "base seed (u64)");
  cmd->add_option("--trials", o.trials, "trial count");
  cmd->add_option("--out", o.out_dir, "output directory (default: stdout)");
  cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
}

mpvr::CampaignSpec build_spec(const CommonOpts& o) {
  mpvr::CampaignSpec spec = o.config_path.empty() ? mpvr::default_scenario()
                                                  : mpvr::load_config(o.config_path);
  spec = mpvr::apply_overrides(std::move(spec), o.overrides);
  if (o.seed) spec.base_seed = *o.seed;
  if (o.trials) spec.trials = *o.trials;
  return spec;
}

void emit(const CommonOpts& o, const std::string& name, const std::string& bytes) {
  if (o.out_dir.empty()) {
    std::cout << bytes;
    return;
  }
  std::filesystem::create_directories(o.out_dir);
  const auto path = std::filesystem::path(o.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw mpvr::ConfigError("cannot write '" + path.string() + "'");
  f << bytes;
  std::cerr << "wrote " << path.string() << '\n';
}

int cmd_simulate(const CommonOpts& o) {
  const mpvr::CampaignSpec spec = build_spec(o);
  const double dt = spec.resolved_dt();
  const double duration = spec.resolved_duration();
  const mpvr::SimulationTrace tr =
      spec.regulator
          ? mpvr::simulate(*spec.regulator, spec.load, spec.glitch, duration, dt,
                           spec.base_seed)
          : mpvr::passthrough_trace(spec.load, spec.glitch, duration, dt);

  mpvr::CsvTable t;
  t.comments.push_back("single transient, seed " + std::to_string(spec.base_seed));
  if (spec.regulator)
    t.comments.push_back("n_phases " + std::to_string(spec.regulator->n_phases) +
                         ", c_tot " + mpvr::format_number(spec.regulator->c_tot()) +
                         ", f_sw " + mpvr::format_number(spec.regulator->f_sw));
  if (tr.steady_state_reached_at)
    t.comments.push_back("steady_state_at " + mpvr::format_number(*tr.steady_state_reached_at));
  t.header = {"t", "v_in", "v_out"};
  for (std::size_t i = 0; i < tr.v_out.size(); ++i)
    t.add_row({mpvr::format_number(tr.time_at(i)), mpvr::format_number(tr.v_in[i]),
               mpvr::format_number(tr.v_out[i])});
  emit(o, "trace.csv", mpvr::to_csv(t));
  return 0;
}

int cmd_analyze(const CommonOpts& o) {
  const mpvr::CampaignSpec spec = build_spec(o);
  if (!spec.regulator) throw mpvr::ConfigError("analyze: needs a regulator config");
  const mpvr::RegulatorConfig& reg = *spec.regulator;

  {  // LPF transfer over a log frequency grid
    mpvr::CsvTable t;
    t.header = {"f_hz", "gain_optimal", "gain_general"};
    const double f3 = mpvr::cutoff_frequency(spec.load, reg.c_tot());
    t.comments.push_back("f_3db " + mpvr::format_number(f3));
    for (int i = 0; i <= 60; ++i) {
      const double f = 1e3 * std::pow(10.0, i / 10.0);
      t.add_row({mpvr::format_number(f),
                 mpvr::format_number(mpvr::lpf_transfer_magnitude(reg, spec.load, f)),
                 mpvr::format_number(mpvr::lpf_transfer_magnitude_general(reg, spec.load, f))});
    }
    emit(o, "lpf.csv", mpvr::to_csv(t));
  }
  {  // moving-average response of the phase-sampling filter
    mpvr::CsvTable t;
    t.header = {"f_hz", "response"};
    const double fs = reg.n_phases * reg.f_sw;
    t.comments.push_back("n_taps " + std::to_string(reg.n_phases) + ", sample_rate " +
                         mpvr::format_number(fs));
    for (int i = 0; i <= 200; ++i) {
      const double f = fs * i / 200.0;
      t.add_row({mpvr::format_number(f),
                 mpvr::format_number(mpvr::moving_average_response(reg.n_phases, fs, f))});
    }
    emit(o, "fir.csv", mpvr::to_csv(t));
  }
  {  // transmitted glitch energy and overhead vs phase count
    mpvr::CsvTable t;
    t.header = {"n_phases", "energy_j", "precondition_ok", "area_pct", "efficiency_pct"};
    const std::vector<int> n_list = {1, 2, 4, 8, 16, 24, 32};
    const auto rows = mpvr::energy_vs_phases(spec.glitch, reg.c_tot(), reg.f_sw, n_list);
    for (const auto& r : rows) {
      const mpvr::Overhead oh = mpvr::overhead_estimate(r.n);
      t.add_row({std::to_string(r.n), mpvr::format_number(r.energy_joules),
                 r.precondition_ok ? "1" : "0", mpvr::format_number(oh.area_pct),
                 mpvr::format_number(oh.efficiency_pct)});
    }
    const mpvr::NyquistMargin nm = mpvr::nyquist_margin(reg.f_sw, spec.glitch);
    t.comments.push_back("nyquist_guard_s " + mpvr::format_number(nm.max_protected_duration) +
                         (nm.is_protected ? " (glitch inside guard)" : " (glitch exceeds guard)"));
    emit(o, "energy.csv", mpvr::to_csv(t));
  }
  return 0;
}

json summary_json(const mpvr::CampaignSpec& spec, const mpvr::FaultCampaignResult& r) {
  return json{{"trials", r.trials},
              {"base_seed", spec.base_seed},
              {"faults", r.faults},
              {"contaminated", r.contaminated_count},
              {"exploitable", r.exploitable},
              {"errors", r.error_count},
              {"success_rate_pct", r.success_rate_pct},
              {"fault_coverage_pct", r.fault_coverage_pct},
              {"exploitable_rate_pct", r.exploitable_rate_pct},
              {"max_peak_deviation_v", r.max_peak_deviation}};
}

int cmd_campaign(const CommonOpts& o) {
  const mpvr::CampaignSpec spec = build_spec(o);
  const mpvr::FaultCampaignResult r = mpvr::run_campaign(spec);

  mpvr::CsvTable t;
  t.header = {"seed", "faulted", "contaminated", "peak_deviation_v", "error"};
  for (const auto& rec : r.per_trial)
    t.add_row({std::to_string(rec.seed), rec.faulted ? "1" : "0",
               rec.contaminated ? "1" : "0", mpvr::format_number(rec.peak_deviation),
               rec.error});
  const json summary = summary_json(spec, r);
  if (o.out_dir.empty()) {
    std::cout << summary.dump(2) << '\n';
    if (o.format == "csv") std::cout << mpvr::to_csv(t);
  } else {
    emit(o, "summary.json", summary.dump(2) + "\n");
    emit(o, "trials.csv", mpvr::to_csv(t));
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& axis) {
  const mpvr::CampaignSpec spec = build_spec(o);
  mpvr::CsvTable t;
  if (axis == "phases") {
    const auto res = mpvr::sweep_phases(spec, {1, 2, 4, 8, 16, 32});
    t.comments.push_back(std::string("coverage_monotone ") +
                         (res.coverage_monotone ? "yes" : "no"));
    t.header = {"n_phases", "success_rate_pct", "coverage_pct", "peak_deviation_v"};
    for (const auto& r : res.rows)
      t.add_row({std::to_string(r.n_phases), mpvr::format_number(r.success_rate_pct),
                 mpvr::format_number(r.coverage_pct), mpvr::format_number(r.peak_deviation)});
  } else if (axis == "capacitor") {
    std::vector<double> c_list;
    for (int i = 0; i <= 12; ++i)
      c_list.push_back(500e-15 * std::pow(3e-9 / 500e-15, i / 12.0));
    const auto res = mpvr::sweep_capacitor(spec, c_list);
    t.comments.push_back("first_octave_slope " + mpvr::format_number(res.first_octave_slope));
    t.comments.push_back("last_octave_slope " + mpvr::format_number(res.last_octave_slope));
    if (res.saturation_c)
      t.comments.push_back("saturation_c " + mpvr::format_number(*res.saturation_c));
    t.header = {"c_tot_f", "peak_deviation_v", "energy_j"};
    for (const auto& r : res.rows)
      t.add_row({mpvr::format_number(r.c_tot), mpvr::format_number(r.peak_deviation),
                 mpvr::format_number(r.energy_joules)});
  } else if (axis == "frequency") {
    std::vector<double> f_list;
    for (int i = 0; i <= 6; ++i) f_list.push_back(30e6 + 5e6 * i);
    const auto rows = mpvr::sweep_frequency(spec, f_list, {1, 32});
    t.header = {"f_sw_hz", "n_phases", "peak_deviation_v"};
    for (const auto& r : rows)
      t.add_row({mpvr::format_number(r.f_sw), std::to_string(r.n_phases),
                 mpvr::format_number(r.peak_deviation)});
  } else if (axis == "duration") {
    std::vector<double> t_list;
    for (int i = 1; i <= 31; i += 2) t_list.push_back(i * 1e-9);
    const auto rows = mpvr::sweep_duration(spec, t_list, {0, 1, 16, 32});
    if (spec.regulator)
      t.comments.push_back(
          "nyquist_guard_s " +
          mpvr::format_number(1.0 / (2.0 * spec.regulator->f_sw)));
    t.header = {"t_total_s", "n_phases", "peak_deviation_v", "nyquist_protected"};
    for (const auto& r : rows)
      t.add_row({mpvr::format_number(r.t_total), std::to_string(r.n_phases),
                 mpvr::format_number(r.peak_deviation), r.nyquist_protected ? "1" : "0"});
  } else {
    throw mpvr::ConfigError("sweep: unknown axis '" + axis + "'");
  }
  emit(o, "sweep_" + axis + ".csv", mpvr::to_csv(t));
  return 0;
}

int cmd_check(const CommonOpts& o) {
  const mpvr::CampaignSpec spec = build_spec(o);
  spec.validate();
  bool ok = true;

  const auto violations = mpvr::check_attacker_model(spec.glitch, spec.load.cc_clock_hz,
                                                     spec.load.v_nominal);
  if (violations.empty()) {
    std::cout << "attacker-model: ok\n";
  } else {
    ok = false;
    for (const auto v : violations)
      std::cout << "attacker-model: violation: " << mpvr::to_string(v) << '\n';
  }

  if (spec.detector) {
    const bool sound = spec.detector->v_ref_low >= spec.fault_model.v_fault_low &&
                       spec.detector->v_ref_high <= spec.fault_model.v_fault_high;
    std::cout << "detector-soundness: "
              << (sound ? "ok (detector window inside fault window)"
                        : "violated (faults can escape detection)")
              << '\n';
    if (!sound) ok = false;
  } else {
    std::cout << "detector-soundness: skipped (no detector)\n";
  }

  if (spec.regulator) {
    const mpvr::NyquistMargin nm = mpvr::nyquist_margin(spec.regulator->f_sw, spec.glitch);
    std::cout << "nyquist-guard: glitch "
              << (nm.is_protected ? "inside" : "exceeds") << " the "
              << mpvr::format_number(nm.max_protected_duration) << " s guard\n";
  }

  if (!ok) throw mpvr::InvariantViolation("check: self-check failed");
  std::cout << "check: all ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"behavioral MPVR / voltage-glitch attack toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string sweep_axis;

  CLI::App* sim = app.add_subcommand("simulate", "single transient to CSV");
  CLI::App* ana = app.add_subcommand("analyze", "LPF/FIR/energy/overhead tables");
  CLI::App* cam = app.add_subcommand("campaign", "Monte Carlo fault campaign");
  CLI::App* swp = app.add_subcommand("sweep", "parameter sweep");
  swp->add_option("axis", sweep_axis, "phases|capacitor|frequency|duration")
      ->required()
      ->check(CLI::IsMember({"phases", "capacitor", "frequency", "duration"}));
  CLI::App* chk = app.add_subcommand("check", "attacker-model and soundness checks");
  for (CLI::App* c : {sim, ana, cam, swp, chk}) add_common(c, opts);

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(opts);
    if (ana->parsed()) return cmd_analyze(opts);
    if (cam->parsed()) return cmd_campaign(opts);
    if (swp->parsed()) return cmd_sweep(opts, sweep_axis);
    if (chk->parsed()) return cmd_check(opts);
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const mpvr::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const mpvr::ResolutionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const mpvr::SimulationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const mpvr::InvariantViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
