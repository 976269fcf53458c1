#include <cmath>

#include "doctest.h"
#include "mpvr/campaign.hpp"
#include "mpvr/config.hpp"
#include "mpvr/errors.hpp"
#include "mpvr/io.hpp"

using namespace mpvr;

namespace {

CampaignSpec small_default(int trials) {
  CampaignSpec spec = default_scenario();
  spec.trials = trials;
  return spec;
}

}  // namespace

TEST_CASE("rates follow exact integer counts") {
  FaultCampaignResult r = run_campaign(small_default(40));
  int faults = 0, contaminated = 0, exploitable = 0, errors = 0;
  for (const TrialRecord& t : r.per_trial) {
    faults += t.faulted;
    contaminated += t.contaminated;
    exploitable += t.faulted && !t.contaminated;
    errors += !t.error.empty();
  }
  CHECK(r.trials == 40);
  CHECK(static_cast<int>(r.per_trial.size()) == 40);
  CHECK(r.faults == faults);
  CHECK(r.contaminated_count == contaminated);
  CHECK(r.exploitable == exploitable);
  CHECK(r.error_count == errors);
  CHECK(r.error_count == 0);
  CHECK(r.success_rate_pct == 100.0 * faults / 40);
  CHECK(r.fault_coverage_pct == 100.0 - r.success_rate_pct);
  CHECK(r.exploitable_rate_pct == 100.0 * exploitable / 40);
}

TEST_CASE("campaigns are bit-reproducible for a fixed seed") {
  const CampaignSpec spec = small_default(30);
  const FaultCampaignResult a = run_campaign(spec);
  const FaultCampaignResult b = run_campaign(spec);
  REQUIRE(a.per_trial.size() == b.per_trial.size());
  for (std::size_t i = 0; i < a.per_trial.size(); ++i) {
    CHECK(a.per_trial[i].seed == b.per_trial[i].seed);
    CHECK(a.per_trial[i].faulted == b.per_trial[i].faulted);
    CHECK(a.per_trial[i].peak_deviation == b.per_trial[i].peak_deviation);
  }
  CHECK(a.max_peak_deviation == b.max_peak_deviation);
  // a different base seed changes the trial stream
  CampaignSpec other = spec;
  other.base_seed ^= 0x1234;
  const FaultCampaignResult c = run_campaign(other);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.per_trial.size(); ++i)
    any_diff |= a.per_trial[i].peak_deviation != c.per_trial[i].peak_deviation;
  CHECK(any_diff);
}

TEST_CASE("unprotected target faults on every aligned glitch") {
  CampaignSpec spec = small_default(20);
  spec.regulator.reset();
  spec.detector.reset();
  spec.randomize_t_start = false;
  // rail-referred glitch: +0.9 V on the 0.9 V load rail, inside the window
  spec.glitch.nominal_v = 0.9;
  spec.glitch.amplitude = 0.9;
  const FaultCampaignResult r = run_campaign(spec);
  CHECK(r.success_rate_pct == 100.0);
  CHECK(r.fault_coverage_pct == 0.0);
}

TEST_CASE("phase sweep rows reproduce standalone campaigns") {
  CampaignSpec spec = small_default(24);
  const PhaseSweepResult sw = sweep_phases(spec, {1, 4}, /*include_unprotected=*/false);
  REQUIRE(sw.rows.size() == 2);
  for (const PhaseSweepRow& row : sw.rows) {
    CampaignSpec one = spec;
    one.regulator = RegulatorConfig::from_total(row.n_phases, spec.regulator->c_tot(),
                                                spec.regulator->r_on, spec.regulator->f_sw);
    one.regulator->epsilon_nonoverlap = spec.regulator->epsilon_nonoverlap;
    one.dt = 0.0;  // re-resolve for the new phase count
    const FaultCampaignResult r = run_campaign(one);
    CHECK(row.success_rate_pct == r.success_rate_pct);
    CHECK(row.coverage_pct == r.fault_coverage_pct);
    CHECK(row.peak_deviation == r.max_peak_deviation);
  }
}

TEST_CASE("config parsing") {
  const std::string text =
      "# stock scenario with a few overrides\n"
      "[campaign]\n"
      "trials = 12\n"
      "seed = 77\n"
      "randomize_t_start = false\n"
      "[regulator]\n"
      "n_phases = 4\n"
      "c_tot = 200e-12\n"
      "[fault]\n"
      "effect = bit_flip\n"
      "bit_flips = 2\n";
  const CampaignSpec spec = parse_config(text);
  CHECK(spec.trials == 12);
  CHECK(spec.base_seed == 77);
  CHECK_FALSE(spec.randomize_t_start);
  REQUIRE(spec.regulator.has_value());
  CHECK(spec.regulator->n_phases == 4);
  CHECK(spec.regulator->c_tot() == doctest::Approx(200e-12).epsilon(1e-12));
  CHECK(spec.fault_model.effect == FaultEffect::kBitFlipCount);
  CHECK(spec.fault_model.bit_flip_count == 2);

  CHECK_THROWS_AS(parse_config("[campaign]\nbogus_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[bogus_section]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[campaign]\ntrials = twelve\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("no section header\n"), ConfigError);
}

TEST_CASE("overrides use the same grammar") {
  CampaignSpec spec = default_scenario();
  spec = apply_overrides(spec, {"campaign.trials=9", "regulator.n_phases=8",
                                "glitch.amplitude=1.5"});
  CHECK(spec.trials == 9);
  CHECK(spec.regulator->n_phases == 8);
  CHECK(spec.glitch.amplitude == doctest::Approx(1.5));
  CHECK_THROWS_AS(apply_overrides(spec, {"campaign.unknown=1"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(spec, {"missing_equals"}), ConfigError);
}

TEST_CASE("csv writer") {
  CsvTable t;
  t.header = {"n", "value"};
  t.comments = {"generated by a test"};
  t.add_row({"1", format_number(0.5)});
  t.add_row({"2", format_number(2.5e-7)});
  const std::string text = to_csv(t);
  CHECK(text == "# generated by a test\nn,value\n1,0.5\n2,2.5e-07\n");
  // uneven rows are rejected
  CHECK_THROWS_AS(t.add_row({"only-one"}), InvariantViolation);
  // round-trip
  const CsvTable back = parse_csv(text);
  REQUIRE(back.header == t.header);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[1][1] == "2.5e-07");
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ConfigError);
}

TEST_CASE("spec validation and resolution") {
  CampaignSpec spec = default_scenario();
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.resolved_dt() > 0.0);
  CHECK(spec.resolved_dt() <= spec.regulator->t_s() / (200 * spec.regulator->n_phases));
  CHECK(spec.resolved_duration() >= 10 * spec.regulator->t_s());
  spec.trials = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}
