#include <set>
#include <utility>

#include "doctest.h"
#include "mpvr/errors.hpp"
#include "mpvr/infective.hpp"
#include "mpvr/regulator.hpp"

using namespace mpvr;

namespace {

const Block kKey = block_from_hex("000102030405060708090a0b0c0d0e0f");
const Block kPt = block_from_hex("00112233445566778899aabbccddeeff");

SimulationTrace flat_trace(double v, double extra_dip = 0.0, double dip_at = 30e-9) {
  LoadModel load = LoadModel::sbox_default();
  GlitchWaveform g;
  g.nominal_v = v;
  g.amplitude = extra_dip;
  g.t_start = dip_at;
  g.t_r = 1e-9;
  g.t_g = 4e-9;
  g.t_f = 1e-9;
  return passthrough_trace(load, g, 100e-9, 0.1e-9);
}

}  // namespace

TEST_CASE("detector config") {
  const DetectorConfig d = DetectorConfig::from_fault_window(0.81, 0.99);
  // 2% of the window span on each side
  CHECK(d.v_ref_low == doctest::Approx(0.81 + 0.02 * 0.18).epsilon(1e-12));
  CHECK(d.v_ref_high == doctest::Approx(0.99 - 0.02 * 0.18).epsilon(1e-12));
  CHECK_NOTHROW(d.validate());
  DetectorConfig bad;
  bad.v_ref_low = 1.0;
  bad.v_ref_high = 0.9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("comparators use strict inequalities") {
  DetectorConfig d;
  d.v_ref_low = 0.85;
  d.v_ref_high = 0.95;
  // rail pinned exactly at a reference: in spec
  CHECK_FALSE(detect(flat_trace(0.85), d, 10e-9, 90e-9).triggered);
  CHECK_FALSE(detect(flat_trace(0.95), d, 10e-9, 90e-9).triggered);
  CHECK(detect(flat_trace(0.8499), d, 10e-9, 90e-9).triggered);
  CHECK(detect(flat_trace(0.9501), d, 10e-9, 90e-9).triggered);
}

TEST_CASE("detection events are windowed and time-ordered") {
  DetectorConfig d;
  d.v_ref_low = 0.85;
  d.v_ref_high = 0.95;
  const SimulationTrace tr = flat_trace(0.9, -0.2, 30e-9);  // dip at 30..36 ns
  const DetectionResult inside = detect(tr, d, 10e-9, 90e-9);
  CHECK(inside.triggered);
  REQUIRE(inside.first_event_index.has_value());
  CHECK(*inside.first_event_index == inside.event_indices.front());
  for (std::size_t i = 1; i < inside.event_indices.size(); ++i)
    CHECK(inside.event_indices[i - 1] < inside.event_indices[i]);
  const DetectionResult outside = detect(tr, d, 50e-9, 90e-9);
  CHECK_FALSE(outside.triggered);
  CHECK(outside.event_indices.empty());
}

TEST_CASE("detector dominates the fault window when derived from it") {
  // Any rail excursion that can fault must also trip the tightened detector.
  const DetectorConfig d = DetectorConfig::from_fault_window(0.81, 0.99);
  FaultModel fm;
  fm.v_fault_low = 0.81;
  fm.v_fault_high = 0.99;
  fm.window_start = 10e-9;
  fm.window_end = 90e-9;
  for (double dip : {-0.05, -0.1, -0.2, -0.4, 0.1, 0.3}) {
    const SimulationTrace tr = flat_trace(0.9, dip);
    const SupplyEvaluation ev = evaluate_under_supply(tr, fm, kKey, kPt, 1);
    const bool det = detect(tr, d, fm.window_start, fm.window_end).triggered;
    if (ev.faulted) CHECK(det);
  }
}

TEST_CASE("prng golden values") {
  PrngState s = PrngState::from_seed(42);
  CHECK(s.s0 == 13679457532755275413ULL);
  CHECK(s.s1 == 2949826092126892291ULL);
  const char* expected[] = {
      "d2d2a441fc561fafeb5c60ee016f49bd",
      "f6db9fe671228b8c501e92c62a403854",
      "93518067cefebc3688b0bb406d1a23e8",
      "b0db4df6ecbcf91976e23debe9703afb",
  };
  for (const char* hex : expected) {
    auto [mask, next] = prng_next(s);
    CHECK(to_hex(mask) == hex);
    s = next;
  }
}

TEST_CASE("prng never emits the all-zero mask and streams differ by seed") {
  PrngState s = PrngState::from_seed(7);
  for (int i = 0; i < 1000000; ++i) {
    auto [mask, next] = prng_next(s);
    if (is_zero(mask)) {
      FAIL("all-zero mask emitted at draw ", i);
      break;
    }
    s = next;
  }
  CHECK(prng_next(PrngState::from_seed(1)).first != prng_next(PrngState::from_seed(2)).first);
}

TEST_CASE("infective encryption") {
  const PrngState s = PrngState::from_seed(0xbeef);
  const InfectiveResult clean = infective_encrypt(kKey, kPt, false, s);
  CHECK_FALSE(clean.contaminated);
  CHECK(clean.ciphertext == aes128_encrypt(kKey, kPt));
  // untriggered runs leave the mask stream untouched
  CHECK(clean.prng.s0 == s.s0);
  CHECK(clean.prng.s1 == s.s1);

  const InfectiveResult hit = infective_encrypt(kKey, kPt, true, s);
  CHECK(hit.contaminated);
  CHECK(hit.ciphertext != aes128_encrypt(kKey, kPt));
  CHECK((hit.prng.s0 != s.s0 || hit.prng.s1 != s.s1));

  // contaminated output is last-round-key masking: decrypting with the true
  // key does not recover the plaintext
  CHECK(aes128_decrypt(kKey, hit.ciphertext) != kPt);
}

TEST_CASE("contaminated ciphertexts do not collide across seeds") {
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const InfectiveResult r =
        infective_encrypt(kKey, kPt, true, PrngState::from_seed(seed));
    seen.insert(to_hex(r.ciphertext));
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("end to end without a glitch is clean") {
  RegulatorConfig cfg = RegulatorConfig::from_total(2, 200e-12, 0.1, 60e6);
  cfg.epsilon_nonoverlap = 1e-9;
  LoadModel load = LoadModel::sbox_default();
  const double ts = cfg.t_s();
  GlitchWaveform g;
  g.nominal_v = 1.8;  // flat rail, no disturbance
  FaultModel fm;
  fm.v_fault_low = 0.81;
  fm.v_fault_high = 0.99;
  fm.window_start = 6 * ts;
  fm.window_end = 8 * ts;
  const DetectorConfig det = DetectorConfig::from_fault_window(0.81, 0.99);
  EndToEndOptions opt;
  opt.duration = 12 * ts;
  opt.dt = ts / 800;
  const EndToEndResult r = end_to_end(cfg, load, det, fm, g, kKey, kPt, 5, opt);
  CHECK_FALSE(r.faulted);
  CHECK_FALSE(r.triggered);
  CHECK_FALSE(r.contaminated);
  CHECK(r.ciphertext == r.correct_ciphertext);
  CHECK(r.correct_ciphertext == aes128_encrypt(kKey, kPt));
  CHECK(r.peak_deviation < 0.09);  // stays well inside the 10% band
}
