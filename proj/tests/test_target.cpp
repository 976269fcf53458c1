#include "doctest.h"
#include "mpvr/errors.hpp"
#include "mpvr/target.hpp"

using namespace mpvr;

namespace {

const Block kKey = block_from_hex("000102030405060708090a0b0c0d0e0f");
const Block kPt = block_from_hex("00112233445566778899aabbccddeeff");

LoadModel plain_load() {
  LoadModel load = LoadModel::sbox_default();
  return load;
}

// Rail trace built directly from a waveform, no regulator in the path.
SimulationTrace trace_for(double amplitude, double t_start = 20e-9) {
  GlitchWaveform g;
  g.nominal_v = 0.9;
  g.amplitude = amplitude;
  g.t_start = t_start;
  g.t_r = 1e-9;
  g.t_g = 5e-9;
  g.t_f = 1e-9;
  return passthrough_trace(plain_load(), g, 100e-9, 0.1e-9);
}

FaultModel window_fm(double lo = 0.81, double hi = 0.99, double a = 10e-9,
                     double b = 60e-9) {
  FaultModel fm;
  fm.v_fault_low = lo;
  fm.v_fault_high = hi;
  fm.window_start = a;
  fm.window_end = b;
  return fm;
}

}  // namespace

TEST_CASE("rail inside the tolerance band never faults") {
  const SimulationTrace tr = trace_for(0.05);  // 0.95 V peak, inside [0.81, 0.99]
  const SupplyEvaluation ev = evaluate_under_supply(tr, window_fm(), kKey, kPt, 99);
  CHECK_FALSE(ev.faulted);
  CHECK(ev.ciphertext == ev.correct_ciphertext);
  CHECK(ev.correct_ciphertext == aes128_encrypt(kKey, kPt));
  CHECK_FALSE(ev.fault_sample_index.has_value());
}

TEST_CASE("undervoltage past the band faults and corrupts the output") {
  const SimulationTrace tr = trace_for(-0.3);  // dips to 0.6 V
  const SupplyEvaluation ev = evaluate_under_supply(tr, window_fm(), kKey, kPt, 99);
  CHECK(ev.faulted);
  CHECK(ev.ciphertext != ev.correct_ciphertext);
  CHECK(ev.fault_round >= 1);
  CHECK(ev.fault_round <= 10);
  CHECK_FALSE(is_zero(ev.e1));
  REQUIRE(ev.fault_sample_index.has_value());
  // first violating sample lies inside the glitch
  const double t = tr.time_at(*ev.fault_sample_index);
  CHECK(t >= 20e-9);
  CHECK(t <= 27e-9);
}

TEST_CASE("overvoltage faults too") {
  const SimulationTrace tr = trace_for(+0.5);
  CHECK(evaluate_under_supply(tr, window_fm(), kKey, kPt, 5).faulted);
}

TEST_CASE("violations outside the evaluation window are ignored") {
  const SimulationTrace tr = trace_for(-0.3, /*t_start=*/70e-9);  // past window_end
  const SupplyEvaluation ev = evaluate_under_supply(tr, window_fm(), kKey, kPt, 99);
  CHECK_FALSE(ev.faulted);
  CHECK(ev.ciphertext == aes128_encrypt(kKey, kPt));
}

TEST_CASE("evaluation is deterministic per seed and varies across seeds") {
  const SimulationTrace tr = trace_for(-0.3);
  const FaultModel fm = window_fm();
  const SupplyEvaluation a = evaluate_under_supply(tr, fm, kKey, kPt, 1234);
  const SupplyEvaluation b = evaluate_under_supply(tr, fm, kKey, kPt, 1234);
  CHECK(a.ciphertext == b.ciphertext);
  CHECK(a.e1 == b.e1);
  CHECK(a.fault_round == b.fault_round);
  bool any_diff = false;
  for (std::uint64_t s = 0; s < 16 && !any_diff; ++s)
    any_diff = evaluate_under_supply(tr, fm, kKey, kPt, s).ciphertext != a.ciphertext;
  CHECK(any_diff);
}

TEST_CASE("fault effects") {
  const SimulationTrace tr = trace_for(-0.3);
  FaultModel fm = window_fm();

  SUBCASE("byte xor: e1 touches exactly one byte") {
    fm.effect = FaultEffect::kByteXorRandom;
    const SupplyEvaluation ev = evaluate_under_supply(tr, fm, kKey, kPt, 7);
    int nz = 0;
    for (auto b : ev.e1) nz += b != 0;
    CHECK(nz == 1);
  }
  SUBCASE("bit flips: popcount of e1 equals the requested count") {
    fm.effect = FaultEffect::kBitFlipCount;
    fm.bit_flip_count = 3;
    const SupplyEvaluation ev = evaluate_under_supply(tr, fm, kKey, kPt, 7);
    int bits = 0;
    for (auto b : ev.e1)
      for (int i = 0; i < 8; ++i) bits += (b >> i) & 1;
    CHECK(bits == 3);
  }
  SUBCASE("stuck output: e1 equals the state byte it zeroes") {
    fm.effect = FaultEffect::kStuckOutput;
    const SupplyEvaluation ev = evaluate_under_supply(tr, fm, kKey, kPt, 7);
    const Block state = aes128_state_entering_round(kKey, kPt, ev.fault_round);
    int nz = 0;
    int pos = -1;
    for (int i = 0; i < 16; ++i)
      if (ev.e1[static_cast<std::size_t>(i)] != 0) {
        ++nz;
        pos = i;
      }
    REQUIRE(nz <= 1);
    if (nz == 1) CHECK(ev.e1[static_cast<std::size_t>(pos)] == state[static_cast<std::size_t>(pos)]);
  }
}

TEST_CASE("s-box evaluation mode") {
  const FaultModel fm = window_fm();
  const SboxEvaluation clean = evaluate_sbox_under_supply(trace_for(0.0), fm, 0x53, 3);
  CHECK_FALSE(clean.faulted);
  CHECK(clean.output == clean.correct_output);
  CHECK(clean.correct_output == aes_sbox(0x53));
  const SboxEvaluation hit = evaluate_sbox_under_supply(trace_for(-0.3), fm, 0x53, 3);
  CHECK(hit.faulted);
  CHECK(hit.output != hit.correct_output);
}

TEST_CASE("fault model validation") {
  FaultModel fm = window_fm();
  CHECK_NOTHROW(fm.validate());
  fm.v_fault_high = fm.v_fault_low;
  CHECK_THROWS_AS(fm.validate(), ConfigError);
  fm = window_fm();
  fm.window_end = fm.window_start;
  CHECK_THROWS_AS(fm.validate(), ConfigError);
  fm = window_fm();
  fm.bit_flip_count = 0;
  fm.effect = FaultEffect::kBitFlipCount;
  CHECK_THROWS_AS(fm.validate(), ConfigError);
}
