#include "mpvr/target.hpp"

#include <algorithm>
#include <cmath>

#include "mpvr/errors.hpp"
#include "mpvr/rng.hpp"

namespace mpvr {

void FaultModel::validate() const {
  if (!(v_fault_low < v_fault_high))
    throw ConfigError("fault model: v_fault_low must be below v_fault_high");
  if (!(window_start < window_end)) throw ConfigError("fault model: evaluation window is empty");
  if (bit_flip_count < 1 || bit_flip_count > 128)
    throw ConfigError("fault model: bit_flip_count must be in [1, 128]");
}

namespace {

std::optional<std::size_t> first_violation(const SimulationTrace& trace, const FaultModel& fm) {
  if (fm.window_start < trace.t0 ||
      fm.window_end > trace.t0 + trace.duration() + trace.dt)
    throw SimulationError("fault model: evaluation window outside trace");
  const std::size_t lo = trace.index_at(fm.window_start);
  const std::size_t hi = trace.index_at(fm.window_end);
  for (std::size_t i = lo; i <= hi; ++i) {
    const double v = trace.v_out[i];
    if (v < fm.v_fault_low || v > fm.v_fault_high) return i;
  }
  return std::nullopt;
}

Block draw_fault_mask(const FaultModel& fm, Rng& rng) {
  Block e1{};
  switch (fm.effect) {
    case FaultEffect::kByteXorRandom: {
      const auto pos = static_cast<int>(rng.next_u64() % 16);
      e1[pos] = static_cast<std::uint8_t>(1 + rng.next_u64() % 255);
      break;
    }
    case FaultEffect::kBitFlipCount: {
      int flipped = 0;
      while (flipped < fm.bit_flip_count) {
        const auto bit = static_cast<int>(rng.next_u64() % 128);
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (bit % 8));
        if (!(e1[bit / 8] & mask)) {
          e1[bit / 8] |= mask;
          ++flipped;
        }
      }
      break;
    }
    case FaultEffect::kStuckOutput:
      // Position only; the caller resolves the mask against the round state
      // so the XOR forces the byte to zero.
      e1[rng.next_u64() % 16] = 0xff;
      break;
  }
  return e1;
}

}  // namespace

SupplyEvaluation evaluate_under_supply(const SimulationTrace& trace, const FaultModel& fm,
                                       const Block& key, const Block& plaintext,
                                       std::uint64_t seed) {
  fm.validate();
  SupplyEvaluation out;
  out.correct_ciphertext = aes128_encrypt(key, plaintext);
  const auto idx = first_violation(trace, fm);
  if (!idx) {
    out.ciphertext = out.correct_ciphertext;
    return out;
  }
  out.faulted = true;
  out.fault_sample_index = *idx;
  const double t = trace.time_at(*idx);
  const double frac = (t - fm.window_start) / (fm.window_end - fm.window_start);
  out.fault_round = std::clamp(1 + static_cast<int>(frac * 10.0), 1, 10);

  Rng rng(derive_seed(seed, 0xfa17));
  out.e1 = draw_fault_mask(fm, rng);
  if (fm.effect == FaultEffect::kStuckOutput) {
    // Stuck-at-zero: XOR the byte's current value so the state byte becomes 0.
    const Block state = aes128_state_entering_round(key, plaintext, out.fault_round);
    for (int i = 0; i < 16; ++i) out.e1[i] = (out.e1[i] == 0xff) ? state[i] : 0;
  }
  if (is_zero(out.e1)) out.e1[0] = 1;  // a stuck byte that was already zero: force a flip
  out.ciphertext = aes128_encrypt_faulted(key, plaintext, out.fault_round, out.e1, Block{});
  return out;
}

SboxEvaluation evaluate_sbox_under_supply(const SimulationTrace& trace, const FaultModel& fm,
                                          std::uint8_t input, std::uint64_t seed) {
  fm.validate();
  SboxEvaluation out;
  out.correct_output = aes_sbox(input);
  const auto idx = first_violation(trace, fm);
  if (!idx) {
    out.output = out.correct_output;
    return out;
  }
  out.faulted = true;
  out.fault_sample_index = *idx;
  Rng rng(derive_seed(seed, 0xfa17));
  out.output = static_cast<std::uint8_t>(out.correct_output ^
                                         static_cast<std::uint8_t>(1 + rng.next_u64() % 255));
  return out;
}

}  // namespace mpvr
