#pragma once

#include <cstdint>
#include <optional>

#include "mpvr/aes.hpp"
#include "mpvr/regulator.hpp"

namespace mpvr {

// Supply-dependent fault mechanism: a fault fires when the regulated rail
// leaves [v_fault_low, v_fault_high] inside the evaluation window. The
// effect is applied at the round whose time slot contains the first
// violating sample (rounds 1..10 mapped uniformly across the window).
enum class FaultEffect {
  kByteXorRandom,  // XOR a random nonzero byte at a random state position
  kBitFlipCount,   // flip bit_flip_count random distinct state bits
  kStuckOutput     // force a random state byte to zero
};

struct FaultModel {
  double v_fault_low = 0.0;   // volts
  double v_fault_high = 0.0;  // volts
  double window_start = 0.0;  // seconds, absolute trace time
  double window_end = 0.0;
  FaultEffect effect = FaultEffect::kByteXorRandom;
  int bit_flip_count = 1;

  void validate() const;
};

struct SupplyEvaluation {
  Block ciphertext;
  Block correct_ciphertext;
  bool faulted = false;
  std::optional<std::size_t> fault_sample_index;
  int fault_round = 0;  // 1..10 when faulted
  Block e1{};           // injected state mask when faulted
};

// Runs one AES-128 encryption under the given rail trace. The fault decision
// is a pure threshold function of the samples inside the evaluation window;
// the injected mask is drawn from the seeded generator, so the result is
// deterministic per (trace, fm, key, plaintext, seed).
SupplyEvaluation evaluate_under_supply(const SimulationTrace& trace, const FaultModel& fm,
                                       const Block& key, const Block& plaintext,
                                       std::uint64_t seed);

// S-box-only evaluation mode: the whole window is one combinational lookup.
struct SboxEvaluation {
  std::uint8_t output = 0;
  std::uint8_t correct_output = 0;
  bool faulted = false;
  std::optional<std::size_t> fault_sample_index;
};

SboxEvaluation evaluate_sbox_under_supply(const SimulationTrace& trace, const FaultModel& fm,
                                          std::uint8_t input, std::uint64_t seed);

}  // namespace mpvr
