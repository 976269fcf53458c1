#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mpvr/aes.hpp"
#include "mpvr/target.hpp"

namespace mpvr {

// Two comparators on the regulated rail, OR-combined. Strict inequalities:
// a rail exactly at a reference is in-spec.
struct DetectorConfig {
  double v_ref_low = 0.0;
  double v_ref_high = 0.0;
  bool latch = true;  // once triggered, stays triggered for the encryption

  void validate() const;

  // Thresholds tightened 2% on each side of the fault-tolerance window so
  // detection strictly dominates faulting.
  static DetectorConfig from_fault_window(double v_fault_low, double v_fault_high);
};

struct DetectionResult {
  bool triggered = false;
  std::optional<std::size_t> first_event_index;
  std::vector<std::size_t> event_indices;  // time-ordered
};

DetectionResult detect(const SimulationTrace& trace, const DetectorConfig& cfg,
                       double window_start, double window_end);

// 128-bit xorshift128+ state for the contamination masks. Nonzero always.
struct PrngState {
  std::uint64_t s0 = 0;
  std::uint64_t s1 = 0;

  // 64-bit CLI seeds expand through splitmix64 into the 128-bit state.
  static PrngState from_seed(std::uint64_t seed);
};

// Next 16-byte mask (two consecutive xorshift128+ outputs, little-endian) and
// the advanced state. Never emits the all-zero mask.
std::pair<Block, PrngState> prng_next(PrngState s);

struct InfectiveResult {
  Block ciphertext;
  bool contaminated = false;
  PrngState prng;
};

// Pass-through AES when not triggered; otherwise the round-10 subkey is
// replaced by (subkey XOR mask) with a fresh mask per contaminated block.
InfectiveResult infective_encrypt(const Block& key, const Block& plaintext,
                                  bool triggered, PrngState prng);

struct EndToEndOptions {
  double duration = 0.0;  // seconds
  double dt = 0.0;        // seconds
};

struct EndToEndResult {
  Block ciphertext;
  Block correct_ciphertext;
  bool faulted = false;
  bool contaminated = false;
  bool triggered = false;
  double peak_deviation = 0.0;  // volts
};

// Full pipeline: regulator simulation, glitch detection on the regulated
// rail, supply-dependent fault evaluation, last-round contamination when the
// detector trips.
EndToEndResult end_to_end(const RegulatorConfig& cfg, const LoadModel& load,
                          const DetectorConfig& det, const FaultModel& fm,
                          const GlitchWaveform& glitch, const Block& key,
                          const Block& plaintext, std::uint64_t seed,
                          const EndToEndOptions& opt);

}  // namespace mpvr
