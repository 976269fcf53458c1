#include "mpvr/infective.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "mpvr/errors.hpp"
#include "mpvr/rng.hpp"

namespace mpvr {

void DetectorConfig::validate() const {
  if (!(v_ref_low < v_ref_high))
    throw ConfigError("detector: v_ref_low must be below v_ref_high");
}

DetectorConfig DetectorConfig::from_fault_window(double v_fault_low, double v_fault_high) {
  const double margin = 0.02 * (v_fault_high - v_fault_low);
  DetectorConfig d;
  d.v_ref_low = v_fault_low + margin;
  d.v_ref_high = v_fault_high - margin;
  return d;
}

DetectionResult detect(const SimulationTrace& trace, const DetectorConfig& cfg,
                       double window_start, double window_end) {
  cfg.validate();
  if (!(window_start < window_end)) throw ConfigError("detect: empty window");
  if (window_start < trace.t0 || window_end > trace.t0 + trace.duration() + trace.dt)
    throw SimulationError("detect: window outside trace");
  const std::size_t lo = trace.index_at(window_start);
  const std::size_t hi = trace.index_at(window_end);
  DetectionResult out;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double v = trace.v_out[i];
    if (v < cfg.v_ref_low || v > cfg.v_ref_high) {
      if (!out.triggered) out.first_event_index = i;
      out.triggered = true;
      out.event_indices.push_back(i);
    }
  }
  return out;
}

PrngState PrngState::from_seed(std::uint64_t seed) {
  std::uint64_t s = seed;
  PrngState st;
  st.s0 = splitmix64(s);
  st.s1 = splitmix64(s);
  if (st.s0 == 0 && st.s1 == 0) st.s1 = 0x9e3779b97f4a7c15ULL;
  return st;
}

namespace {

std::uint64_t xorshift128plus(PrngState& st) {
  std::uint64_t x = st.s0;
  const std::uint64_t y = st.s1;
  st.s0 = y;
  x ^= x << 23;
  st.s1 = x ^ y ^ (x >> 17) ^ (y >> 26);
  return st.s1 + y;
}

}  // namespace

std::pair<Block, PrngState> prng_next(PrngState s) {
  if (s.s0 == 0 && s.s1 == 0) throw ConfigError("prng: state must be nonzero");
  Block mask;
  do {
    const std::uint64_t a = xorshift128plus(s);
    const std::uint64_t b = xorshift128plus(s);
    std::memcpy(mask.data(), &a, 8);
    std::memcpy(mask.data() + 8, &b, 8);
  } while (is_zero(mask));
  return {mask, s};
}

InfectiveResult infective_encrypt(const Block& key, const Block& plaintext,
                                  bool triggered, PrngState prng) {
  InfectiveResult out;
  out.prng = prng;
  if (!triggered) {
    out.ciphertext = aes128_encrypt(key, plaintext);
    return out;
  }
  auto [mask, next] = prng_next(prng);
  out.prng = next;
  out.contaminated = true;
  out.ciphertext = aes128_encrypt_faulted(key, plaintext, 0, Block{}, mask);
  return out;
}

EndToEndResult end_to_end(const RegulatorConfig& cfg, const LoadModel& load,
                          const DetectorConfig& det, const FaultModel& fm,
                          const GlitchWaveform& glitch, const Block& key,
                          const Block& plaintext, std::uint64_t seed,
                          const EndToEndOptions& opt) {
  const SimulationTrace trace = simulate(cfg, load, glitch, opt.duration, opt.dt, seed);
  const DetectionResult detection = detect(trace, det, fm.window_start, fm.window_end);
  const SupplyEvaluation eval = evaluate_under_supply(trace, fm, key, plaintext, seed);

  EndToEndResult out;
  out.correct_ciphertext = eval.correct_ciphertext;
  out.faulted = eval.faulted;
  out.triggered = detection.triggered;
  // Peak over the fault-evaluation window: steady-state onset is stochastic
  // under a noisy load, so the trace-wide post-transient peak is not usable
  // here.
  const std::size_t lo = trace.index_at(fm.window_start);
  const std::size_t hi = trace.index_at(fm.window_end);
  for (std::size_t i = lo; i <= hi && i < trace.v_out.size(); ++i)
    out.peak_deviation = std::max(out.peak_deviation,
                                  std::abs(trace.v_out[i] - load.v_nominal));
  if (detection.triggered) {
    auto [mask, next] = prng_next(PrngState::from_seed(derive_seed(seed, 0x1f3c)));
    (void)next;
    out.contaminated = true;
    out.ciphertext = aes128_encrypt_faulted(key, plaintext,
                                            eval.faulted ? eval.fault_round : 0, eval.e1, mask);
  } else {
    out.ciphertext = eval.ciphertext;
  }
  return out;
}

}  // namespace mpvr
