#pragma once

#include <string>
#include <vector>

#include "mpvr/campaign.hpp"

namespace mpvr {

// INI-style config: [section] headers, key = value lines, '#' or ';'
// comments. Sections and keys mirror the domain types; unknown ones are
// errors. Values not set keep the stock-scenario defaults.
//
//   [campaign]  trials, seed, randomize_t_start, duration, dt, key,
//               plaintext, key_policy (fixed|random), scenario
//               (default|capacitor), regulator (on|off)
//   [regulator] n_phases, c_tot, r_on, f_sw, beta, gamma, epsilon
//   [load]      r_l, c_l, c_out, p_avg, p_min, p_max, v_nominal,
//               v_tol_low, v_tol_high, cc_clock
//   [detector]  mode (off|auto|manual), v_ref_low, v_ref_high, latch
//   [fault]     v_low, v_high, window_start, window_end,
//               effect (byte_xor|bit_flip|stuck), bit_flips
//   [glitch]    nominal, amplitude, t_start, t_r, t_g, t_f
CampaignSpec load_config(const std::string& path);

// Same grammar applied to in-memory text (tests) and to CLI overrides given
// as "section.key=value".
CampaignSpec parse_config(const std::string& text);
CampaignSpec apply_overrides(CampaignSpec spec, const std::vector<std::string>& overrides);

}  // namespace mpvr
