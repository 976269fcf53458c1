#include "mpvr/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mpvr/errors.hpp"

namespace mpvr {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: " + key + ": not a number: '" + v + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: " + key + ": not an integer: '" + v + "'");
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 0);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: " + key + ": not an unsigned integer: '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("config: " + key + ": not a boolean: '" + v + "'");
}

RegulatorConfig& regulator_of(CampaignSpec& s, const std::string& key) {
  if (!s.regulator)
    throw ConfigError("config: " + key + ": regulator is off; set campaign.regulator = on");
  return *s.regulator;
}

// One key applied in file order. c_tot uses the n_phases in effect, so list
// n_phases first when setting both.
void apply_key(CampaignSpec& s, const std::string& section, const std::string& key,
               const std::string& value) {
  const std::string full = section + "." + key;
  if (section == "campaign") {
    if (key == "trials") s.trials = parse_int(full, value);
    else if (key == "seed") s.base_seed = parse_u64(full, value);
    else if (key == "randomize_t_start") s.randomize_t_start = parse_bool(full, value);
    else if (key == "duration") s.duration = parse_double(full, value);
    else if (key == "dt") s.dt = parse_double(full, value);
    else if (key == "key") s.key = block_from_hex(value);
    else if (key == "plaintext") s.plaintext = block_from_hex(value);
    else if (key == "key_policy") {
      if (value == "fixed") s.key_policy = KeyPolicy::kFixed;
      else if (value == "random") s.key_policy = KeyPolicy::kPerTrialRandom;
      else throw ConfigError("config: " + full + ": expected fixed|random");
    } else if (key == "regulator") {
      if (parse_bool(full, value)) {
        if (!s.regulator) s.regulator = *default_scenario().regulator;
      } else {
        s.regulator.reset();
      }
    } else if (key == "scenario") {
      // handled in the pre-pass
    } else {
      throw ConfigError("config: unknown key '" + full + "'");
    }
  } else if (section == "regulator") {
    RegulatorConfig& r = regulator_of(s, full);
    if (key == "n_phases") {
      const double c_tot = r.c_tot();
      r.n_phases = parse_int(full, value);
      if (r.n_phases >= 1) r.c_fly_per_phase = c_tot / r.n_phases;
    } else if (key == "c_tot") {
      r.c_fly_per_phase = parse_double(full, value) / r.n_phases;
    } else if (key == "r_on") r.r_on = parse_double(full, value);
    else if (key == "f_sw") r.f_sw = parse_double(full, value);
    else if (key == "beta") r.beta_top = parse_double(full, value);
    else if (key == "gamma") r.gamma_top = parse_double(full, value);
    else if (key == "epsilon") r.epsilon_nonoverlap = parse_double(full, value);
    else throw ConfigError("config: unknown key '" + full + "'");
  } else if (section == "load") {
    if (key == "r_l") s.load.r_l = parse_double(full, value);
    else if (key == "c_l") s.load.c_l = parse_double(full, value);
    else if (key == "c_out") s.load.c_out = parse_double(full, value);
    else if (key == "p_avg") s.load.p_avg = parse_double(full, value);
    else if (key == "p_min") s.load.p_min = parse_double(full, value);
    else if (key == "p_max") s.load.p_max = parse_double(full, value);
    else if (key == "v_nominal") s.load.v_nominal = parse_double(full, value);
    else if (key == "v_tol_low") s.load.v_tol_low = parse_double(full, value);
    else if (key == "v_tol_high") s.load.v_tol_high = parse_double(full, value);
    else if (key == "cc_clock") s.load.cc_clock_hz = parse_double(full, value);
    else throw ConfigError("config: unknown key '" + full + "'");
  } else if (section == "detector") {
    if (key == "mode") {
      if (value == "off") s.detector.reset();
      else if (value == "auto")
        s.detector = DetectorConfig::from_fault_window(s.fault_model.v_fault_low,
                                                       s.fault_model.v_fault_high);
      else if (value == "manual") s.detector = DetectorConfig{};
      else throw ConfigError("config: " + full + ": expected off|auto|manual");
    } else {
      if (!s.detector)
        throw ConfigError("config: " + full + ": set detector.mode first");
      if (key == "v_ref_low") s.detector->v_ref_low = parse_double(full, value);
      else if (key == "v_ref_high") s.detector->v_ref_high = parse_double(full, value);
      else if (key == "latch") s.detector->latch = parse_bool(full, value);
      else throw ConfigError("config: unknown key '" + full + "'");
    }
  } else if (section == "fault") {
    if (key == "v_low") s.fault_model.v_fault_low = parse_double(full, value);
    else if (key == "v_high") s.fault_model.v_fault_high = parse_double(full, value);
    else if (key == "window_start") s.fault_model.window_start = parse_double(full, value);
    else if (key == "window_end") s.fault_model.window_end = parse_double(full, value);
    else if (key == "effect") {
      if (value == "byte_xor") s.fault_model.effect = FaultEffect::kByteXorRandom;
      else if (value == "bit_flip") s.fault_model.effect = FaultEffect::kBitFlipCount;
      else if (value == "stuck") s.fault_model.effect = FaultEffect::kStuckOutput;
      else throw ConfigError("config: " + full + ": expected byte_xor|bit_flip|stuck");
    } else if (key == "bit_flips") s.fault_model.bit_flip_count = parse_int(full, value);
    else throw ConfigError("config: unknown key '" + full + "'");
  } else if (section == "glitch") {
    if (key == "nominal") s.glitch.nominal_v = parse_double(full, value);
    else if (key == "amplitude") s.glitch.amplitude = parse_double(full, value);
    else if (key == "t_start") s.glitch.t_start = parse_double(full, value);
    else if (key == "t_r") s.glitch.t_r = parse_double(full, value);
    else if (key == "t_g") s.glitch.t_g = parse_double(full, value);
    else if (key == "t_f") s.glitch.t_f = parse_double(full, value);
    else throw ConfigError("config: unknown key '" + full + "'");
  } else {
    throw ConfigError("config: unknown section '[" + section + "]'");
  }
}

struct Entry {
  std::string section, key, value;
};

std::vector<Entry> tokenize(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key before any section");
    entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
  }
  return entries;
}

CampaignSpec base_for(const std::vector<Entry>& entries) {
  for (const auto& e : entries) {
    if (e.section == "campaign" && e.key == "scenario") {
      if (e.value == "default") return default_scenario();
      if (e.value == "capacitor") return capacitor_scenario();
      throw ConfigError("config: campaign.scenario: expected default|capacitor");
    }
  }
  return default_scenario();
}

}  // namespace

CampaignSpec parse_config(const std::string& text) {
  const std::vector<Entry> entries = tokenize(text);
  CampaignSpec spec = base_for(entries);
  for (const auto& e : entries) apply_key(spec, e.section, e.key, e.value);
  return spec;
}

CampaignSpec load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

CampaignSpec apply_overrides(CampaignSpec spec, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const std::size_t eq = o.find('=');
    const std::size_t dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override: expected section.key=value, got '" + o + "'");
    apply_key(spec, trim(o.substr(0, dot)), trim(o.substr(dot + 1, eq - dot - 1)),
              trim(o.substr(eq + 1)));
  }
  return spec;
}

}  // namespace mpvr
