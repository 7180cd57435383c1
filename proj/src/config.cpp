#include "enbs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "enbs/scans.hpp"

namespace enbs::config {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("expected a number, got empty string");
  double v = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ConfigError("malformed number: '" + t + "'");
  return v;
}

double parse_phase(const std::string& text) {
  const std::string t = trim(text);
  const auto pos = t.find("pi");
  if (pos == std::string::npos) return parse_double(t);

  const std::string before = trim(t.substr(0, pos));
  const std::string after = trim(t.substr(pos + 2));

  double coeff = 1.0;
  if (before == "-")
    coeff = -1.0;
  else if (before == "+" || before.empty())
    coeff = 1.0;
  else
    coeff = parse_double(before);

  double denom = 1.0;
  if (!after.empty()) {
    if (after.front() != '/')
      throw ConfigError("malformed phase literal: '" + t + "'");
    denom = parse_double(after.substr(1));
    if (denom == 0.0) throw ConfigError("phase literal divides by zero");
  }
  return coeff * std::numbers::pi / denom;
}

namespace {

enum class Section { top, arm1, arm2 };

struct Loader {
  EnbsParams params;
  bool unit_is_hz = false;

  void set_top(const std::string& key, const std::string& value) {
    if (key == "unit") {
      if (value == "hz")
        unit_is_hz = true;
      else if (value == "rad_per_s")
        unit_is_hz = false;
      else
        throw ConfigError("unit must be 'hz' or 'rad_per_s', got '" + value + "'");
    } else if (key == "g_eff_mag") {
      params.g_eff_mag = parse_double(value);
    } else if (key == "kappa_s") {
      params.kappa_s = parse_double(value);
    } else if (key == "kappa_i") {
      params.kappa_i = parse_double(value);
    } else if (key == "comb_bins") {
      const double v = parse_double(value);
      if (v < 0 || v != std::floor(v))
        throw ConfigError("comb_bins must be a nonnegative integer");
      params.comb_bins = static_cast<int>(v);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  void set_arm(int arm, const std::string& key, const std::string& value) {
    SeedField& seed = arm == 1 ? params.seed_1 : params.seed_2;
    double& pump = arm == 1 ? params.pump_phase_1 : params.pump_phase_2;
    double& sig = arm == 1 ? params.signal_phase_1 : params.signal_phase_2;
    if (key == "pump_phase")
      pump = parse_phase(value);
    else if (key == "signal_phase")
      sig = parse_phase(value);
    else if (key == "seed_mag")
      seed.amplitude_mag = parse_double(value);
    else if (key == "seed_phase")
      seed.phase = parse_phase(value);
    else
      throw ConfigError("unknown key '" + key + "' in [arm" + std::to_string(arm) +
                        "]");
  }

  EnbsParams finish() {
    if (unit_is_hz) {
      params.g_eff_mag *= kTwoPi;
      params.kappa_s *= kTwoPi;
      params.kappa_i *= kTwoPi;
    }
    return validate_params(params);
  }
};

}  // namespace

EnbsParams load_params(std::istream& in) {
  Loader loader;
  Section section = Section::top;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    try {
      if (t.front() == '[') {
        if (t == "[arm1]")
          section = Section::arm1;
        else if (t == "[arm2]")
          section = Section::arm2;
        else
          throw ConfigError("unknown section '" + t + "'");
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError("expected 'key = value'");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      switch (section) {
        case Section::top: loader.set_top(key, value); break;
        case Section::arm1: loader.set_arm(1, key, value); break;
        case Section::arm2: loader.set_arm(2, key, value); break;
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return loader.finish();
}

EnbsParams load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open params file '" + path + "'");
  return load_params(in);
}

void apply_override(EnbsParams& params, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be key=value: '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));

  auto rate = [&](double& field) {
    field = parse_double(value);
  };
  auto rate_hz = [&](double& field) {
    field = parse_double(value) * kTwoPi;
  };

  if (key == "g_eff_mag") rate(params.g_eff_mag);
  else if (key == "g_eff_mag_hz") rate_hz(params.g_eff_mag);
  else if (key == "kappa_s") rate(params.kappa_s);
  else if (key == "kappa_s_hz") rate_hz(params.kappa_s);
  else if (key == "kappa_i") rate(params.kappa_i);
  else if (key == "kappa_i_hz") rate_hz(params.kappa_i);
  else if (key == "comb_bins") {
    const double v = parse_double(value);
    if (v < 0 || v != std::floor(v))
      throw ConfigError("comb_bins must be a nonnegative integer");
    params.comb_bins = static_cast<int>(v);
  } else if (key == "arm1.pump_phase") params.pump_phase_1 = parse_phase(value);
  else if (key == "arm2.pump_phase") params.pump_phase_2 = parse_phase(value);
  else if (key == "arm1.signal_phase") params.signal_phase_1 = parse_phase(value);
  else if (key == "arm2.signal_phase") params.signal_phase_2 = parse_phase(value);
  else if (key == "arm1.seed_mag") params.seed_1.amplitude_mag = parse_double(value);
  else if (key == "arm2.seed_mag") params.seed_2.amplitude_mag = parse_double(value);
  else if (key == "arm1.seed_phase") params.seed_1.phase = parse_phase(value);
  else if (key == "arm2.seed_phase") params.seed_2.phase = parse_phase(value);
  else throw ConfigError("unknown override key '" + key + "'");

  params = validate_params(params);
}

void dump_config(const EnbsParams& params, std::ostream& os) {
  using scans::format_float_shortest;
  os << "unit = rad_per_s\n";
  os << "g_eff_mag = " << format_float_shortest(params.g_eff_mag) << "\n";
  os << "kappa_s = " << format_float_shortest(params.kappa_s) << "\n";
  os << "kappa_i = " << format_float_shortest(params.kappa_i) << "\n";
  os << "comb_bins = " << params.comb_bins << "\n";
  os << "\n[arm1]\n";
  os << "pump_phase = " << format_float_shortest(params.pump_phase_1) << "\n";
  os << "signal_phase = " << format_float_shortest(params.signal_phase_1) << "\n";
  os << "seed_mag = " << format_float_shortest(params.seed_1.amplitude_mag) << "\n";
  os << "seed_phase = " << format_float_shortest(params.seed_1.phase) << "\n";
  os << "\n[arm2]\n";
  os << "pump_phase = " << format_float_shortest(params.pump_phase_2) << "\n";
  os << "signal_phase = " << format_float_shortest(params.signal_phase_2) << "\n";
  os << "seed_mag = " << format_float_shortest(params.seed_2.amplitude_mag) << "\n";
  os << "seed_phase = " << format_float_shortest(params.seed_2.phase) << "\n";
}

}  // namespace enbs::config
