#pragma once

#include <iosfwd>
#include <string>

#include "enbs/params.hpp"

namespace enbs::config {

/// Parse a decimal number, locale-independent. Throws ConfigError on any
/// trailing garbage.
double parse_double(const std::string& text);

/// Phase literal: decimal radians or a pi expression ("pi", "2pi", "pi/2",
/// "3pi/4", "-pi/2", "0.5pi").
double parse_phase(const std::string& text);

/// Load a parameter file. Grammar: one "key = value" per line, comments with
/// '#', sections [arm1] and [arm2] for the per-unit fields. Top-level keys:
/// unit (rad_per_s | hz), g_eff_mag, kappa_s, kappa_i, comb_bins; arm keys:
/// pump_phase, signal_phase, seed_mag, seed_phase. With unit = hz the three
/// rates are multiplied by 2*pi on load. Unknown keys are a hard error.
EnbsParams load_params(std::istream& in);
EnbsParams load_params_file(const std::string& path);

/// Apply a "key=value" override on resolved parameters. Keys: g_eff_mag,
/// kappa_s, kappa_i (rad/s; append _hz for a 2*pi-scaled value), comb_bins,
/// and arm1./arm2. prefixed pump_phase, signal_phase, seed_mag, seed_phase.
/// Phase values accept pi literals.
void apply_override(EnbsParams& params, const std::string& assignment);

/// Emit the resolved parameter set in the file grammar (unit = rad_per_s,
/// shortest round-trip floats). Reparsing yields an identical set.
void dump_config(const EnbsParams& params, std::ostream& os);

}  // namespace enbs::config
