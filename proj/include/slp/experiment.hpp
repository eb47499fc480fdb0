#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slp/link_sim.hpp"

namespace slp {

enum class ExperimentKind { BerSweep, ThroughputSweep, FTrace };

std::string_view experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);

struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::BerSweep;
  std::vector<Scheme> schemes{Scheme::SlpInBlock};
  LinkConfig link;           // link.scheme is overwritten per scheme
  std::string output_path;   // empty: standard output
};

// Defaults: B = 5, f_max = 1, P_T = 1, K = N_T = 4, M = 50, 16QAM,
// SNR 0:5:40 dB, 100 channels, seed 1, quantization on.
ExperimentSpec default_spec();

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// "key = value" lines; '#' starts a comment. Throws ConfigError on a line
// without '='.
KeyValues parse_key_values(std::istream& in);

// Throws ConfigError naming the key if it is unknown or the value is malformed.
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);

// Reads a config file on top of default_spec(). Throws ConfigError.
ExperimentSpec load_config_file(const std::string& path);

// "start:step:stop" (inclusive), a comma list, or a single value.
std::vector<double> parse_snr_grid(std::string_view text);

void validate(const ExperimentSpec& spec);

// Column layouts. Sweeps share one schema; F_TRACE has one row per symbol.
std::string_view sweep_csv_header();
std::string_view trace_csv_header();

// Runs every scheme and returns the complete CSV text.
std::string run_experiment(const ExperimentSpec& spec);

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::optional<ExperimentSpec> spec;
  bool inject_budget_fault = false;  // scales allocated powers by 1.01
  std::uint64_t seed = 7;
};

std::vector<SuiteResult> run_verification(const VerifyOptions& opts);

}  // namespace slp
