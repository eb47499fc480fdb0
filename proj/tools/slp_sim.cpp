// slp_sim: link-level experiments for symbol-level precoding with block-level
// rescaling-factor broadcast.
//
//   slp_sim run    [--config FILE] [overrides...]   CSV to --out or stdout
//   slp_sim verify [--config FILE] [overrides...]   invariant suites
//
// Exit codes: 0 success, 1 validation error, 2 runtime/solver failure,
// 3 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slp/errors.hpp"
#include "slp/experiment.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerification = 3;

struct Overrides {
  std::string config;
  std::vector<std::string> schemes;
  std::optional<std::string> modulation, users, antennas, block_len, snr_db, channels,
      bits_feedback, seed, output, experiment;
  bool no_quantization = false;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value experiment file");
  cmd->add_option("--scheme", o.schemes,
                  "SLP_IN_BLOCK, SLP_UNIFORM, ZF, RZF (repeatable or comma list)");
  cmd->add_option("--mod", o.modulation, "QAM order: 4, 16, 64, 256 (or 16QAM)");
  cmd->add_option("--users", o.users, "number of users K");
  cmd->add_option("--antennas", o.antennas, "transmit antennas N_T");
  cmd->add_option("--block-len", o.block_len, "symbol durations per block M");
  cmd->add_option("--snr-db", o.snr_db, "start:step:stop or comma list, dB");
  cmd->add_option("--channels", o.channels, "channel realizations per SNR point");
  cmd->add_option("--bits-feedback", o.bits_feedback, "bits B per rescaling-factor broadcast");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.output, "CSV output path (default stdout)");
  cmd->add_option("--experiment", o.experiment, "BER_SWEEP, THROUGHPUT_SWEEP, F_TRACE");
  cmd->add_flag("--no-quantization", o.no_quantization, "ideal rescaling-factor broadcast");
}

slp::ExperimentSpec resolve_spec(const Overrides& o) {
  slp::ExperimentSpec spec = o.config.empty() ? slp::default_spec()
                                              : slp::load_config_file(o.config);
  auto apply = [&](const char* key, const std::optional<std::string>& v) {
    if (v) slp::apply_setting(spec, key, *v);
  };
  if (!o.schemes.empty()) {
    std::string joined;
    for (const auto& s : o.schemes) joined += (joined.empty() ? "" : ",") + s;
    slp::apply_setting(spec, "schemes", joined);
  }
  apply("modulation", o.modulation);
  apply("users", o.users);
  apply("antennas", o.antennas);
  apply("block_len", o.block_len);
  apply("snr_db", o.snr_db);
  apply("channels", o.channels);
  apply("bits_feedback", o.bits_feedback);
  apply("seed", o.seed);
  apply("output", o.output);
  apply("experiment", o.experiment);
  if (o.no_quantization) spec.link.quantization = false;
  slp::validate(spec);
  return spec;
}

int run_command(const Overrides& o) {
  const slp::ExperimentSpec spec = resolve_spec(o);
  std::ofstream file;
  if (!spec.output_path.empty()) {
    file.open(spec.output_path, std::ios::binary | std::ios::trunc);
    if (!file) throw slp::ConfigError("output path is not writable: " + spec.output_path, "output");
  }
  const std::string csv = slp::run_experiment(spec);
  std::ostream& out = spec.output_path.empty() ? std::cout : file;
  out << csv;
  out.flush();
  if (!out) {
    std::cerr << "error: failed writing CSV output\n";
    return kExitRuntime;
  }
  return 0;
}

int verify_command(const Overrides& o, const std::string& fault) {
  slp::VerifyOptions opts;
  const bool has_spec = !o.config.empty() || o.users || o.antennas || o.modulation ||
                        o.block_len || o.seed;
  if (has_spec) opts.spec = resolve_spec(o);
  if (!fault.empty()) {
    if (fault != "budget") throw slp::ConfigError("unknown fault '" + fault + "'", "inject-fault");
    opts.inject_budget_fault = true;
  }
  bool all = true;
  for (const auto& r : slp::run_verification(opts)) {
    std::printf("%-22s %s  worst=%.3e  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                r.worst, r.detail.c_str());
    all = all && r.passed;
  }
  return all ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbol-level precoding link simulator"};
  app.require_subcommand(1);

  Overrides run_opts;
  CLI::App* run = app.add_subcommand("run", "run an experiment and emit CSV");
  add_override_flags(run, run_opts);

  Overrides verify_opts;
  std::string fault;
  CLI::App* verify = app.add_subcommand("verify", "run KKT, oracle and solution suites");
  add_override_flags(verify, verify_opts);
  verify->add_option("--inject-fault", fault, "corrupt a quantity to exercise the verifier")
      ->check(CLI::IsMember({"budget"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return run_command(run_opts);
    return verify_command(verify_opts, fault);
  } catch (const slp::ConfigError& e) {
    std::cerr << "configuration error";
    if (!e.key().empty()) std::cerr << " [" << e.key() << "]";
    std::cerr << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
