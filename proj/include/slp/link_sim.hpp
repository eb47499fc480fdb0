#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slp/channel.hpp"
#include "slp/constellation.hpp"
#include "slp/slp_core.hpp"

namespace slp {

enum class Scheme { SlpInBlock, SlpUniform, Zf, Rzf };

std::string_view scheme_name(Scheme scheme);
// Accepts SLP_IN_BLOCK, SLP_UNIFORM, ZF, RZF (case-insensitive).
std::optional<Scheme> parse_scheme(std::string_view name);

// SLP_UNIFORM needs the rescaling factor every symbol duration; all other
// schemes broadcast it once per block.
bool broadcasts_per_symbol(Scheme scheme);

struct LinkConfig {
  int users = 4;
  int antennas = 4;
  int block_len = 50;
  int modulation = 16;
  Scheme scheme = Scheme::SlpInBlock;
  double total_power = 1.0;
  std::vector<double> snr_db;
  int feedback_bits = 5;
  double f_max = 1.0;
  int n_channels = 100;
  std::uint64_t seed = 1;
  bool quantization = true;
  std::optional<double> rzf_lambda;  // overrides the MMSE-style default
  int workers = 0;                   // 0: SLP_WORKERS env var, else hardware
  SolverOptions solver;
};

// Throws ConfigError naming the offending key.
void validate(const LinkConfig& cfg);

// Variance of the additive broadcast error, f_max / 2^B.
double quantization_variance(int feedback_bits, double f_max);

inline constexpr double kMinRescaling = 1e-6;

// f_hat = f + eps with eps ~ N(0, f_max / 2^B), floored at kMinRescaling.
// Sets *clamped when the floor was applied.
double quantize_broadcast(double f, int feedback_bits, double f_max, Rng& rng,
                          bool* clamped = nullptr);

struct BlockResult {
  std::uint64_t n_bits = 0;
  std::uint64_t n_bit_errors = 0;
  std::uint64_t n_user_blocks = 0;
  std::uint64_t n_user_block_errors = 0;
  // Per symbol duration: CI margin (receive scale beta for linear
  // precoders), power, ideal and broadcast rescaling factors.
  std::vector<double> t;
  std::vector<double> p;
  std::vector<double> f;
  std::vector<double> f_hat;
  double tx_energy = 0.0;  // sum_m p_m ||x_m||^2
  int clamp_events = 0;

  double f_spread() const;  // max_m |f_m / f_1 - 1|
};

// One transmission block over a fixed channel. Draw order from rng: data
// bits, receiver noise, then the rescaling-factor broadcast errors.
// Throws NumericalError if a per-symbol solve or the baseline design fails.
BlockResult simulate_block(const LinkConfig& cfg, double sigma2,
                           const ChannelRealization& channel, Rng& rng);

// T_eff = max{(1 - P_b)^(M log2 Mbar) log2(Mbar) K - N_overhead, 0} with
// N_overhead = B for SLP_UNIFORM and B / M otherwise.
double effective_throughput(double ber, int modulation, int users, int block_len,
                            int feedback_bits, Scheme scheme);

struct MetricsRecord {
  double snr_db = 0.0;
  double ber = 0.0;
  double bler = 0.0;          // 1 - (1 - P_b)^(M log2 Mbar)
  double bler_counted = 0.0;  // fraction of erroneous user blocks
  double t_eff = 0.0;
  std::uint64_t n_bits = 0;
  std::uint64_t n_errors = 0;
  double mean_f = 0.0;
  double f_spread = 0.0;  // worst block
  std::uint64_t n_blocks = 0;
  int clamp_events = 0;
  std::vector<int> failed_trials;
};

// Substream layout: the channel of trial i comes from (seed, 0, i) and is
// shared by every SNR point and scheme; data, noise and broadcast errors of
// (SNR index j, trial i) come from (seed, 1, j, i).
Rng channel_stream(std::uint64_t seed, std::uint64_t trial);
Rng block_stream(std::uint64_t seed, std::uint64_t snr_index, std::uint64_t trial);

int resolve_workers(int requested);

// One record per SNR point. Failed trials are reported on stderr with their
// (seed, snr index, trial) and excluded from the aggregates.
std::vector<MetricsRecord> run_monte_carlo(const LinkConfig& cfg);

}  // namespace slp
