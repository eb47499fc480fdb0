#include "slp/link_sim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>

#include "slp/baselines.hpp"
#include "slp/errors.hpp"
#include "slp/power_alloc.hpp"

namespace slp {

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::SlpInBlock: return "SLP_IN_BLOCK";
    case Scheme::SlpUniform: return "SLP_UNIFORM";
    case Scheme::Zf: return "ZF";
    case Scheme::Rzf: return "RZF";
  }
  return "UNKNOWN";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  std::string upper(name);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Scheme s : {Scheme::SlpInBlock, Scheme::SlpUniform, Scheme::Zf, Scheme::Rzf}) {
    if (upper == scheme_name(s)) return s;
  }
  return std::nullopt;
}

bool broadcasts_per_symbol(Scheme scheme) { return scheme == Scheme::SlpUniform; }

void validate(const LinkConfig& cfg) {
  if (cfg.users < 1) throw ConfigError("users must be >= 1", "users");
  if (cfg.antennas < 1) throw ConfigError("antennas must be >= 1", "antennas");
  if (cfg.users > cfg.antennas) {
    throw ConfigError("users (K = " + std::to_string(cfg.users) + ") exceeds antennas (N_T = " +
                          std::to_string(cfg.antennas) + "); constraint K <= N_T",
                      "users");
  }
  if (cfg.block_len < 1) throw ConfigError("block_len must be >= 1", "block_len");
  build_constellation(cfg.modulation);
  if (!(cfg.total_power > 0.0)) throw ConfigError("total_power must be > 0", "total_power");
  if (cfg.feedback_bits < 1 || cfg.feedback_bits > 62) {
    throw ConfigError("bits_feedback must be in [1, 62]", "bits_feedback");
  }
  if (!(cfg.f_max > 0.0)) throw ConfigError("f_max must be > 0", "f_max");
  if (cfg.n_channels < 0) throw ConfigError("channels must be >= 0", "channels");
  for (double snr : cfg.snr_db) {
    if (!std::isfinite(snr)) throw ConfigError("snr_db values must be finite", "snr_db");
  }
  if (cfg.rzf_lambda && !(*cfg.rzf_lambda >= 0.0)) {
    throw ConfigError("rzf_lambda must be >= 0", "rzf_lambda");
  }
  if (cfg.workers < 0) throw ConfigError("workers must be >= 0", "workers");
}

double quantization_variance(int feedback_bits, double f_max) {
  return f_max / std::ldexp(1.0, feedback_bits);
}

double quantize_broadcast(double f, int feedback_bits, double f_max, Rng& rng, bool* clamped) {
  std::normal_distribution<double> gauss;
  const double eps = std::sqrt(quantization_variance(feedback_bits, f_max)) * gauss(rng);
  const double f_hat = f + eps;
  const bool floor_hit = f_hat < kMinRescaling;
  if (clamped) *clamped = floor_hit;
  return floor_hit ? kMinRescaling : f_hat;
}

double BlockResult::f_spread() const {
  double spread = 0.0;
  for (double fm : f) spread = std::max(spread, std::abs(fm / f.front() - 1.0));
  return spread;
}

BlockResult simulate_block(const LinkConfig& cfg, double sigma2,
                           const ChannelRealization& channel, Rng& rng) {
  const ConstellationSpec spec = build_constellation(cfg.modulation);
  const int K = channel.users();
  const int M = cfg.block_len;
  const int q = spec.bits_per_symbol();

  // Labels of user k in symbol duration m, drawn from raw 64-bit words.
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(K) * M);
  {
    std::uint64_t word = 0;
    int available = 0;
    for (auto& label : labels) {
      if (available < q) {
        word = rng();
        available = 64;
      }
      label = static_cast<std::uint32_t>(word & ((1u << q) - 1));
      word >>= q;
      available -= q;
    }
  }
  auto label_at = [&](int k, int m) { return labels[static_cast<std::size_t>(m) * K + k]; };
  const std::vector<cdouble> noise = sample_noise({sigma2}, labels.size(), rng);

  BlockResult out;
  out.t.resize(M);
  out.f.resize(M);
  std::vector<Eigen::VectorXcd> tx(M);
  std::vector<Eigen::VectorXcd> symbols(M, Eigen::VectorXcd(K));
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) symbols[m](k) = spec.points[label_at(k, m)];
  }

  std::optional<double> block_f;
  if (cfg.scheme == Scheme::SlpInBlock || cfg.scheme == Scheme::SlpUniform) {
    for (int m = 0; m < M; ++m) {
      const CiInstance inst = build_instance(
          channel, std::span<const cdouble>(symbols[m].data(), K), spec);
      SlpSolution sol = solve_ci_max(inst, cfg.solver);
      if (sol.status != SolverStatus::Optimal) {
        throw NumericalError("CI solve did not converge at symbol " + std::to_string(m));
      }
      out.t[m] = sol.t;
      tx[m] = std::move(sol.x);
    }
    PowerAllocation alloc = cfg.scheme == Scheme::SlpInBlock
                                ? allocate_in_block(out.t, cfg.total_power)
                                : allocate_uniform(M, cfg.total_power);
    out.p = std::move(alloc.p);
    for (int m = 0; m < M; ++m) out.f[m] = per_symbol_rescaling(out.t[m], out.p[m]);
    block_f = alloc.f;
  } else {
    LinearPrecoder pre;
    if (cfg.scheme == Scheme::Zf) {
      pre = zf_precoder(channel.H);
    } else if (cfg.rzf_lambda) {
      pre = rzf_precoder(channel.H, *cfg.rzf_lambda);
    } else {
      pre = rzf_precoder(channel.H, sigma2, M, cfg.total_power);
    }
    out.p = allocate_uniform(M, cfg.total_power).p;
    const double f = baseline_rescaling(pre, out.p.front());
    for (int m = 0; m < M; ++m) {
      tx[m] = pre.W * symbols[m];
      out.t[m] = pre.beta;
      out.f[m] = f;
    }
    block_f = f;
  }

  // Broadcast of the rescaling factor(s).
  out.f_hat.resize(M);
  auto broadcast = [&](double f) {
    if (!cfg.quantization) return f;
    bool clamped = false;
    const double f_hat = quantize_broadcast(f, cfg.feedback_bits, cfg.f_max, rng, &clamped);
    if (clamped) ++out.clamp_events;
    return f_hat;
  };
  if (broadcasts_per_symbol(cfg.scheme)) {
    for (int m = 0; m < M; ++m) out.f_hat[m] = broadcast(out.f[m]);
  } else {
    std::fill(out.f_hat.begin(), out.f_hat.end(), broadcast(*block_f));
  }

  std::vector<char> user_error(K, 0);
  for (int m = 0; m < M; ++m) {
    const double amp = std::sqrt(out.p[m]);
    out.tx_energy += out.p[m] * tx[m].squaredNorm();
    const Eigen::VectorXcd y = channel.H * tx[m];
    for (int k = 0; k < K; ++k) {
      const cdouble r = out.f_hat[m] * (amp * y(k) + noise[static_cast<std::size_t>(m) * K + k]);
      const Decision d = demodulate(spec, r);
      const int errors = std::popcount(d.label ^ label_at(k, m));
      out.n_bit_errors += static_cast<std::uint64_t>(errors);
      if (errors) user_error[k] = 1;
    }
  }
  out.n_bits = static_cast<std::uint64_t>(labels.size()) * q;
  out.n_user_blocks = static_cast<std::uint64_t>(K);
  out.n_user_block_errors =
      static_cast<std::uint64_t>(std::count(user_error.begin(), user_error.end(), 1));
  return out;
}

double effective_throughput(double ber, int modulation, int users, int block_len,
                            int feedback_bits, Scheme scheme) {
  if (!(ber >= 0.0 && ber <= 1.0)) throw std::domain_error("bit error rate outside [0, 1]");
  const double bits_per_symbol = std::log2(static_cast<double>(modulation));
  const double overhead = broadcasts_per_symbol(scheme)
                              ? static_cast<double>(feedback_bits)
                              : static_cast<double>(feedback_bits) / block_len;
  const double goodput =
      std::pow(1.0 - ber, block_len * bits_per_symbol) * bits_per_symbol * users;
  return std::max(goodput - overhead, 0.0);
}

Rng channel_stream(std::uint64_t seed, std::uint64_t trial) {
  return make_substream(seed, {0, trial});
}

Rng block_stream(std::uint64_t seed, std::uint64_t snr_index, std::uint64_t trial) {
  return make_substream(seed, {1, snr_index, trial});
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SLP_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

struct TrialOutcome {
  bool ok = false;
  std::uint64_t n_bits = 0;
  std::uint64_t n_bit_errors = 0;
  std::uint64_t n_user_blocks = 0;
  std::uint64_t n_user_block_errors = 0;
  double mean_f = 0.0;
  double f_spread = 0.0;
  int clamp_events = 0;
};

}  // namespace

std::vector<MetricsRecord> run_monte_carlo(const LinkConfig& cfg) {
  validate(cfg);
  if (cfg.n_channels == 0 || cfg.snr_db.empty()) return {};

  const std::size_t n_snr = cfg.snr_db.size();
  const std::size_t n_trials = static_cast<std::size_t>(cfg.n_channels);
  std::vector<TrialOutcome> outcomes(n_snr * n_trials);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t job = next++; job < outcomes.size(); job = next++) {
      const std::size_t j = job / n_trials;
      const std::size_t i = job % n_trials;
      TrialOutcome& o = outcomes[job];
      try {
        Rng ch_rng = channel_stream(cfg.seed, i);
        const ChannelRealization channel = generate_channel(cfg.users, cfg.antennas, ch_rng);
        Rng rng = block_stream(cfg.seed, j, i);
        const double sigma2 = cfg.total_power * sigma2_from_snr(cfg.snr_db[j], cfg.block_len);
        const BlockResult b = simulate_block(cfg, sigma2, channel, rng);
        o.n_bits = b.n_bits;
        o.n_bit_errors = b.n_bit_errors;
        o.n_user_blocks = b.n_user_blocks;
        o.n_user_block_errors = b.n_user_block_errors;
        double f_sum = 0.0;
        for (double f : b.f) f_sum += f;
        o.mean_f = f_sum / static_cast<double>(b.f.size());
        o.f_spread = b.f_spread();
        o.clamp_events = b.clamp_events;
        o.ok = true;
      } catch (const std::exception& e) {
        std::lock_guard lock(log_mutex);
        std::cerr << "trial failed: scheme=" << scheme_name(cfg.scheme) << " seed=" << cfg.seed
                  << " snr_index=" << j << " trial=" << i << ": " << e.what() << '\n';
      }
    }
  };

  const int n_workers = std::min<int>(resolve_workers(cfg.workers),
                                      static_cast<int>(outcomes.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  std::vector<MetricsRecord> records(n_snr);
  const double bits_per_block = cfg.block_len * std::log2(static_cast<double>(cfg.modulation));
  for (std::size_t j = 0; j < n_snr; ++j) {
    MetricsRecord& r = records[j];
    r.snr_db = cfg.snr_db[j];
    std::uint64_t user_blocks = 0;
    std::uint64_t user_block_errors = 0;
    double f_sum = 0.0;
    for (std::size_t i = 0; i < n_trials; ++i) {
      const TrialOutcome& o = outcomes[j * n_trials + i];
      if (!o.ok) {
        r.failed_trials.push_back(static_cast<int>(i));
        continue;
      }
      ++r.n_blocks;
      r.n_bits += o.n_bits;
      r.n_errors += o.n_bit_errors;
      user_blocks += o.n_user_blocks;
      user_block_errors += o.n_user_block_errors;
      f_sum += o.mean_f;
      r.f_spread = std::max(r.f_spread, o.f_spread);
      r.clamp_events += o.clamp_events;
    }
    if (r.n_bits > 0) r.ber = static_cast<double>(r.n_errors) / static_cast<double>(r.n_bits);
    if (user_blocks > 0) {
      r.bler_counted = static_cast<double>(user_block_errors) / static_cast<double>(user_blocks);
    }
    if (r.n_blocks > 0) r.mean_f = f_sum / static_cast<double>(r.n_blocks);
    r.bler = 1.0 - std::pow(1.0 - r.ber, bits_per_block);
    r.t_eff = effective_throughput(r.ber, cfg.modulation, cfg.users, cfg.block_len,
                                   cfg.feedback_bits, cfg.scheme);
    if (r.clamp_events > 0) {
      std::cerr << "note: rescaling factor floor applied " << r.clamp_events
                << " times at snr_db=" << r.snr_db << '\n';
    }
  }
  return records;
}

}  // namespace slp
