// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "slp/experiment.hpp"
#include "slp/link_sim.hpp"
#include "slp/power_alloc.hpp"
#include "slp/slp_core.hpp"

using namespace slp;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const char* id, bool ok, double seconds, const std::string& detail) {
  std::printf("%-4s %s  (%.1f s)  %s\n", id, ok ? "PASS" : "FAIL", seconds, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::vector<cdouble> random_symbols(const ConstellationSpec& spec, int K, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, spec.order - 1);
  std::vector<cdouble> s(static_cast<std::size_t>(K));
  for (auto& v : s) v = spec.points[pick(rng)];
  return s;
}

void identical_in_block_factor() {
  const auto start = Clock::now();
  bool ok = true;
  double worst_in_block = 0.0;
  int uniform_spread_blocks = 0;
  std::string detail;
  for (int order : {16, 64}) {
    LinkConfig cfg;
    cfg.users = 4;
    cfg.antennas = 4;
    cfg.block_len = 10;
    cfg.modulation = order;
    cfg.quantization = false;
    cfg.seed = 101;
    const double sigma2 = sigma2_from_snr(20.0, cfg.block_len);
    int spread_blocks = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      Rng ch_rng = channel_stream(cfg.seed, trial);
      const auto ch = generate_channel(cfg.users, cfg.antennas, ch_rng);
      cfg.scheme = Scheme::SlpInBlock;
      Rng a = block_stream(cfg.seed, 0, trial);
      worst_in_block = std::max(worst_in_block, simulate_block(cfg, sigma2, ch, a).f_spread());
      cfg.scheme = Scheme::SlpUniform;
      Rng b = block_stream(cfg.seed, 0, trial);
      if (simulate_block(cfg, sigma2, ch, b).f_spread() > 1e-3) ++spread_blocks;
    }
    ok = ok && spread_blocks >= 99;
    uniform_spread_blocks += spread_blocks;
    detail += std::to_string(order) + "QAM uniform spread blocks " +
              std::to_string(spread_blocks) + "/100; ";
  }
  ok = ok && worst_in_block <= 1e-6;
  const double secs = since(start);
  report("C1", ok && secs < 60.0, secs,
         detail + fmt("worst in-block spread %.2e", worst_in_block));
}

void closed_form_vs_oracle() {
  const auto start = Clock::now();
  Rng rng = make_substream(202, {});
  std::uniform_real_distribution<double> margin(0.01, 10.0);
  const int lengths[] = {2, 10, 50};
  double worst_rel = 0.0, worst_kkt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> t(static_cast<std::size_t>(lengths[i % 3]));
    for (auto& v : t) v = margin(rng);
    const auto closed = allocate_in_block(t, 1.0);
    const auto numeric = solve_p4_numeric(t, 1.0, 1e-15);
    for (std::size_t m = 0; m < t.size(); ++m) {
      worst_rel = std::max(worst_rel, std::abs(numeric[m] - closed.p[m]) / closed.p[m]);
    }
    worst_kkt = std::max(worst_kkt, verify_kkt(t, closed.p, 1.0).worst());
  }
  const double secs = since(start);
  report("C2", worst_rel <= 1e-8 && worst_kkt <= 1e-9 && secs < 10.0, secs,
         fmt("worst relative gap %.2e, worst KKT residual %.2e", worst_rel, worst_kkt));
}

void solver_correctness() {
  const auto start = Clock::now();
  const auto qam16 = build_constellation(16);
  const double r10 = std::sqrt(10.0);
  double worst_residual = 0.0, worst_norm = 0.0;
  auto track = [&](const CiInstance& inst, const SlpSolution& sol) {
    const auto rep = verify_solution(inst, sol, 1e-6);
    worst_residual = std::max({worst_residual, rep.c1, rep.c2, rep.c3});
    worst_norm = std::max(worst_norm, std::abs(sol.x.norm() - 1.0));
  };

  ChannelRealization one;
  one.H = Eigen::MatrixXcd::Ones(1, 1);
  const std::vector<cdouble> inner = {{1 / r10, 1 / r10}};
  const std::vector<cdouble> corner = {{3 / r10, 3 / r10}};
  const auto inst_a = build_instance(one, inner, qam16);
  const auto inst_b = build_instance(one, corner, qam16);
  const auto sol_a = solve_ci_max(inst_a);
  const auto sol_b = solve_ci_max(inst_b);
  track(inst_a, sol_a);
  track(inst_b, sol_b);
  const double analytic_err = std::max(std::abs(sol_a.t - std::sqrt(5.0)),
                                       std::abs(sol_b.t - std::sqrt(5.0) / 3.0));

  Rng rng = make_substream(303, {});
  double worst_oracle = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto ch = generate_channel(2, 2, rng);
    const auto s = random_symbols(qam16, 2, rng);
    const auto inst = build_instance(ch, s, qam16);
    const auto sol = solve_ci_max(inst);
    track(inst, sol);
    std::vector<bool> mask(4, false);
    for (const auto& c : inst.inner) mask[2 * c.user + (c.axis == Axis::Imag ? 1 : 0)] = true;
    const auto ref = oracle::ci_margin_square(inst.H, inst.s, mask, 1'000'000);
    worst_oracle = std::max(worst_oracle, std::abs(sol.t - ref.t));
  }
  const double secs = since(start);
  const bool ok = analytic_err <= 1e-6 && worst_oracle <= 1e-3 && worst_norm <= 1e-6 &&
                  worst_residual <= 1e-6 && secs < 120.0;
  report("C3", ok, secs,
         fmt("analytic err %.2e, oracle gap %.2e, norm err %.2e, residual %.2e", analytic_err,
             worst_oracle, worst_norm, worst_residual));
}

void noiseless_correctness() {
  const auto start = Clock::now();
  LinkConfig cfg;
  cfg.users = 4;
  cfg.antennas = 4;
  cfg.block_len = 20;
  cfg.modulation = 16;
  cfg.quantization = false;
  cfg.seed = 404;
  std::uint64_t errors = 0, bits = 0;
  for (Scheme scheme : {Scheme::SlpInBlock, Scheme::SlpUniform, Scheme::Zf}) {
    cfg.scheme = scheme;
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
      Rng ch_rng = channel_stream(cfg.seed, trial);
      const auto ch = generate_channel(cfg.users, cfg.antennas, ch_rng);
      Rng rng = block_stream(cfg.seed, 0, trial);
      const auto b = simulate_block(cfg, 0.0, ch, rng);
      errors += b.n_bit_errors;
      bits += b.n_bits;
    }
  }
  report("C4", errors == 0, since(start),
         std::to_string(errors) + " errors in " + std::to_string(bits) + " bits");
}

// True when count b exceeds count a by more than 3 sigma of counting noise.
bool significantly_greater(std::uint64_t b, std::uint64_t a) {
  const double diff = static_cast<double>(b) - static_cast<double>(a);
  return diff > 3.0 * std::sqrt(static_cast<double>(a + b));
}

void ordering_criteria() {
  const auto start = Clock::now();
  LinkConfig cfg;
  cfg.users = 4;
  cfg.antennas = 4;
  cfg.block_len = 50;
  cfg.modulation = 16;
  cfg.n_channels = 500;
  cfg.feedback_bits = 5;
  cfg.f_max = 1.0;
  cfg.quantization = true;
  cfg.snr_db = {20, 25, 30, 35};
  cfg.seed = 505;
  auto last = [&](Scheme scheme) {
    cfg.scheme = scheme;
    return run_monte_carlo(cfg).back();
  };
  const auto in_block = last(Scheme::SlpInBlock);
  const auto uniform = last(Scheme::SlpUniform);
  const auto zf = last(Scheme::Zf);
  const auto rzf = last(Scheme::Rzf);
  const double secs = since(start);

  const bool ber_ok = significantly_greater(rzf.n_errors, in_block.n_errors) &&
                      significantly_greater(uniform.n_errors, in_block.n_errors);
  report("C5", ber_ok && secs < 900.0, secs,
         "errors at 35 dB: SLP_IN_BLOCK " + std::to_string(in_block.n_errors) + ", RZF " +
             std::to_string(rzf.n_errors) + ", SLP_UNIFORM " +
             std::to_string(uniform.n_errors) + " of " + std::to_string(in_block.n_bits));

  const bool ordered = in_block.t_eff > zf.t_eff && in_block.t_eff > uniform.t_eff;
  const double block_limit = std::log2(16.0) * 4 - 5.0 / 50;
  const double uniform_limit = std::log2(16.0) * 4 - 5.0;
  bool exact = true;
  for (Scheme s : {Scheme::SlpInBlock, Scheme::Zf, Scheme::Rzf}) {
    exact = exact && effective_throughput(0.0, 16, 4, 50, 5, s) == block_limit;
  }
  exact = exact && effective_throughput(0.0, 16, 4, 50, 5, Scheme::SlpUniform) == uniform_limit;
  report("C6", ordered && exact, 0.0,
         fmt("T_eff at 35 dB: SLP_IN_BLOCK %.4f, ZF %.4f, SLP_UNIFORM %.4f", in_block.t_eff,
             zf.t_eff, uniform.t_eff) +
             (exact ? "; limits exact" : "; limits mismatch"));
}

void quantization_model() {
  const auto start = Clock::now();
  Rng rng = make_substream(707, {});
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = quantize_broadcast(20.0, 5, 1.0, rng) - 20.0;
    sum += e;
    sq += e * e;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  const double rel = std::abs(var / 0.03125 - 1.0);
  report("C7", rel <= 0.03, since(start),
         fmt("empirical variance %.6f, relative error %.4f", var, rel));
}

void determinism() {
  const auto start = Clock::now();
  bool ok = true;
  for (ExperimentKind kind :
       {ExperimentKind::BerSweep, ExperimentKind::ThroughputSweep, ExperimentKind::FTrace}) {
    ExperimentSpec spec = default_spec();
    spec.experiment = kind;
    spec.schemes = {Scheme::SlpInBlock, Scheme::SlpUniform, Scheme::Zf, Scheme::Rzf};
    spec.link.block_len = 20;
    spec.link.n_channels = 20;
    spec.link.snr_db = {10, 25};
    spec.link.workers = 4;
    spec.link.seed = 808;
    ok = ok && run_experiment(spec) == run_experiment(spec);
  }
  report("C8", ok, since(start), "BER_SWEEP, THROUGHPUT_SWEEP, F_TRACE reruns compared");
}

void performance(Clock::time_point suite_start) {
  const auto qam64 = build_constellation(64);
  Rng rng = make_substream(909, {});
  std::vector<double> ms;
  for (int i = 0; i < 101; ++i) {
    const auto ch = generate_channel(12, 12, rng);
    const auto s = random_symbols(qam64, 12, rng);
    const auto inst = build_instance(ch, s, qam64);
    const auto t0 = Clock::now();
    const auto sol = solve_ci_max(inst);
    ms.push_back(1e3 * since(t0));
    if (sol.status != SolverStatus::Optimal) ms.back() = INFINITY;
  }
  std::nth_element(ms.begin(), ms.begin() + 50, ms.end());
  const double median = ms[50];
  const double total = since(suite_start);
  report("C9", median < 50.0 && total < 1800.0, total,
         fmt("median 12x12 64QAM solve %.3f ms, suite %.1f s", median, total));
}

}  // namespace

int main() {
  const auto suite_start = Clock::now();
  identical_in_block_factor();
  closed_form_vs_oracle();
  solver_correctness();
  noiseless_correctness();
  ordering_criteria();
  quantization_model();
  determinism();
  performance(suite_start);
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
