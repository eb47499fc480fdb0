#include "slp/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>

#include "slp/baselines.hpp"
#include "slp/errors.hpp"
#include "slp/power_alloc.hpp"

namespace slp {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + s + "' for key '" + std::string(key) + "'",
                      std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string v = lower(trim(text));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean '" + v + "' for key '" + std::string(key) + "'",
                    std::string(key));
}

int parse_modulation(std::string_view key, std::string_view text) {
  std::string v = lower(trim(text));
  if (v == "qpsk") return 4;
  if (v.size() > 3 && v.ends_with("qam")) v.resize(v.size() - 3);
  const int order = parse_number<int>(key, v);
  build_constellation(order);
  return order;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string modulation_label(int order) {
  return order == 4 ? "QPSK" : std::to_string(order) + "QAM";
}

}  // namespace

std::string_view experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::BerSweep: return "BER_SWEEP";
    case ExperimentKind::ThroughputSweep: return "THROUGHPUT_SWEEP";
    case ExperimentKind::FTrace: return "F_TRACE";
  }
  return "UNKNOWN";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
  const std::string v = lower(trim(name));
  for (auto k : {ExperimentKind::BerSweep, ExperimentKind::ThroughputSweep,
                 ExperimentKind::FTrace}) {
    if (v == lower(experiment_name(k))) return k;
  }
  return std::nullopt;
}

ExperimentSpec default_spec() {
  ExperimentSpec spec;
  spec.link.snr_db = parse_snr_grid("0:5:40");
  return spec;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    out.emplace_back(trim(std::string_view(content).substr(0, eq)),
                     trim(std::string_view(content).substr(eq + 1)));
  }
  return out;
}

std::vector<double> parse_snr_grid(std::string_view text) {
  const std::string s = trim(text);
  std::vector<double> grid;
  if (s.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const auto colon = s.find(':', start);
      parts.push_back(parse_number<double>("snr_db", std::string_view(s).substr(start, colon - start)));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3) throw ConfigError("snr_db range must be start:step:stop", "snr_db");
    const double first = parts[0], step = parts[1], stop = parts[2];
    if (step == 0.0 || (stop - first) * step < 0.0) {
      throw ConfigError("snr_db step must be nonzero and point from start to stop", "snr_db");
    }
    const auto n = static_cast<long>(std::floor((stop - first) / step + 1e-9)) + 1;
    if (n > 10000) throw ConfigError("snr_db range has too many points", "snr_db");
    for (long i = 0; i < n; ++i) grid.push_back(first + static_cast<double>(i) * step);
    return grid;
  }
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    grid.push_back(parse_number<double>("snr_db", std::string_view(s).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return grid;
}

void apply_setting(ExperimentSpec& spec, std::string_view raw_key, std::string_view value) {
  const std::string key = trim(raw_key);
  LinkConfig& link = spec.link;
  if (key == "experiment") {
    const auto kind = parse_experiment(value);
    if (!kind) throw ConfigError("unknown experiment '" + trim(value) + "'", key);
    spec.experiment = *kind;
  } else if (key == "schemes" || key == "scheme") {
    spec.schemes.clear();
    std::stringstream ss{std::string(value)};
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto scheme = parse_scheme(trim(item));
      if (!scheme) throw ConfigError("unknown scheme '" + trim(item) + "'", key);
      spec.schemes.push_back(*scheme);
    }
  } else if (key == "modulation") {
    link.modulation = parse_modulation(key, value);
  } else if (key == "users" || key == "K") {
    link.users = parse_number<int>(key, value);
  } else if (key == "antennas" || key == "N_T") {
    link.antennas = parse_number<int>(key, value);
  } else if (key == "block_len" || key == "M") {
    link.block_len = parse_number<int>(key, value);
  } else if (key == "snr_db") {
    link.snr_db = parse_snr_grid(value);
  } else if (key == "channels") {
    link.n_channels = parse_number<int>(key, value);
  } else if (key == "bits_feedback" || key == "B") {
    link.feedback_bits = parse_number<int>(key, value);
  } else if (key == "f_max") {
    link.f_max = parse_number<double>(key, value);
  } else if (key == "total_power") {
    link.total_power = parse_number<double>(key, value);
  } else if (key == "seed") {
    link.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "quantization") {
    link.quantization = parse_bool(key, value);
  } else if (key == "rzf_lambda") {
    const std::string v = lower(trim(value));
    if (v == "auto") {
      link.rzf_lambda.reset();
    } else {
      link.rzf_lambda = parse_number<double>(key, v);
    }
  } else if (key == "workers") {
    link.workers = parse_number<int>(key, value);
  } else if (key == "solver_tol") {
    link.solver.tol = parse_number<double>(key, value);
  } else if (key == "output") {
    spec.output_path = trim(value);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'", key);
  }
}

ExperimentSpec load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", "config");
  ExperimentSpec spec = default_spec();
  for (const auto& [key, value] : parse_key_values(in)) apply_setting(spec, key, value);
  return spec;
}

void validate(const ExperimentSpec& spec) {
  if (spec.schemes.empty()) throw ConfigError("at least one scheme is required", "schemes");
  validate(spec.link);
  if (spec.link.snr_db.empty()) throw ConfigError("snr_db grid is empty", "snr_db");
}

std::string_view sweep_csv_header() {
  return "experiment,scheme,modulation,K,N_T,M,B,snr_db,ber,bler,t_eff,mean_f,f_spread,"
         "n_bits,n_errors,seed";
}

std::string_view trace_csv_header() {
  return "experiment,scheme,modulation,K,N_T,M,B,snr_db,trial,symbol,t,p,f,f_hat,seed";
}

std::string run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  std::ostringstream csv;
  const LinkConfig& base = spec.link;
  auto prefix = [&](Scheme scheme, double snr) {
    return std::string(experiment_name(spec.experiment)) + "," +
           std::string(scheme_name(scheme)) + "," + modulation_label(base.modulation) + "," +
           std::to_string(base.users) + "," + std::to_string(base.antennas) + "," +
           std::to_string(base.block_len) + "," + std::to_string(base.feedback_bits) + "," +
           format_double(snr);
  };

  if (spec.experiment == ExperimentKind::FTrace) {
    csv << trace_csv_header() << '\n';
    const double snr = base.snr_db.front();
    const double sigma2 = base.total_power * sigma2_from_snr(snr, base.block_len);
    for (Scheme scheme : spec.schemes) {
      LinkConfig cfg = base;
      cfg.scheme = scheme;
      Rng ch_rng = channel_stream(cfg.seed, 0);
      const ChannelRealization channel = generate_channel(cfg.users, cfg.antennas, ch_rng);
      Rng rng = block_stream(cfg.seed, 0, 0);
      const BlockResult block = simulate_block(cfg, sigma2, channel, rng);
      for (int m = 0; m < cfg.block_len; ++m) {
        csv << prefix(scheme, snr) << ",0," << m << ',' << format_double(block.t[m]) << ','
            << format_double(block.p[m]) << ',' << format_double(block.f[m]) << ','
            << format_double(block.f_hat[m]) << ',' << cfg.seed << '\n';
      }
    }
    return csv.str();
  }

  csv << sweep_csv_header() << '\n';
  for (Scheme scheme : spec.schemes) {
    LinkConfig cfg = base;
    cfg.scheme = scheme;
    for (const MetricsRecord& r : run_monte_carlo(cfg)) {
      csv << prefix(scheme, r.snr_db) << ',' << format_double(r.ber) << ','
          << format_double(r.bler) << ',' << format_double(r.t_eff) << ','
          << format_double(r.mean_f) << ',' << format_double(r.f_spread) << ',' << r.n_bits
          << ',' << r.n_errors << ',' << cfg.seed << '\n';
    }
  }
  return csv.str();
}

namespace {

SuiteResult make_result(std::string name, double worst, double tol, std::string detail = {}) {
  return {std::move(name), worst <= tol, worst, std::move(detail)};
}

SuiteResult constellation_suite() {
  double worst = 0.0;
  std::string detail;
  for (int order : {4, 16, 64, 256}) {
    const ConstellationSpec spec = build_constellation(order);
    double energy = 0.0;
    for (const auto& p : spec.points) energy += std::norm(p);
    worst = std::max(worst, std::abs(energy / order - 1.0));
    // Gray adjacency and noiseless round trip; violations count as 1.
    const int n = spec.levels_per_axis();
    for (int re = 0; re < n; ++re) {
      for (int im = 0; im < n; ++im) {
        const auto label = spec.label_of(re, im);
        if (demodulate(spec, spec.points[label]).label != label) worst = std::max(worst, 1.0);
        if (re + 1 < n && std::popcount(label ^ spec.label_of(re + 1, im)) != 1) worst = 1.0;
        if (im + 1 < n && std::popcount(label ^ spec.label_of(re, im + 1)) != 1) worst = 1.0;
      }
    }
  }
  return make_result("constellation", worst, 1e-12, "unit energy, Gray adjacency, round trip");
}

std::vector<std::vector<double>> random_margins(std::uint64_t seed, int count) {
  Rng rng = make_substream(seed, {42});
  std::uniform_real_distribution<double> margin(0.05, 3.0);
  std::vector<std::vector<double>> out;
  const int lengths[] = {2, 10, 50};
  for (int i = 0; i < count; ++i) {
    std::vector<double> t(static_cast<std::size_t>(lengths[i % 3]));
    for (auto& v : t) v = margin(rng);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<SuiteResult> run_verification(const VerifyOptions& opts) {
  std::vector<SuiteResult> results;
  results.push_back(constellation_suite());

  const double fault = opts.inject_budget_fault ? 1.01 : 1.0;
  const double total_power = opts.spec ? opts.spec->link.total_power : 1.0;
  const auto margins = random_margins(opts.seed, 300);

  double budget = 0.0, kkt = 0.0, oracle = 0.0, rescale = 0.0;
  for (const auto& t : margins) {
    PowerAllocation alloc = allocate_in_block(t, total_power);
    for (auto& p : alloc.p) p *= fault;
    double sum = 0.0;
    for (double p : alloc.p) sum += p;
    budget = std::max(budget, std::abs(sum - total_power) / total_power);
    kkt = std::max(kkt, verify_kkt(t, alloc.p, total_power).worst());
    const auto numeric = solve_p4_numeric(t, total_power, 1e-15);
    for (std::size_t m = 0; m < t.size(); ++m) {
      oracle = std::max(oracle, std::abs(numeric[m] - alloc.p[m]) / alloc.p[m]);
      rescale = std::max(rescale,
                         std::abs(per_symbol_rescaling(t[m], alloc.p[m]) / *alloc.f - 1.0));
    }
  }
  results.push_back(make_result("power_budget", budget, 1e-12, "relative |sum p - P_T|"));
  results.push_back(make_result("kkt_certificate", kkt, 1e-9, "worst KKT residual"));
  results.push_back(make_result("p4_oracle", oracle, 1e-8, "closed form vs bisection"));
  results.push_back(make_result("block_rescaling", rescale, 1e-9, "max |f_m / f - 1|"));

  // CI solutions on sampled channels and symbols.
  const int users = opts.spec ? opts.spec->link.users : 4;
  const int antennas = opts.spec ? opts.spec->link.antennas : 4;
  const int order = opts.spec ? opts.spec->link.modulation : 16;
  const SolverOptions solver = opts.spec ? opts.spec->link.solver : SolverOptions{};
  const ConstellationSpec qam = build_constellation(order);
  Rng rng = make_substream(opts.seed, {43});
  std::uniform_int_distribution<int> pick(0, order - 1);
  double slp_worst = 0.0;
  int not_optimal = 0;
  for (int i = 0; i < 100; ++i) {
    const ChannelRealization ch = generate_channel(users, antennas, rng);
    std::vector<cdouble> s(static_cast<std::size_t>(users));
    for (auto& v : s) v = qam.points[pick(rng)];
    const CiInstance inst = build_instance(ch, s, qam);
    const SlpSolution sol = solve_ci_max(inst, solver);
    if (sol.status != SolverStatus::Optimal) ++not_optimal;
    slp_worst = std::max({slp_worst, verify_solution(inst, sol, 1e-6).worst(), sol.duality_gap});
  }
  if (not_optimal > 0) slp_worst = std::max(slp_worst, 1.0);
  results.push_back(make_result("ci_solution", slp_worst, 1e-6,
                                "C1-C4 residuals and duality gap, " + std::to_string(users) +
                                    "x" + std::to_string(antennas) + " " +
                                    modulation_label(order)));

  if (opts.spec) {
    // Link-level invariants on the configured geometry, noiseless.
    LinkConfig cfg = opts.spec->link;
    cfg.quantization = false;
    double spread = 0.0, energy = 0.0;
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
      Rng ch_rng = channel_stream(cfg.seed, trial);
      const ChannelRealization ch = generate_channel(cfg.users, cfg.antennas, ch_rng);
      for (Scheme scheme : {Scheme::SlpInBlock, Scheme::SlpUniform}) {
        cfg.scheme = scheme;
        Rng blk = block_stream(cfg.seed, 0, trial);
        const BlockResult b = simulate_block(cfg, 0.0, ch, blk);
        if (scheme == Scheme::SlpInBlock) spread = std::max(spread, b.f_spread());
        energy = std::max(energy, b.tx_energy - cfg.total_power);
        if (b.n_bit_errors > 0) spread = std::max(spread, 1.0);
      }
    }
    results.push_back(make_result("block_f_invariance", spread, 1e-6,
                                  "in-block f spread, noiseless zero BER"));
    results.push_back(make_result("slp_power_accounting", std::max(energy, 0.0), 1e-9,
                                  "sum_m p_m ||x_m||^2 - P_T"));
  }
  return results;
}

}  // namespace slp
