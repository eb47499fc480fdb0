#include "slp/channel.hpp"

#include <cmath>
#include <string>

#include "slp/errors.hpp"

namespace slp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng make_substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = splitmix64(seed);
  for (std::uint64_t counter : path) state = splitmix64(state ^ splitmix64(counter + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32)};
  return Rng(seq);
}

ChannelRealization generate_channel(int users, int antennas, Rng& rng) {
  if (users < 1 || antennas < 1) {
    throw ConfigError("channel dimensions must be positive", "users");
  }
  if (users > antennas) {
    throw ConfigError("K = " + std::to_string(users) + " exceeds N_T = " +
                          std::to_string(antennas) + "; constraint K <= N_T violated",
                      "users");
  }
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ChannelRealization ch;
  ch.H.resize(users, antennas);
  for (int k = 0; k < users; ++k) {
    for (int n = 0; n < antennas; ++n) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      ch.H(k, n) = {re, im};
    }
  }
  return ch;
}

std::vector<std::complex<double>> sample_noise(const NoiseModel& model, std::size_t count,
                                               Rng& rng) {
  if (!(model.sigma2 >= 0.0)) throw ConfigError("noise variance must be >= 0", "sigma2");
  // Always consume the stream so later draws do not depend on sigma2.
  const double scale = std::sqrt(model.sigma2 / 2.0);
  std::normal_distribution<double> gauss;
  std::vector<std::complex<double>> out(count);
  for (auto& n : out) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    n = {scale * re, scale * im};
  }
  return out;
}

double sigma2_from_snr(double rho_db, int block_len) {
  if (block_len < 1) throw ConfigError("block length must be >= 1", "block_len");
  return 1.0 / (block_len * std::pow(10.0, rho_db / 10.0));
}

}  // namespace slp
