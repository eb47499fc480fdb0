#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace slp {

using Rng = std::mt19937_64;

// Deterministic generator for an (experiment seed, counter path) pair.
// Streams for different paths are statistically independent, so trials can
// run in any order or on any worker and still reproduce bit-for-bit.
Rng make_substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Flat Rayleigh block-fading channel. Row k of H is h_k^T; it stays constant
// for all symbol durations of a transmission block.
struct ChannelRealization {
  Eigen::MatrixXcd H;

  int users() const { return static_cast<int>(H.rows()); }
  int antennas() const { return static_cast<int>(H.cols()); }
};

// i.i.d. CN(0, 1) entries. Throws ConfigError unless 1 <= K <= n_antennas.
ChannelRealization generate_channel(int users, int antennas, Rng& rng);

struct NoiseModel {
  double sigma2 = 0.0;  // per complex sample; sigma2 / 2 per real dimension
};

std::vector<std::complex<double>> sample_noise(const NoiseModel& model, std::size_t count,
                                               Rng& rng);

// Noise variance for a per-symbol transmit SNR rho = P_T / (M * sigma2) with
// the block power budget P_T fixed at 1.
double sigma2_from_snr(double rho_db, int block_len);

}  // namespace slp
