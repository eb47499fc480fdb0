#include <cmath>

#include "doctest.h"
#include "slp/channel.hpp"
#include "slp/errors.hpp"

using namespace slp;

TEST_CASE("generate_channel is deterministic per seed") {
  Rng a = make_substream(5, {0, 3});
  Rng b = make_substream(5, {0, 3});
  const auto h1 = generate_channel(2, 2, a);
  const auto h2 = generate_channel(2, 2, b);
  CHECK(h1.H == h2.H);
  CHECK(h1.users() == 2);
  CHECK(h1.antennas() == 2);

  Rng c = make_substream(5, {0, 4});
  CHECK(generate_channel(2, 2, c).H != h1.H);
}

TEST_CASE("generate_channel rejects K > N_T") {
  Rng rng(1);
  CHECK_THROWS_AS(generate_channel(3, 2, rng), ConfigError);
  CHECK_THROWS_AS(generate_channel(0, 2, rng), ConfigError);
}

TEST_CASE("channel entries are unit-variance circular Gaussian") {
  Rng rng = make_substream(17, {1});
  const int draws = 100000;
  const auto ch = generate_channel(1, draws, rng);
  const double n = draws;
  const std::complex<double> mean = ch.H.sum() / n;
  const double power = ch.H.cwiseAbs2().sum() / n;
  CHECK(std::abs(power - 1.0) <= 0.02);
  CHECK(std::abs(mean.real()) < 3.0 / std::sqrt(n));
  CHECK(std::abs(mean.imag()) < 3.0 / std::sqrt(n));
}

TEST_CASE("sample_noise statistics") {
  Rng rng = make_substream(99, {2});
  const auto zero = sample_noise({0.0}, 100, rng);
  for (const auto& v : zero) CHECK(v == std::complex<double>(0, 0));

  const auto n = sample_noise({0.5}, 100000, rng);
  double total = 0.0, re = 0.0, im = 0.0;
  std::complex<double> mean = 0.0;
  for (const auto& v : n) {
    total += std::norm(v);
    re += v.real() * v.real();
    im += v.imag() * v.imag();
    mean += v;
  }
  const double count = static_cast<double>(n.size());
  CHECK(std::abs(total / count - 0.5) <= 0.02);
  CHECK(std::abs(re / count - 0.25) <= 0.01);
  CHECK(std::abs(im / count - 0.25) <= 0.01);
  CHECK(std::abs(mean.real() / count) < 3.0 * std::sqrt(0.25 / count));

  CHECK_THROWS_AS(sample_noise({-1.0}, 3, rng), ConfigError);
  CHECK(sample_noise({1.0}, 0, rng).empty());
}

TEST_CASE("sigma2_from_snr") {
  CHECK(sigma2_from_snr(0.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sigma2_from_snr(40.0, 10) == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(sigma2_from_snr(20.0, 200) == doctest::Approx(5e-5).epsilon(1e-12));
  CHECK_THROWS_AS(sigma2_from_snr(10.0, 0), ConfigError);
}

TEST_CASE("substreams are reproducible and distinct") {
  Rng a = make_substream(1, {1, 2, 3});
  Rng b = make_substream(1, {1, 2, 3});
  Rng c = make_substream(1, {1, 3, 2});
  Rng d = make_substream(2, {1, 2, 3});
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(va != d());
}
