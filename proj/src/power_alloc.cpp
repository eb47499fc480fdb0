#include "slp/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slp/errors.hpp"

namespace slp {

namespace {

constexpr double kMinMargin = 1e-12;

void require_positive(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!(x > 0.0)) throw std::domain_error(std::string(what) + " must be positive");
  }
}

}  // namespace

double KktCertificate::worst() const {
  return std::max({normalization_residual, stationarity_residual, complementarity_residual,
                   primal_residual});
}

PowerAllocation allocate_in_block(std::span<const double> t, double total_power) {
  if (t.empty()) throw ConfigError("block length must be >= 1", "block_len");
  if (!(total_power > 0.0)) throw ConfigError("total power must be positive", "total_power");
  double inv_sq_sum = 0.0;
  for (std::size_t m = 0; m < t.size(); ++m) {
    if (!(t[m] > kMinMargin)) {
      throw DegenerateMarginError("CI margin t[" + std::to_string(m) + "] = " +
                                  std::to_string(t[m]) +
                                  " is not positive; in-block allocation undefined");
    }
    inv_sq_sum += 1.0 / (t[m] * t[m]);
  }
  PowerAllocation out;
  out.mode = AllocationMode::InBlock;
  out.p.resize(t.size());
  for (std::size_t m = 0; m < t.size(); ++m) {
    out.p[m] = (1.0 / (t[m] * t[m])) / inv_sq_sum * total_power;
  }
  out.f = std::sqrt(inv_sq_sum / total_power);
  return out;
}

PowerAllocation allocate_uniform(int block_len, double total_power) {
  if (block_len < 1) throw ConfigError("block length must be >= 1", "block_len");
  if (!(total_power > 0.0)) throw ConfigError("total power must be positive", "total_power");
  PowerAllocation out;
  out.mode = AllocationMode::Uniform;
  out.p.assign(static_cast<std::size_t>(block_len), total_power / block_len);
  return out;
}

double per_symbol_rescaling(double t, double p) {
  if (!(t > 0.0) || !(p > 0.0)) {
    throw std::domain_error("rescaling factor needs positive margin and power");
  }
  return 1.0 / (t * std::sqrt(p));
}

KktCertificate verify_kkt(std::span<const double> t, std::span<const double> p,
                          double total_power) {
  if (t.size() != p.size()) throw std::invalid_argument("t and p lengths differ");
  require_positive(t, "margins");
  require_positive(p, "powers");

  const std::size_t M = t.size();
  std::vector<double> u(M);
  double g = INFINITY;
  double ratio_sum = 0.0;
  double power = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    u[m] = std::sqrt(p[m]);
    g = std::min(g, t[m] * u[m]);
    ratio_sum += u[m] / t[m];
    power += p[m];
  }

  KktCertificate cert;
  cert.vartheta = 1.0 / ratio_sum;
  cert.delta.resize(M);
  double delta_sum = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    cert.delta[m] = cert.vartheta * u[m] / t[m];
    delta_sum += cert.delta[m];
  }
  cert.normalization_residual = std::abs(delta_sum - 1.0);
  for (std::size_t m = 0; m < M; ++m) {
    cert.stationarity_residual = std::max(
        cert.stationarity_residual, std::abs(cert.vartheta * u[m] - cert.delta[m] * t[m]));
    cert.complementarity_residual = std::max(
        cert.complementarity_residual, std::abs(cert.delta[m] * (g - t[m] * u[m])));
  }
  cert.primal_residual = std::abs(power - total_power);
  return cert;
}

std::vector<double> solve_p4_numeric(std::span<const double> t, double total_power,
                                     double tol) {
  require_positive(t, "margins");
  if (!(total_power > 0.0)) throw std::domain_error("total power must be positive");

  auto power_needed = [&](double g) {
    double s = 0.0;
    for (double tm : t) s += (g / tm) * (g / tm);
    return s;
  };
  double lo = 0.0;
  double hi = *std::max_element(t.begin(), t.end()) * std::sqrt(total_power);
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (power_needed(mid) <= total_power ? lo : hi) = mid;
  }
  std::vector<double> p(t.size());
  for (std::size_t m = 0; m < t.size(); ++m) p[m] = (lo / t[m]) * (lo / t[m]);
  return p;
}

}  // namespace slp
