#pragma once

#include <optional>
#include <span>
#include <vector>

namespace slp {

enum class AllocationMode { InBlock, Uniform };

struct PowerAllocation {
  std::vector<double> p;   // per-symbol-duration powers
  std::optional<double> f;  // block rescaling factor (in-block mode only)
  AllocationMode mode = AllocationMode::Uniform;
};

// Multipliers and residuals of the KKT system of the block max-min problem
//
//   max g  s.t.  g <= t_m u_m  (delta_m),  sum u_m^2 <= P_T  (vartheta),
//
// evaluated at u_m = sqrt(p_m).
struct KktCertificate {
  std::vector<double> delta;
  double vartheta = 0.0;
  double normalization_residual = 0.0;   // |sum delta - 1|
  double stationarity_residual = 0.0;    // max |vartheta u_m - delta_m t_m|
  double complementarity_residual = 0.0; // max |delta_m (g - t_m u_m)|
  double primal_residual = 0.0;          // |sum u_m^2 - P_T|

  double worst() const;
  bool passes(double tol) const { return worst() <= tol; }
};

// Closed-form in-block allocation p_m = (1/t_m^2) / sum(1/t_j^2) * P_T, which
// equalizes t_m sqrt(p_m) across the block, with f = sqrt(sum(1/t_j^2) / P_T).
// Throws DegenerateMarginError if any t_m <= 1e-12.
PowerAllocation allocate_in_block(std::span<const double> t, double total_power);

PowerAllocation allocate_uniform(int block_len, double total_power);

// f = 1 / (t sqrt(p)). Throws std::domain_error on nonpositive input.
double per_symbol_rescaling(double t, double p);

// The multipliers are recovered without re-solving: stationarity gives
// delta_m = vartheta u_m / t_m and sum delta = 1 fixes vartheta.
KktCertificate verify_kkt(std::span<const double> t, std::span<const double> p,
                          double total_power);

// Bisection on the common level g with feasibility sum (g / t_m)^2 <= P_T.
// Test oracle, independent of the closed form.
std::vector<double> solve_p4_numeric(std::span<const double> t, double total_power,
                                     double tol);

}  // namespace slp
