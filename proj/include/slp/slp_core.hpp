#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "slp/channel.hpp"
#include "slp/constellation.hpp"

namespace slp {

enum class Axis { Real, Imag };

// One real-valued component (user k, real or imaginary axis) of the
// per-symbol receive constellation.
struct ComponentRef {
  int user = 0;
  Axis axis = Axis::Real;

  bool operator==(const ComponentRef&) const = default;
};

// A per-symbol-duration constructive-interference problem.
//
// Components in `inner` must be received at exactly the common scale t of the
// nominal constellation. Components in `outer` sit on the outermost level of
// their axis and may be pushed further out (scale >= t).
struct CiInstance {
  Eigen::MatrixXcd H;  // K x N_T
  Eigen::VectorXcd s;  // K data symbols
  std::vector<ComponentClass> classes;
  std::vector<ComponentRef> inner;
  std::vector<ComponentRef> outer;
};

struct SolverOptions {
  double tol = 1e-8;    // duality-gap tolerance on t
  int max_iter = 0;     // active-set iterations; 0 picks 10 * (2K) + 50
};

enum class SolverStatus { Optimal, MaxIter, Infeasible };

struct SlpSolution {
  Eigen::VectorXcd x;       // precoded transmit vector, ||x|| <= 1
  double t = 0.0;           // CI margin
  Eigen::VectorXd alpha_a;  // per-user real-axis scaling
  Eigen::VectorXd alpha_b;  // per-user imaginary-axis scaling
  SolverStatus status = SolverStatus::Optimal;
  int iterations = 0;
  double duality_gap = 0.0;  // certified upper bound on t minus t
  double dual_bound = 0.0;
};

struct Alphas {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

struct ResidualReport {
  double c1 = 0.0;  // max |h_k^T x - (alpha_a Re s_k + j alpha_b Im s_k)|
  double c2 = 0.0;  // max (t - alpha) over outer components, floored at 0
  double c3 = 0.0;  // max |alpha - t| over inner components
  double c4 = 0.0;  // max(||x|| - 1, 0)
  double power_gap = 0.0;  // | ||x|| - 1 |, must vanish whenever t > 0
  bool passed = false;

  double worst() const;
};

// Splits the 2K symbol components into the inner and outer sets.
// Throws std::domain_error if a symbol is not a constellation point.
CiInstance build_instance(const ChannelRealization& channel, std::span<const cdouble> s,
                          const ConstellationSpec& spec);

// Maximizes the CI margin t over the precoded vector x:
//
//   max t  s.t.  alpha_i(x) = t (inner),  alpha_i(x) >= t (outer),  ||x|| <= 1,
//
// where alpha_i(x) = Re/Im(h_k^T x) / Re/Im(s_k). The constraints are
// homogeneous in (x, t), so the optimum is x* = z / ||z||, t* = 1 / ||z||
// with z the minimum-norm point of {alpha_i(z) = 1 (inner), >= 1 (outer)}.
// That least-norm problem is solved exactly through its dual, a small
// bound-constrained QP, with a finite active-set method.
SlpSolution solve_ci_max(const CiInstance& instance, const SolverOptions& opts = {});

// Throws std::domain_error if any Re(s_k) or Im(s_k) is zero.
Alphas compute_alphas(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& x,
                      const Eigen::VectorXcd& s);

ResidualReport verify_solution(const CiInstance& instance, const SlpSolution& sol,
                               double tol);

}  // namespace slp
