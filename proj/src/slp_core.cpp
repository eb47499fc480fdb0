#include "slp/slp_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slp/errors.hpp"

namespace slp {

namespace {

// Row of the real-valued map z = [Re x; Im x] -> alpha for one component.
Eigen::RowVectorXd component_row(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& s,
                                 const ComponentRef& c) {
  const Eigen::Index n = H.cols();
  const Eigen::RowVectorXd hr = H.row(c.user).real();
  const Eigen::RowVectorXd hi = H.row(c.user).imag();
  Eigen::RowVectorXd row(2 * n);
  if (c.axis == Axis::Real) {
    row << hr, -hi;
    row /= s(c.user).real();
  } else {
    row << hi, hr;
    row /= s(c.user).imag();
  }
  return row;
}

struct FreeSolve {
  Eigen::VectorXd lambda;  // on the free set, in free-set order
  Eigen::VectorXd z;
  bool consistent = true;
};

// Minimizes 0.5 ||A_F^T l||^2 - 1^T l over the free multipliers. The primal
// image z = A_F^T l is the least-norm solution of A_F z = 1.
FreeSolve solve_free(const Eigen::MatrixXd& A, const std::vector<int>& free) {
  const auto f = static_cast<Eigen::Index>(free.size());
  FreeSolve out;
  if (f == 0) {
    out.lambda.resize(0);
    out.z = Eigen::VectorXd::Zero(A.cols());
    return out;
  }
  Eigen::MatrixXd M(A.cols(), f);
  for (Eigen::Index j = 0; j < f; ++j) M.col(j) = A.row(free[j]).transpose();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(f);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pivoted(M);
  pivoted.setThreshold(1e-12);
  if (pivoted.rank() == f) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    const auto R = qr.matrixQR().topLeftCorner(f, f).triangularView<Eigen::Upper>();
    const Eigen::VectorXd y = R.transpose().solve(ones);
    out.lambda = R.solve(y);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(M.rows());
    padded.head(f) = y;
    out.z = qr.householderQ() * padded;
    return out;
  }

  // Rank-deficient rows: the system is either redundant or inconsistent.
  const Eigen::MatrixXd AF = M.transpose();
  out.z = AF.completeOrthogonalDecomposition().solve(ones);
  out.consistent = (AF * out.z - ones).cwiseAbs().maxCoeff() <= 1e-9;
  const Eigen::MatrixXd G = AF * M;
  out.lambda = G.completeOrthogonalDecomposition().solve(ones);
  return out;
}

}  // namespace

double ResidualReport::worst() const { return std::max({c1, c2, c3, c4, power_gap}); }

CiInstance build_instance(const ChannelRealization& channel, std::span<const cdouble> s,
                          const ConstellationSpec& spec) {
  if (static_cast<int>(s.size()) != channel.users()) {
    throw std::domain_error("symbol vector length does not match the user count");
  }
  CiInstance inst;
  inst.H = channel.H;
  inst.s = Eigen::Map<const Eigen::VectorXcd>(s.data(), static_cast<Eigen::Index>(s.size()));
  for (int k = 0; k < channel.users(); ++k) {
    const ComponentClass cls = classify_component(spec, s[k]);
    inst.classes.push_back(cls);
    (cls.real == AxisClass::Inner ? inst.inner : inst.outer).push_back({k, Axis::Real});
    (cls.imag == AxisClass::Inner ? inst.inner : inst.outer).push_back({k, Axis::Imag});
  }
  return inst;
}

Alphas compute_alphas(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& x,
                      const Eigen::VectorXcd& s) {
  const Eigen::VectorXcd received = H * x;
  Alphas out{Eigen::VectorXd(s.size()), Eigen::VectorXd(s.size())};
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k).real() == 0.0 || s(k).imag() == 0.0) {
      throw std::domain_error("symbol component is zero; scaling factor undefined");
    }
    out.a(k) = received(k).real() / s(k).real();
    out.b(k) = received(k).imag() / s(k).imag();
  }
  return out;
}

SlpSolution solve_ci_max(const CiInstance& inst, const SolverOptions& opts) {
  const Eigen::Index n_tx = inst.H.cols();
  if (inst.H.rows() > n_tx) throw ConfigError("K exceeds N_T", "users");

  const int n_inner = static_cast<int>(inst.inner.size());
  const int n_rows = n_inner + static_cast<int>(inst.outer.size());
  Eigen::MatrixXd A(n_rows, 2 * n_tx);
  for (int i = 0; i < n_inner; ++i) A.row(i) = component_row(inst.H, inst.s, inst.inner[i]);
  for (int i = n_inner; i < n_rows; ++i) {
    A.row(i) = component_row(inst.H, inst.s, inst.outer[i - n_inner]);
  }
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n_rows + 50;
  constexpr double kFeasTol = 1e-12;

  // Lawson-Hanson style active set on the dual. Inner multipliers are free;
  // outer multipliers are >= 0 and start pinned at zero.
  std::vector<char> is_free(n_rows, 0);
  for (int i = 0; i < n_inner; ++i) is_free[i] = 1;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n_rows);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * n_tx);

  SlpSolution sol;
  sol.status = SolverStatus::MaxIter;
  bool infeasible = false;
  int iter = 0;
  while (iter < max_iter) {
    ++iter;
    std::vector<int> free;
    for (int i = 0; i < n_rows; ++i) {
      if (is_free[i]) free.push_back(i);
    }
    FreeSolve fs = solve_free(A, free);
    if (!fs.consistent) {
      infeasible = true;
      break;
    }
    Eigen::VectorXd candidate = Eigen::VectorXd::Zero(n_rows);
    for (std::size_t j = 0; j < free.size(); ++j) candidate(free[j]) = fs.lambda(j);

    double step = 1.0;
    int blocking = -1;
    for (int i : free) {
      if (i < n_inner || candidate(i) > 0.0) continue;
      const double denom = lambda(i) - candidate(i);
      const double ratio = denom > 0.0 ? lambda(i) / denom : 0.0;
      if (blocking < 0 || ratio < step) {
        step = ratio;
        blocking = i;
      }
    }
    if (blocking >= 0) {
      lambda += step * (candidate - lambda);
      lambda(blocking) = 0.0;
      for (int i : free) {
        if (i >= n_inner && lambda(i) <= 0.0) {
          lambda(i) = 0.0;
          is_free[i] = 0;
        }
      }
      continue;
    }

    lambda = candidate;
    z = fs.z;
    // Most violated outer constraint alpha_i(z) >= 1 among the pinned ones.
    int entering = -1;
    double worst = -kFeasTol;
    for (int i = n_inner; i < n_rows; ++i) {
      if (is_free[i]) continue;
      const double slack = A.row(i).dot(z) - 1.0;
      if (slack < worst) {
        worst = slack;
        entering = i;
      }
    }
    if (entering < 0) {
      sol.status = SolverStatus::Optimal;
      break;
    }
    is_free[entering] = 1;
  }
  sol.iterations = iter;

  const double znorm = z.norm();
  if (infeasible || znorm == 0.0) {
    // Inconsistent constraints: no direction achieves a positive margin and
    // x = 0, t = 0 is optimal.
    if (infeasible) sol.status = SolverStatus::Optimal;
    sol.x = Eigen::VectorXcd::Zero(n_tx);
    sol.t = 0.0;
    sol.alpha_a = Eigen::VectorXd::Zero(inst.s.size());
    sol.alpha_b = Eigen::VectorXd::Zero(inst.s.size());
    return sol;
  }

  sol.x.resize(n_tx);
  for (Eigen::Index n = 0; n < n_tx; ++n) sol.x(n) = {z(n) / znorm, z(n_tx + n) / znorm};
  sol.t = 1.0 / znorm;
  const Alphas alphas = compute_alphas(inst.H, sol.x, inst.s);
  sol.alpha_a = alphas.a;
  sol.alpha_b = alphas.b;

  // Weak duality: for mu = lambda / 1^T lambda (mu >= 0 on outer rows),
  // t <= ||A^T mu|| for every feasible (x, t).
  const double lambda_sum = lambda.sum();
  sol.dual_bound = lambda_sum > 0.0 ? (A.transpose() * lambda).norm() / lambda_sum
                                    : std::numeric_limits<double>::infinity();
  sol.duality_gap = std::abs(sol.dual_bound - sol.t);
  if (sol.status == SolverStatus::Optimal && !(sol.duality_gap <= opts.tol)) {
    sol.status = SolverStatus::MaxIter;
  }
  return sol;
}

ResidualReport verify_solution(const CiInstance& inst, const SlpSolution& sol, double tol) {
  ResidualReport rep;
  const Eigen::VectorXcd received = inst.H * sol.x;
  for (Eigen::Index k = 0; k < inst.s.size(); ++k) {
    const cdouble model(sol.alpha_a(k) * inst.s(k).real(), sol.alpha_b(k) * inst.s(k).imag());
    rep.c1 = std::max(rep.c1, std::abs(received(k) - model));
  }
  auto alpha = [&](const ComponentRef& c) {
    return c.axis == Axis::Real ? sol.alpha_a(c.user) : sol.alpha_b(c.user);
  };
  for (const auto& c : inst.outer) rep.c2 = std::max(rep.c2, sol.t - alpha(c));
  for (const auto& c : inst.inner) rep.c3 = std::max(rep.c3, std::abs(alpha(c) - sol.t));
  const double norm = sol.x.norm();
  rep.c4 = std::max(norm - 1.0, 0.0);
  rep.power_gap = sol.t > 0.0 ? std::abs(norm - 1.0) : 0.0;
  rep.passed = rep.worst() <= tol;
  return rep;
}

}  // namespace slp
