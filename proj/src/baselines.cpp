#include "slp/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "slp/errors.hpp"

namespace slp {

namespace {

LinearPrecoder normalize(Eigen::MatrixXcd W0, PrecoderKind kind, double lambda) {
  const double fro = W0.norm();
  if (!(fro > 0.0) || !std::isfinite(fro)) {
    throw NumericalError("precoder has zero or non-finite Frobenius norm");
  }
  LinearPrecoder out;
  out.W = W0 / fro;
  out.beta = 1.0 / fro;
  out.kind = kind;
  out.lambda = lambda;
  return out;
}

Eigen::MatrixXcd regularized_inverse_design(const Eigen::MatrixXcd& H, double lambda) {
  if (H.rows() > H.cols()) throw ConfigError("K exceeds N_T", "users");
  const Eigen::Index K = H.rows();
  const Eigen::MatrixXcd gram =
      H * H.adjoint() + lambda * Eigen::MatrixXcd::Identity(K, K);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw NumericalError("channel Gram matrix is singular");
  return H.adjoint() * lu.inverse();
}

}  // namespace

LinearPrecoder zf_precoder(const Eigen::MatrixXcd& H) {
  return normalize(regularized_inverse_design(H, 0.0), PrecoderKind::ZF, 0.0);
}

LinearPrecoder rzf_precoder(const Eigen::MatrixXcd& H, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("RZF regularizer must be >= 0", "rzf_lambda");
  return normalize(regularized_inverse_design(H, lambda), PrecoderKind::RZF, lambda);
}

double rzf_regularizer(int users, double sigma2, int block_len, double total_power) {
  return users * sigma2 * block_len / total_power;
}

LinearPrecoder rzf_precoder(const Eigen::MatrixXcd& H, double sigma2, int block_len,
                            double total_power) {
  return rzf_precoder(
      H, rzf_regularizer(static_cast<int>(H.rows()), sigma2, block_len, total_power));
}

double baseline_rescaling(const LinearPrecoder& precoder, double p) {
  if (!(p > 0.0) || !(precoder.beta > 0.0)) {
    throw std::domain_error("rescaling factor needs positive power and scale");
  }
  return 1.0 / (precoder.beta * std::sqrt(p));
}

}  // namespace slp
