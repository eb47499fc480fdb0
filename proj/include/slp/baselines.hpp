#pragma once

#include <Eigen/Dense>

namespace slp {

enum class PrecoderKind { ZF, RZF };

// Block-level linear precoder normalized to unit Frobenius norm, so that
// E||W s||^2 = 1 for unit-energy i.i.d. symbols. beta = 1 / ||W0||_F is the
// receive-side scale of the unnormalized design W0 (H W = beta I for ZF).
struct LinearPrecoder {
  Eigen::MatrixXcd W;  // N_T x K
  double beta = 0.0;
  PrecoderKind kind = PrecoderKind::ZF;
  double lambda = 0.0;
};

// W0 = H^H (H H^H)^-1. Throws NumericalError if H is rank deficient.
LinearPrecoder zf_precoder(const Eigen::MatrixXcd& H);

// W0 = H^H (H H^H + lambda I)^-1 for an explicit regularizer lambda >= 0.
LinearPrecoder rzf_precoder(const Eigen::MatrixXcd& H, double lambda);

// MMSE-style loading lambda = K sigma2 / (P_T / M).
double rzf_regularizer(int users, double sigma2, int block_len, double total_power);

LinearPrecoder rzf_precoder(const Eigen::MatrixXcd& H, double sigma2, int block_len,
                            double total_power);

// f = 1 / (beta sqrt(p)). Throws std::domain_error unless p > 0.
double baseline_rescaling(const LinearPrecoder& precoder, double p);

}  // namespace slp
