// qfi_sum.hpp — the eigenpair double sum at the heart of mixed-state QFI.
#pragma once

#include <Eigen/Dense>

namespace cavitysense {

// Σ_{r,s} (λ_r − λ_s)²/(λ_r + λ_s) |B_rs|² with negative eigenvalues clamped
// to zero and pairs with λ_r + λ_s < floor skipped.  OpenMP across rows with
// fixed serial per-row accumulation: the result is thread-count independent.
double qfi_pair_sum(const Eigen::VectorXd& lambda, const Eigen::MatrixXcd& b,
                    double floor_value = 1e-14);

// Plain serial reference used by tests and the benchmark target.
double qfi_pair_sum_serial(const Eigen::VectorXd& lambda, const Eigen::MatrixXcd& b,
                           double floor_value = 1e-14);

}  // namespace cavitysense
