// eig.hpp — Hermitian eigendecomposition, LAPACK-backed when available.
#pragma once

#include <Eigen/Dense>

namespace cavitysense {

struct HermitianEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // columns
};

// Dense Hermitian eigensolve (zheevd when built with LAPACKE, Eigen otherwise).
HermitianEig hermitian_eig(const Eigen::MatrixXcd& a);

// Eigenvalues only (cheaper when vectors are not needed).
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a);

}  // namespace cavitysense
