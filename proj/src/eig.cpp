// eig.cpp — Hermitian eigensolver wrapper.
#include "cavitysense/eig.hpp"

#include <stdexcept>

#if defined(CAVITYSENSE_HAVE_LAPACKE)
#include <lapacke.h>
#endif

namespace cavitysense {

#if defined(CAVITYSENSE_HAVE_LAPACKE)
namespace {
HermitianEig lapack_eig(const Eigen::MatrixXcd& a, bool want_vectors) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    HermitianEig out;
    out.values.resize(n);
    out.vectors = a;  // zheevd overwrites the input with eigenvectors
    const lapack_int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
        reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
        out.values.data());
    if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
    if (!want_vectors) out.vectors.resize(0, 0);
    return out;
}
}  // namespace

HermitianEig hermitian_eig(const Eigen::MatrixXcd& a) { return lapack_eig(a, true); }

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
    return lapack_eig(a, false).values;
}

#else

HermitianEig hermitian_eig(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("SelfAdjointEigenSolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("SelfAdjointEigenSolver failed");
    return es.eigenvalues();
}

#endif

}  // namespace cavitysense
