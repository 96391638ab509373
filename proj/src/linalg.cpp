#include "radpair/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace radpair {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Eigen::Index p = b.rows(), q = b.cols();
    ComplexMatrix out(a.rows() * p, a.cols() * q);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * p, j * q, p, q) = a(i, j) * b;
    return out;
}

ComplexMatrix expm(const ComplexMatrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("expm: matrix must be square");
    return a.exp();
}

ComplexVector vec(const ComplexMatrix& rho) {
    ComplexVector v(rho.rows() * rho.cols());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j)
            v(k++) = rho(i, j);
    return v;
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index n) {
    if (n <= 0 || v.size() != n * n)
        throw std::invalid_argument("unvec: length does not match requested dimension");
    ComplexMatrix rho(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            rho(i, j) = v(k++);
    return rho;
}

ComplexMatrix unvec(const ComplexVector& v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    if (n * n != v.size())
        throw std::invalid_argument("unvec: length is not a perfect square");
    return unvec(v, n);
}

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
    return max_abs(m - m.adjoint());
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

double min_eigenvalue(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(((m + m.adjoint()) / 2.0).eval(),
                                                    Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_positive_semidefinite(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && min_eigenvalue(m) >= -tol;
}

} // namespace radpair
