#pragma once

// Dense complex matrix helpers shared by every module. All Hilbert spaces here
// are small (n <= ~64), so everything is dense and eagerly materialized.

#include <complex>

#include <Eigen/Dense>

namespace radpair {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Kronecker product: (a ox b)[i*p + k, j*q + l] = a(i,j) * b(k,l) for b of shape p x q.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Matrix exponential (scaling-and-squaring with a Pade core). Throws
// std::invalid_argument on non-square input.
ComplexMatrix expm(const ComplexMatrix& a);

// Row-stacking vectorization: vec([[a,b],[c,d]]) = (a, b, c, d). In this
// convention vec(A rho B) = (A ox B^T) vec(rho), so left multiplication maps to
// A ox E and right multiplication to E ox A^T.
ComplexVector vec(const ComplexMatrix& rho);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index n);
// Dimension inferred; throws std::invalid_argument unless the length is a perfect square.
ComplexMatrix unvec(const ComplexVector& v);

// max_ij |m(i,j)|
double max_abs(const ComplexMatrix& m);

// max_ij |m - m^dagger|
double hermiticity_defect(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol);

// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const ComplexMatrix& m);
bool is_positive_semidefinite(const ComplexMatrix& m, double tol);

} // namespace radpair
