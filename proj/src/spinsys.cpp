#include "radpair/spinsys.hpp"

#include <cmath>
#include <sstream>

#include "radpair/errors.hpp"

namespace radpair {

namespace {
constexpr double kHermTol = 1e-12;
constexpr double kProjectorTol = 1e-10;
} // namespace

void validate_rates(const RateConstants& rates) {
    if (!(std::isfinite(rates.k_s) && std::isfinite(rates.k_t)))
        throw ValidationError("rate constants must be finite");
    if (rates.k_s < 0.0 || rates.k_t < 0.0)
        throw ValidationError("rate constants must be nonnegative");
}

SpinSystem SpinSystem::minimal_two_level(double omega) {
    if (!std::isfinite(omega))
        throw ValidationError("mixing frequency must be finite");
    SpinSystem sys;
    sys.dim = 2;
    sys.hamiltonian = ComplexMatrix::Zero(2, 2);
    sys.hamiltonian(0, 1) = omega;
    sys.hamiltonian(1, 0) = omega;
    sys.q_singlet = ComplexMatrix::Zero(2, 2);
    sys.q_singlet(0, 0) = 1.0;
    sys.q_triplet = ComplexMatrix::Zero(2, 2);
    sys.q_triplet(1, 1) = 1.0;
    return sys;
}

SpinSystem SpinSystem::from_matrices(const ComplexMatrix& h, const ComplexMatrix& q_s) {
    if (h.rows() != h.cols() || q_s.rows() != q_s.cols())
        throw ValidationError("hamiltonian and q_singlet must be square");
    if (h.rows() != q_s.rows())
        throw ValidationError("hamiltonian and q_singlet dimensions differ");
    SpinSystem sys;
    sys.dim = h.rows();
    sys.hamiltonian = h;
    sys.q_singlet = q_s;
    sys.q_triplet = sys.identity() - q_s;
    sys.validate();
    return sys;
}

void SpinSystem::validate() const {
    if (dim <= 0)
        throw ValidationError("spin system has no dimension");
    auto check = [](double defect, double tol, const char* what) {
        if (!(defect <= tol)) {
            std::ostringstream msg;
            msg << what << " (defect " << defect << ", tolerance " << tol << ")";
            throw ValidationError(msg.str());
        }
    };
    check(hermiticity_defect(hamiltonian), kHermTol, "hamiltonian is not Hermitian");
    check(hermiticity_defect(q_singlet), kProjectorTol, "q_singlet is not Hermitian");
    check(max_abs(q_singlet * q_singlet - q_singlet), kProjectorTol,
          "q_singlet is not idempotent");
    check(max_abs(q_triplet * q_triplet - q_triplet), kProjectorTol,
          "q_triplet is not idempotent");
    check(max_abs(q_singlet + q_triplet - identity()), kProjectorTol,
          "projectors do not sum to the identity");
    check(max_abs(q_singlet * q_triplet), kProjectorTol, "projectors are not orthogonal");
}

} // namespace radpair
