#pragma once

#include "radpair/linalg.hpp"

namespace radpair {

// First-order reaction rate constants for the singlet and triplet channels,
// in reciprocal time units (hbar = 1 throughout, so omega and k share units).
struct RateConstants {
    double k_s = 0.0;
    double k_t = 0.0;
};

// Throws ValidationError if a rate is negative or non-finite.
void validate_rates(const RateConstants& rates);

// Spin system: Hamiltonian plus orthogonal projectors onto the singlet and
// triplet subspaces. Projector algebra (idempotency, completeness,
// orthogonality) is validated at construction.
struct SpinSystem {
    ComplexMatrix hamiltonian; // Hermitian, angular frequency units
    ComplexMatrix q_singlet;   // projector
    ComplexMatrix q_triplet;   // identity - q_singlet
    Eigen::Index dim = 0;

    // Minimal {|S>, |T>} model: H = [[0, omega], [omega, 0]] with
    // omega = <S|H|T> the singlet-triplet mixing frequency, Q_S = diag(1,0).
    static SpinSystem minimal_two_level(double omega);

    // General entry point: any Hermitian H and singlet projector; the triplet
    // projector is the complement.
    static SpinSystem from_matrices(const ComplexMatrix& h, const ComplexMatrix& q_s);

    // Throws ValidationError when the Hamiltonian is not Hermitian or the
    // projector algebra is broken beyond fixed tolerances.
    void validate() const;

    ComplexMatrix identity() const { return ComplexMatrix::Identity(dim, dim); }
};

} // namespace radpair
