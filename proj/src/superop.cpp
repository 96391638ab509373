#include "radpair/superop.hpp"

#include <cmath>
#include <stdexcept>

#include "radpair/errors.hpp"

namespace radpair {

const char* to_string(SuperopKind kind) {
    switch (kind) {
    case SuperopKind::haberkorn: return "haberkorn";
    case SuperopKind::measurement: return "measurement";
    case SuperopKind::coherent_only: return "coherent";
    }
    return "?";
}

ComplexMatrix commutator_superop(const ComplexMatrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("commutator_superop: matrix must be square");
    const ComplexMatrix e = ComplexMatrix::Identity(a.rows(), a.cols());
    return kron(a, e) - kron(e, a.transpose());
}

ComplexMatrix anticommutator_superop(const ComplexMatrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("anticommutator_superop: matrix must be square");
    const ComplexMatrix e = ComplexMatrix::Identity(a.rows(), a.cols());
    return kron(a, e) + kron(e, a.transpose());
}

Superoperator haberkorn_superop(const SpinSystem& sys, const RateConstants& rates) {
    validate_rates(rates);
    Superoperator op;
    op.kind = SuperopKind::haberkorn;
    op.dim = sys.dim;
    op.matrix = Complex(0, 1) * commutator_superop(sys.hamiltonian) +
                0.5 * rates.k_s * anticommutator_superop(sys.q_singlet) +
                0.5 * rates.k_t * anticommutator_superop(sys.q_triplet);
    return op;
}

Superoperator measurement_superop(const SpinSystem& sys, const RateConstants& rates) {
    validate_rates(rates);
    Superoperator op;
    op.kind = SuperopKind::measurement;
    op.dim = sys.dim;
    const Eigen::Index n2 = sys.dim * sys.dim;
    op.matrix = Complex(0, 1) * commutator_superop(sys.hamiltonian) +
                (rates.k_s + rates.k_t) * ComplexMatrix::Identity(n2, n2) -
                rates.k_s * kron(sys.q_triplet, sys.q_triplet.transpose()) -
                rates.k_t * kron(sys.q_singlet, sys.q_singlet.transpose());
    return op;
}

Superoperator coherent_superop(const SpinSystem& sys) {
    Superoperator op;
    op.kind = SuperopKind::coherent_only;
    op.dim = sys.dim;
    op.matrix = Complex(0, 1) * commutator_superop(sys.hamiltonian);
    return op;
}

ComplexMatrix analytic_propagator(SuperopKind kind, const RateConstants& rates, double t) {
    validate_rates(rates);
    if (!(t >= 0.0))
        throw std::invalid_argument("analytic_propagator: t must be nonnegative");
    double coherence_rate = 0.0;
    switch (kind) {
    case SuperopKind::haberkorn: coherence_rate = 0.5 * (rates.k_s + rates.k_t); break;
    case SuperopKind::measurement: coherence_rate = rates.k_s + rates.k_t; break;
    case SuperopKind::coherent_only:
        throw std::invalid_argument("analytic_propagator: needs a kinetic superoperator kind");
    }
    ComplexMatrix p = ComplexMatrix::Zero(4, 4);
    p(0, 0) = std::exp(-rates.k_s * t);
    p(1, 1) = std::exp(-coherence_rate * t);
    p(2, 2) = p(1, 1);
    p(3, 3) = std::exp(-rates.k_t * t);
    return p;
}

double decoherence_gap_residual(const SpinSystem& sys, const RateConstants& rates) {
    const ComplexMatrix w = measurement_superop(sys, rates).matrix;
    const ComplexMatrix v = haberkorn_superop(sys, rates).matrix;
    const ComplexMatrix qs_minus = commutator_superop(sys.q_singlet);
    const ComplexMatrix qt_minus = commutator_superop(sys.q_triplet);
    return max_abs(w - v - 0.5 * rates.k_s * qs_minus * qs_minus -
                   0.5 * rates.k_t * qt_minus * qt_minus);
}

} // namespace radpair
