#pragma once

// Deterministic time evolution: propagate a density matrix under a kinetic
// superoperator, track populations, cumulative product yields, trace and
// singlet-triplet coherence.

#include <utility>
#include <vector>

#include "radpair/superop.hpp"

namespace radpair {

struct EvolutionResult {
    std::vector<double> times;
    std::vector<ComplexMatrix> rho_t;
    std::vector<double> pop_s;        // <Q_s> = Tr{Q_s rho}
    std::vector<double> pop_t;        // <Q_t>
    std::vector<double> yield_s;      // k_s * integral of pop_s
    std::vector<double> yield_t;      // k_t * integral of pop_t
    std::vector<double> trace;        // Tr rho (non-increasing)
    std::vector<double> coherence_st; // |<S|rho|T>| (largest inter-block entry when dim > 2)
};

// Action of exp(-G t). Uses a cached eigendecomposition when the eigenvector
// basis is well conditioned (checked by reconstruction residual), otherwise a
// fresh matrix exponential per time point. Each evaluation goes from t = 0 in
// one step; nothing is ever integrated incrementally.
class Propagator {
  public:
    explicit Propagator(ComplexMatrix generator);

    ComplexVector apply(double t, const ComplexVector& v0) const;
    ComplexMatrix matrix_at(double t) const;

    bool eigenbasis_ok() const { return eig_ok_; }
    // Generator eigenvalues; real parts are decay rates. Empty when the
    // eigendecomposition was rejected.
    const ComplexVector& eigenvalues() const { return lambda_; }

  private:
    ComplexMatrix gen_;
    bool eig_ok_ = false;
    ComplexMatrix basis_;     // eigenvectors
    ComplexMatrix basis_inv_;
    ComplexVector lambda_;
};

// Throws ValidationError unless rho0 is Hermitian (defect <= 1e-10), positive
// semidefinite (min eigenvalue >= -1e-10) and unit trace (|Tr - 1| <= 1e-10).
void validate_density_matrix(const ComplexMatrix& rho0);

// (Tr{Q_s rho}, Tr{Q_t rho}); throws ValidationError if an imaginary residue
// above 1e-10 survives the trace.
std::pair<double, double> populations(const SpinSystem& sys, const ComplexMatrix& rho);

// rho(t_i) = unvec(exp(-op t_i) vec(rho0)) on a sorted, nonnegative grid; all
// result fields are filled, including yields.
EvolutionResult propagate(const SpinSystem& sys, const RateConstants& rates,
                          const Superoperator& op, const ComplexMatrix& rho0,
                          const std::vector<double>& times);

// Fill yield_s / yield_t of an already-propagated result. Uses the resolvent
// form k * Tr{Q unvec(G^-1 (1 - exp(-G t)) vec(rho0))} when the generator is
// invertible (condition estimate <= 1e12), otherwise adaptive composite
// Simpson quadrature refined until the relative change is below 1e-8.
void compute_yields(const SpinSystem& sys, const RateConstants& rates,
                    const Superoperator& op, const ComplexMatrix& rho0,
                    EvolutionResult& result);

// Direct master-equation right-hand sides in Hilbert space.
// -i[H,rho] - (k_s/2){Q_s,rho} - (k_t/2){Q_t,rho}
ComplexMatrix rhs_haberkorn(const SpinSystem& sys, const RateConstants& rates,
                            const ComplexMatrix& rho);
// -i[H,rho] - (k_s+k_t) rho + k_s Q_t rho Q_t + k_t Q_s rho Q_s
ComplexMatrix rhs_measurement(const SpinSystem& sys, const RateConstants& rates,
                              const ComplexMatrix& rho);
// Same map written as collapse bookkeeping: each channel removes its measured
// population and the coherences the measurement destroys,
// -i[H,rho] - k_s (Q_s rho Q_s + Q_s rho Q_t + Q_t rho Q_s) - k_t (...).
ComplexMatrix rhs_measurement_projection(const SpinSystem& sys, const RateConstants& rates,
                                         const ComplexMatrix& rho);

} // namespace radpair
