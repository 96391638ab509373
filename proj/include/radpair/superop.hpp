#pragma once

// Kinetic superoperators for spin-selective recombination, acting on
// row-stacked density matrices. Two flavours:
//
//   haberkorn    V = i[H,.]  + (k_s/2){Q_s,.} + (k_t/2){Q_t,.}
//   measurement  W = i[H,.]  + (k_s+k_t) Id   - k_s (Q_t . Q_t) - k_t (Q_s . Q_s)
//
// Both damp the singlet/triplet populations at k_s and k_t; they differ only
// in how fast singlet-triplet coherences decay (average of the rates vs sum).

#include "radpair/spinsys.hpp"

namespace radpair {

enum class SuperopKind { haberkorn, measurement, coherent_only };
const char* to_string(SuperopKind kind);

struct Superoperator {
    ComplexMatrix matrix; // (dim^2, dim^2), reciprocal time
    SuperopKind kind = SuperopKind::coherent_only;
    Eigen::Index dim = 0; // Hilbert-space dimension
};

// A ox E - E ox A^T and A ox E + E ox A^T (row-stacking convention), i.e. the
// superoperators of [A, .] and {A, .}.
ComplexMatrix commutator_superop(const ComplexMatrix& a);
ComplexMatrix anticommutator_superop(const ComplexMatrix& a);

Superoperator haberkorn_superop(const SpinSystem& sys, const RateConstants& rates);
Superoperator measurement_superop(const SpinSystem& sys, const RateConstants& rates);
Superoperator coherent_superop(const SpinSystem& sys); // i[H,.] only

// Closed-form exp(-V t) / exp(-W t) for the two-level system with H = 0, where
// both superoperators are diagonal in the {SS, ST, TS, TT} basis. Populations
// decay at k_s and k_t under either kind; coherences decay at (k_s+k_t)/2
// (haberkorn) or k_s+k_t (measurement). Throws on negative t or coherent_only.
ComplexMatrix analytic_propagator(SuperopKind kind, const RateConstants& rates, double t);

// Max-norm residual of W - V - (k_s/2)(Q_s^-)^2 - (k_t/2)(Q_t^-)^2. The two
// kinetics differ exactly by those extra coherence-decay terms, at any
// dimension; this should be zero to roundoff for a valid system.
double decoherence_gap_residual(const SpinSystem& sys, const RateConstants& rates);

} // namespace radpair
