#pragma once

// Stochastic pure-state unravelings of both master equations. Each radical
// pair is a trajectory; reaction events remove it from the ensemble, so
// ensemble averages of alive-weighted expectation values estimate the
// unnormalized populations of the corresponding deterministic evolution.

#include <cstdint>
#include <vector>

#include "radpair/superop.hpp"

namespace radpair {

struct TrajectoryConfig {
    double dt = 1e-3;   // step of the underlying Bernoulli lattice
    double t_max = 1.0; // horizon (rounded to a whole number of steps)
    std::int64_t n_traj = 1000;
    std::uint64_t seed = 0;
    SuperopKind scheme = SuperopKind::measurement; // measurement or haberkorn
    int n_record = 201; // output grid points (capped by the step count)
};

struct TrajectoryEnsemble {
    std::vector<double> times;
    std::vector<double> surviving_fraction; // exact counts / n_traj, non-increasing
    std::vector<double> pop_s_est, pop_s_stderr;
    std::vector<double> pop_t_est, pop_t_stderr;
    double yield_s_final = 0.0, yield_s_stderr = 0.0;
    double yield_t_final = 0.0, yield_t_stderr = 0.0;
    // Reaction counts binned per output interval (times[i], times[i+1]].
    std::vector<std::int64_t> singlet_reactions_per_bin;
    std::vector<std::int64_t> triplet_reactions_per_bin;
    std::int64_t n_traj = 0;
};

// Runs cfg.n_traj independent trajectories from pure states sampled out of the
// eigendecomposition of rho0.
//
// measurement scheme, per lattice step: coherent update psi <- exp(-iH dt) psi;
// then with probability k_s dt a singlet measurement fires (the pair reacts
// with probability <Q_s> or is projected onto the complement), then likewise
// for the triplet channel. haberkorn scheme, per lattice step: a reaction fires
// with probability dt (k_s<Q_s> + k_t<Q_t>), channel chosen proportionally;
// otherwise psi evolves under exp((-iH - (k_s Q_s + k_t Q_t)/2) dt),
// renormalized.
//
// The fire draws are sampled by exact gap skipping (geometric gaps; thinning
// against the bound dt*max(k_s,k_t) for the state-dependent haberkorn
// probability), so the cost scales with the number of reaction checks that
// fire, not with 1/dt. Identical (seed, cfg) gives bit-identical results
// regardless of thread count.
//
// Throws ValidationError if dt violates the stability bound
// dt <= 0.01 * min(1/||H||_2, 1/(k_s+k_t)) (each factor only where positive)
// or n_traj < 1.
TrajectoryEnsemble run_ensemble(const SpinSystem& sys, const RateConstants& rates,
                                const ComplexMatrix& rho0, const TrajectoryConfig& cfg);

} // namespace radpair
