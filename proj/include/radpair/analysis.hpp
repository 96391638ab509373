#pragma once

// Decay-rate extraction, regime classification and the k_t sweep of the
// singlet-population surface comparing both kinetics.

#include <optional>
#include <vector>

#include "radpair/evolve.hpp"

namespace radpair {

struct RateFit {
    double rate = 0.0; // -slope of ln(pop_s) over the window, >= 0 clamped
    double r_squared = 0.0;
    double t_lo = 0.0, t_hi = 0.0; // window actually used
    bool low_r_squared = false;    // flagged (not an error) when r^2 < 0.999
};

// Least-squares line fit of ln(pop_s) vs t over the exponential tail: samples
// with pop_s in [0.05, 0.5], restricted to times after which pop_s never rises
// above 0.5 again. Undamped oscillations therefore have an empty window.
// try_ returns nullopt when the window is empty (or has < 2 samples); the
// plain form throws std::domain_error.
std::optional<RateFit> try_zeno_rate_fit(const std::vector<double>& times,
                                         const std::vector<double>& pop_s);
RateFit zeno_rate_fit(const std::vector<double>& times, const std::vector<double>& pop_s);

enum class Regime { oscillatory, monotone_decay, zeno };
const char* to_string(Regime regime);

// oscillatory:    >= 2 strict local maxima above 1e-3 (1e-12 prominence margin)
// zeno:           monotone within 1e-6 and decay rate < 0.5 * reference_rate
// monotone_decay: otherwise
// reference_rate is min(k_s + k_t, omega) of the generating system; the caller
// supplies it because the classifier sees only the sampled curve. Throws
// std::invalid_argument with fewer than 100 samples.
Regime classify_regime(const std::vector<double>& times, const std::vector<double>& pop_s,
                       double reference_rate);

struct ApproachSurface {
    SuperopKind kind = SuperopKind::haberkorn;
    Eigen::MatrixXd pop_s;                    // rows: k_t grid, cols: time grid
    std::vector<std::optional<RateFit>> fits; // per k_t row; nullopt when no window
};

struct SweepResult {
    double omega = 1.0;
    std::vector<double> log10_kt_over_omega;
    std::vector<double> time_grid; // in units of 1/omega
    std::vector<ApproachSurface> surfaces;
};

std::vector<double> default_log10_kt_grid();   // [-2, 3], 51 points
std::vector<double> default_sweep_time_grid(); // t*omega in [0, 20], 401 points

// Singlet-population surface pop_s(k_t, t) for a pure-singlet two-level pair
// with k_s = 0, per approach. Decay rates are fitted per k_t row on an
// automatic horizon long enough for the exponential tail (the slowest decaying
// superoperator eigenvalue sets the scale); rows with no decaying eigenvalue
// get no fit. Rows are evaluated in parallel, assembled deterministically.
SweepResult sweep_singlet_surface(double omega, const std::vector<double>& log10_kt_grid,
                                  const std::vector<double>& time_grid_omega,
                                  const std::vector<SuperopKind>& approaches);

} // namespace radpair
