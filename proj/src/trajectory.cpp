#include "radpair/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "radpair/errors.hpp"
#include "radpair/evolve.hpp"
#include "radpair/parallel.hpp"

namespace radpair {

namespace {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();
constexpr std::int64_t kChunk = 1024; // trajectories per reduction block (fixed for determinism)

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream for trajectory i, independent of threading.
std::uint64_t stream_seed(std::uint64_t master, std::int64_t index) {
    return splitmix64(master ^ splitmix64(0x9E3779B97F4A7C15ULL * (std::uint64_t(index) + 1)));
}

struct TrajRng {
    std::mt19937_64 eng;
    explicit TrajRng(std::uint64_t s) : eng(s) {}
    double uniform() { return double(eng() >> 11) * 0x1.0p-53; }             // [0, 1)
    double uniform_pos() { return double((eng() >> 11) + 1) * 0x1.0p-53; }   // (0, 1]
};

// Lattice steps until the first success of a per-step Bernoulli(p).
std::uint64_t geometric_steps(TrajRng& rng, double p) {
    if (p <= 0.0)
        return kNever;
    if (p >= 1.0)
        return 1;
    const double g = std::log(rng.uniform_pos()) / std::log1p(-p);
    if (!(g < 9.0e18))
        return kNever;
    return 1 + static_cast<std::uint64_t>(g);
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    return (b == kNever || a > kNever - b) ? kNever : a + b;
}

// Binary powers of the one-step operator; advancing by m steps multiplies the
// powers matching the set bits of m, so long gaps cost O(log m).
struct StepPowers {
    std::array<ComplexMatrix, 64> pow2;
    explicit StepPowers(const ComplexMatrix& one_step) {
        pow2[0] = one_step;
        for (int k = 1; k < 64; ++k)
            pow2[k] = pow2[k - 1] * pow2[k - 1];
    }
    void advance(ComplexVector& psi, std::uint64_t m) const {
        for (int k = 0; m != 0; ++k, m >>= 1)
            if (m & 1)
                psi = pow2[k] * psi;
    }
};

double expectation(const ComplexMatrix& q, const ComplexVector& psi) {
    const double v = psi.dot(q * psi).real();
    return std::clamp(v, 0.0, 1.0);
}

struct Accum {
    std::vector<double> sum_s, sum_s2, sum_t, sum_t2;
    std::vector<std::int64_t> alive;
    std::vector<std::int64_t> hist_s, hist_t;
    std::int64_t reacted_s = 0, reacted_t = 0;

    explicit Accum(std::size_t n_grid)
        : sum_s(n_grid, 0.0), sum_s2(n_grid, 0.0), sum_t(n_grid, 0.0), sum_t2(n_grid, 0.0),
          alive(n_grid, 0), hist_s(n_grid ? n_grid - 1 : 0, 0),
          hist_t(n_grid ? n_grid - 1 : 0, 0) {}

    void merge(const Accum& o) {
        for (std::size_t i = 0; i < sum_s.size(); ++i) {
            sum_s[i] += o.sum_s[i];
            sum_s2[i] += o.sum_s2[i];
            sum_t[i] += o.sum_t[i];
            sum_t2[i] += o.sum_t2[i];
            alive[i] += o.alive[i];
        }
        for (std::size_t i = 0; i < hist_s.size(); ++i) {
            hist_s[i] += o.hist_s[i];
            hist_t[i] += o.hist_t[i];
        }
        reacted_s += o.reacted_s;
        reacted_t += o.reacted_t;
    }
};

struct SharedSetup {
    const SpinSystem& sys;
    RateConstants rates;
    TrajectoryConfig cfg;
    std::vector<std::uint64_t> record_steps;
    // initial-state mixture
    std::vector<double> init_cum;
    std::vector<ComplexVector> init_states;
    // measurement scheme
    double p_s = 0.0, p_t = 0.0, p_any = 0.0;
    std::unique_ptr<StepPowers> coherent;
    ComplexMatrix qbar_s, qbar_t;
    // haberkorn scheme
    double p_bar = 0.0;
    std::unique_ptr<StepPowers> no_jump;
};

void record_point(Accum& acc, const SharedSetup& s, std::size_t g, const ComplexVector& psi) {
    const double qs = expectation(s.sys.q_singlet, psi);
    const double qt = expectation(s.sys.q_triplet, psi);
    acc.sum_s[g] += qs;
    acc.sum_s2[g] += qs * qs;
    acc.sum_t[g] += qt;
    acc.sum_t2[g] += qt * qt;
    acc.alive[g] += 1;
}

void record_reaction(Accum& acc, const SharedSetup& s, bool singlet, std::uint64_t step) {
    // bin i covers steps in (record_steps[i], record_steps[i+1]]
    const auto it = std::lower_bound(s.record_steps.begin(), s.record_steps.end(), step);
    std::size_t bin = std::size_t(it - s.record_steps.begin());
    bin = std::min(bin > 0 ? bin - 1 : 0, s.record_steps.size() - 2);
    if (singlet) {
        acc.reacted_s += 1;
        acc.hist_s[bin] += 1;
    } else {
        acc.reacted_t += 1;
        acc.hist_t[bin] += 1;
    }
}

ComplexVector sample_initial(const SharedSetup& s, TrajRng& rng) {
    if (s.init_states.size() == 1)
        return s.init_states[0];
    const double u = rng.uniform();
    for (std::size_t k = 0; k < s.init_states.size(); ++k)
        if (u < s.init_cum[k])
            return s.init_states[k];
    return s.init_states.back();
}

void run_measurement_trajectory(const SharedSetup& s, TrajRng& rng, Accum& acc) {
    ComplexVector psi = sample_initial(s, rng);
    std::uint64_t steps_done = 0;
    std::uint64_t next_fire = geometric_steps(rng, s.p_any);
    for (std::size_t g = 0; g < s.record_steps.size(); ++g) {
        const std::uint64_t target = s.record_steps[g];
        while (next_fire <= target) {
            s.coherent->advance(psi, next_fire - steps_done);
            steps_done = next_fire;
            // which checks fired, conditional on at least one; singlet resolves first
            const double u = rng.uniform() * s.p_any;
            const bool fire_s = u < s.p_s;
            const bool fire_t = u >= s.p_s * (1.0 - s.p_t);
            if (fire_s) {
                const double q = expectation(s.sys.q_singlet, psi);
                if (rng.uniform() < q) {
                    record_reaction(acc, s, true, steps_done);
                    return;
                }
                psi = s.qbar_s * psi;
                const double n = psi.norm();
                if (n == 0.0) {
                    record_reaction(acc, s, true, steps_done);
                    return;
                }
                psi /= n;
            }
            if (fire_t) {
                const double q = expectation(s.sys.q_triplet, psi);
                if (rng.uniform() < q) {
                    record_reaction(acc, s, false, steps_done);
                    return;
                }
                psi = s.qbar_t * psi;
                const double n = psi.norm();
                if (n == 0.0) {
                    record_reaction(acc, s, false, steps_done);
                    return;
                }
                psi /= n;
            }
            next_fire = saturating_add(steps_done, geometric_steps(rng, s.p_any));
        }
        s.coherent->advance(psi, target - steps_done);
        steps_done = target;
        record_point(acc, s, g, psi);
    }
}

void run_haberkorn_trajectory(const SharedSetup& s, TrajRng& rng, Accum& acc) {
    ComplexVector psi = sample_initial(s, rng);
    // applied = number of no-jump one-step maps already absorbed into psi;
    // the fire check at lattice step c sees the state after c-1 of them.
    std::uint64_t applied = 0;
    std::uint64_t next_cand = geometric_steps(rng, s.p_bar);
    const double k_s = s.rates.k_s, k_t = s.rates.k_t;
    for (std::size_t g = 0; g < s.record_steps.size(); ++g) {
        const std::uint64_t target = s.record_steps[g];
        while (next_cand <= target) {
            const std::uint64_t c = next_cand;
            s.no_jump->advance(psi, (c - 1) - applied);
            applied = c - 1;
            psi.normalize();
            const double ws = k_s * expectation(s.sys.q_singlet, psi);
            const double wt = k_t * expectation(s.sys.q_triplet, psi);
            const double dp = s.cfg.dt * (ws + wt);
            // thinning: candidate arrived at rate p_bar >= dp
            if (rng.uniform() < dp / s.p_bar) {
                const bool singlet = rng.uniform() * (ws + wt) < ws;
                record_reaction(acc, s, singlet, c);
                return;
            }
            next_cand = saturating_add(c, geometric_steps(rng, s.p_bar));
        }
        s.no_jump->advance(psi, target - applied);
        applied = target;
        psi.normalize();
        record_point(acc, s, g, psi);
    }
}

} // namespace

TrajectoryEnsemble run_ensemble(const SpinSystem& sys, const RateConstants& rates,
                                const ComplexMatrix& rho0, const TrajectoryConfig& cfg) {
    sys.validate();
    validate_rates(rates);
    validate_density_matrix(rho0);
    if (rho0.rows() != sys.dim)
        throw ValidationError("run_ensemble: rho0 dimension mismatch");
    if (cfg.n_traj < 1)
        throw ValidationError("run_ensemble: n_traj must be at least 1");
    if (!(cfg.dt > 0.0) || !(cfg.t_max > 0.0))
        throw ValidationError("run_ensemble: dt and t_max must be positive");
    if (cfg.scheme == SuperopKind::coherent_only)
        throw ValidationError("run_ensemble: scheme must be haberkorn or measurement");

    // stability bound: dt <= 0.01 min(1/||H||_2, 1/(k_s+k_t)), each where positive
    {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sys.hamiltonian, Eigen::EigenvaluesOnly);
        const double h_norm = es.eigenvalues().cwiseAbs().maxCoeff();
        double bound = std::numeric_limits<double>::infinity();
        if (h_norm > 0.0)
            bound = std::min(bound, 0.01 / h_norm);
        if (rates.k_s + rates.k_t > 0.0)
            bound = std::min(bound, 0.01 / (rates.k_s + rates.k_t));
        if (cfg.dt > bound * (1.0 + 1e-12))
            throw ValidationError("run_ensemble: dt violates the stability bound");
    }

    SharedSetup s{sys, rates, cfg};

    const auto n_steps = std::uint64_t(std::llround(cfg.t_max / cfg.dt));
    const std::uint64_t steps = std::max<std::uint64_t>(n_steps, 1);
    const int n_record = std::max(2, cfg.n_record);
    const std::uint64_t stride = std::max<std::uint64_t>(1, steps / std::uint64_t(n_record - 1));
    for (std::uint64_t st = 0; st < steps; st += stride)
        s.record_steps.push_back(st);
    s.record_steps.push_back(steps);

    // initial mixture from the spectral decomposition of rho0
    {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho0);
        double total = 0.0;
        std::vector<double> probs;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
            const double p = std::max(0.0, es.eigenvalues()(k));
            if (p > 1e-14) {
                probs.push_back(p);
                s.init_states.push_back(es.eigenvectors().col(k).normalized());
                total += p;
            }
        }
        double cum = 0.0;
        for (double p : probs) {
            cum += p / total;
            s.init_cum.push_back(cum);
        }
        s.init_cum.back() = 1.0;
    }

    const Complex im(0, 1);
    if (cfg.scheme == SuperopKind::measurement) {
        s.p_s = rates.k_s * cfg.dt;
        s.p_t = rates.k_t * cfg.dt;
        s.p_any = 1.0 - (1.0 - s.p_s) * (1.0 - s.p_t);
        s.coherent = std::make_unique<StepPowers>(expm((-im * cfg.dt * sys.hamiltonian).eval()));
        s.qbar_s = sys.identity() - sys.q_singlet;
        s.qbar_t = sys.identity() - sys.q_triplet;
    } else {
        s.p_bar = cfg.dt * std::max(rates.k_s, rates.k_t);
        const ComplexMatrix k_half = 0.5 * (rates.k_s * sys.q_singlet + rates.k_t * sys.q_triplet);
        s.no_jump = std::make_unique<StepPowers>(
            expm(((-im * sys.hamiltonian - k_half) * cfg.dt).eval()));
    }

    const std::size_t n_grid = s.record_steps.size();
    const std::size_t n_chunks = std::size_t((cfg.n_traj + kChunk - 1) / kChunk);
    std::vector<Accum> partial(n_chunks, Accum(n_grid));
    parallel_for(n_chunks, [&](std::size_t chunk) {
        const std::int64_t lo = std::int64_t(chunk) * kChunk;
        const std::int64_t hi = std::min(lo + kChunk, cfg.n_traj);
        for (std::int64_t i = lo; i < hi; ++i) {
            TrajRng rng(stream_seed(cfg.seed, i));
            if (cfg.scheme == SuperopKind::measurement)
                run_measurement_trajectory(s, rng, partial[chunk]);
            else
                run_haberkorn_trajectory(s, rng, partial[chunk]);
        }
    });
    Accum total(n_grid);
    for (const auto& p : partial)
        total.merge(p); // fixed chunk order -> identical sums for any thread count

    TrajectoryEnsemble out;
    out.n_traj = cfg.n_traj;
    const double n = double(cfg.n_traj);
    out.times.reserve(n_grid);
    for (auto st : s.record_steps)
        out.times.push_back(double(st) * cfg.dt);
    auto mean_stderr = [&](double sum, double sum2) {
        const double mean = sum / n;
        double se = std::numeric_limits<double>::quiet_NaN();
        if (cfg.n_traj > 1) {
            const double var = std::max(0.0, (sum2 - sum * sum / n) / (n - 1.0));
            se = std::sqrt(var / n);
        }
        return std::pair<double, double>(mean, se);
    };
    for (std::size_t g = 0; g < n_grid; ++g) {
        out.surviving_fraction.push_back(double(total.alive[g]) / n);
        auto [ms, es_] = mean_stderr(total.sum_s[g], total.sum_s2[g]);
        out.pop_s_est.push_back(ms);
        out.pop_s_stderr.push_back(es_);
        auto [mt, et] = mean_stderr(total.sum_t[g], total.sum_t2[g]);
        out.pop_t_est.push_back(mt);
        out.pop_t_stderr.push_back(et);
    }
    out.yield_s_final = double(total.reacted_s) / n;
    out.yield_t_final = double(total.reacted_t) / n;
    out.yield_s_stderr = std::sqrt(out.yield_s_final * (1.0 - out.yield_s_final) / n);
    out.yield_t_stderr = std::sqrt(out.yield_t_final * (1.0 - out.yield_t_final) / n);
    out.singlet_reactions_per_bin = std::move(total.hist_s);
    out.triplet_reactions_per_bin = std::move(total.hist_t);
    return out;
}

} // namespace radpair
