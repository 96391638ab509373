#include "radpair/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radpair/parallel.hpp"

namespace radpair {

namespace {

constexpr double kWindowLo = 0.05, kWindowHi = 0.5;
constexpr double kR2Flag = 0.999;
constexpr double kMaxProminence = 1e-12; // roundoff guard for local maxima
constexpr double kMonotoneTol = 1e-6;
constexpr double kOscFloor = 1e-3;

std::vector<double> linspace(double a, double b, std::int64_t count) {
    std::vector<double> out;
    out.reserve(std::size_t(count));
    for (std::int64_t i = 0; i < count; ++i)
        out.push_back(count == 1 ? a : a + (b - a) * double(i) / double(count - 1));
    return out;
}

} // namespace

std::optional<RateFit> try_zeno_rate_fit(const std::vector<double>& times,
                                         const std::vector<double>& pop_s) {
    if (times.size() != pop_s.size() || times.size() < 2)
        return std::nullopt;
    // tail start: first index after which pop_s never exceeds the upper edge
    std::size_t tail = times.size();
    for (std::size_t i = times.size(); i-- > 0;) {
        if (pop_s[i] > kWindowHi)
            break;
        tail = i;
    }
    // the population must decay through the window exactly once: find the
    // first drop below the lower edge and reject curves that climb back
    // (truncated oscillations produce descending arcs that are not tails)
    std::size_t exit_idx = times.size();
    for (std::size_t i = tail; i < times.size(); ++i)
        if (pop_s[i] < kWindowLo) {
            exit_idx = i;
            break;
        }
    if (exit_idx == times.size())
        return std::nullopt;
    for (std::size_t i = exit_idx; i < times.size(); ++i)
        if (pop_s[i] >= kWindowLo)
            return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t count = 0;
    double t_lo = 0, t_hi = 0;
    for (std::size_t i = tail; i < exit_idx; ++i) {
        if (pop_s[i] < kWindowLo || pop_s[i] > kWindowHi)
            continue;
        const double x = times[i], y = std::log(pop_s[i]);
        if (count == 0)
            t_lo = x;
        t_hi = x;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++count;
    }
    if (count < 2)
        return std::nullopt;
    const double n = double(count);
    const double den = n * sxx - sx * sx;
    if (den <= 0.0)
        return std::nullopt;
    const double slope = (n * sxy - sx * sy) / den;
    RateFit fit;
    fit.rate = std::max(0.0, -slope);
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    const double ss_tot = syy - sy * sy / n;
    const double ss_res = ss_tot - slope * (sxy - sx * sy / n);
    fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    fit.low_r_squared = fit.r_squared < kR2Flag;
    return fit;
}

RateFit zeno_rate_fit(const std::vector<double>& times, const std::vector<double>& pop_s) {
    auto fit = try_zeno_rate_fit(times, pop_s);
    if (!fit)
        throw std::domain_error("zeno_rate_fit: population never settles into the fit window");
    return *fit;
}

const char* to_string(Regime regime) {
    switch (regime) {
    case Regime::oscillatory: return "oscillatory";
    case Regime::monotone_decay: return "monotone_decay";
    case Regime::zeno: return "zeno";
    }
    return "?";
}

Regime classify_regime(const std::vector<double>& times, const std::vector<double>& pop_s,
                       double reference_rate) {
    if (times.size() != pop_s.size() || times.size() < 100)
        throw std::invalid_argument("classify_regime: need at least 100 samples");
    int maxima = 0;
    for (std::size_t i = 1; i + 1 < pop_s.size(); ++i)
        if (pop_s[i] > kOscFloor && pop_s[i] > pop_s[i - 1] + kMaxProminence &&
            pop_s[i] > pop_s[i + 1] + kMaxProminence)
            ++maxima;
    if (maxima >= 2)
        return Regime::oscillatory;
    bool monotone = true;
    for (std::size_t i = 1; i < pop_s.size(); ++i)
        if (pop_s[i] > pop_s[i - 1] + kMonotoneTol) {
            monotone = false;
            break;
        }
    if (monotone) {
        double rate;
        if (auto fit = try_zeno_rate_fit(times, pop_s)) {
            rate = fit->rate;
        } else if (pop_s.back() > 0.0 && pop_s.front() > 0.0 && times.back() > times.front()) {
            // too little decay for the window; endpoint estimate is enough here
            rate = std::log(pop_s.front() / pop_s.back()) / (times.back() - times.front());
        } else {
            return Regime::monotone_decay;
        }
        if (rate < 0.5 * reference_rate)
            return Regime::zeno;
    }
    return Regime::monotone_decay;
}

std::vector<double> default_log10_kt_grid() { return linspace(-2.0, 3.0, 51); }
std::vector<double> default_sweep_time_grid() { return linspace(0.0, 20.0, 401); }

SweepResult sweep_singlet_surface(double omega, const std::vector<double>& log10_kt_grid,
                                  const std::vector<double>& time_grid_omega,
                                  const std::vector<SuperopKind>& approaches) {
    if (log10_kt_grid.empty() || time_grid_omega.empty())
        throw std::invalid_argument("sweep_singlet_surface: grids must be nonempty");
    if (!(omega > 0.0))
        throw std::invalid_argument("sweep_singlet_surface: omega must be positive");

    SweepResult result;
    result.omega = omega;
    result.log10_kt_over_omega = log10_kt_grid;
    result.time_grid = time_grid_omega;

    const SpinSystem sys = SpinSystem::minimal_two_level(omega);
    const ComplexMatrix rho0 = sys.q_singlet; // pure singlet, unit trace

    std::vector<double> times; // physical times
    times.reserve(time_grid_omega.size());
    for (double tw : time_grid_omega)
        times.push_back(tw / omega);

    for (SuperopKind kind : approaches) {
        ApproachSurface surf;
        surf.kind = kind;
        surf.pop_s.resize(Eigen::Index(log10_kt_grid.size()), Eigen::Index(times.size()));
        surf.fits.resize(log10_kt_grid.size());
        result.surfaces.push_back(std::move(surf));
    }

    parallel_for(log10_kt_grid.size() * approaches.size(), [&](std::size_t cell) {
        const std::size_t a = cell / log10_kt_grid.size();
        const std::size_t row = cell % log10_kt_grid.size();
        const RateConstants rates{0.0, omega * std::pow(10.0, log10_kt_grid[row])};
        const Superoperator op = approaches[a] == SuperopKind::haberkorn
                                     ? haberkorn_superop(sys, rates)
                                     : measurement_superop(sys, rates);
        EvolutionResult ev = propagate(sys, rates, op, rho0, times);
        for (std::size_t j = 0; j < ev.pop_s.size(); ++j)
            result.surfaces[a].pop_s(Eigen::Index(row), Eigen::Index(j)) = ev.pop_s[j];

        // Exponential-tail fit on its own horizon: the slowest decaying
        // generator eigenvalue sets how far out the window lies.
        const Propagator prop(op.matrix);
        double slowest = 0.0;
        if (prop.eigenbasis_ok()) {
            const double scale = std::max(1.0, max_abs(op.matrix));
            for (Eigen::Index i = 0; i < prop.eigenvalues().size(); ++i) {
                const double re = prop.eigenvalues()(i).real();
                if (re > 1e-12 * scale && (slowest == 0.0 || re < slowest))
                    slowest = re;
            }
        }
        if (slowest > 0.0) {
            const double horizon = 6.0 / slowest;
            const double period_res = 3.14159265358979323846 / (8.0 * omega);
            const auto n_pts = std::int64_t(
                std::clamp(horizon / std::min(period_res, horizon / 800.0), 801.0, 20001.0));
            EvolutionResult tail =
                propagate(sys, rates, op, rho0, linspace(0.0, horizon, n_pts));
            result.surfaces[a].fits[row] = try_zeno_rate_fit(tail.times, tail.pop_s);
        }
    });
    return result;
}

} // namespace radpair
