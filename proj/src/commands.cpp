#include "radpair/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "radpair/analysis.hpp"
#include "radpair/errors.hpp"
#include "radpair/evolve.hpp"
#include "radpair/trajectory.hpp"

namespace radpair {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_g15(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

namespace {

// empty field for absent values (e.g. stderr with a single trajectory)
std::string fmt_or_empty(double x) { return std::isnan(x) ? std::string() : fmt_g15(x); }

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw IoError("rename failed: " + path.string() + " (" + ec.message() + ")");
}

fs::path resolve_out_dir(const RunConfig& cfg, const CommandOptions& opt) {
    const fs::path dir = opt.out_override.empty() ? fs::path(cfg.out_dir) : fs::path(opt.out_override);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory: " + dir.string());
    return dir;
}

void echo_config(const RunConfig& cfg, const CommandOptions& opt, const fs::path& dir) {
    RunConfig resolved = cfg;
    if (!opt.out_override.empty())
        resolved.out_dir = opt.out_override;
    write_file_atomic(dir / (cfg.prefix + "_config.json"), to_json(resolved).dump(2) + "\n");
}

std::string evolution_csv(const EvolutionResult& ev) {
    std::ostringstream out;
    out << "t,pop_s,pop_t,yield_s,yield_t,trace,coherence_st\n";
    for (std::size_t i = 0; i < ev.times.size(); ++i)
        out << fmt_g15(ev.times[i]) << ',' << fmt_g15(ev.pop_s[i]) << ',' << fmt_g15(ev.pop_t[i])
            << ',' << fmt_g15(ev.yield_s[i]) << ',' << fmt_g15(ev.yield_t[i]) << ','
            << fmt_g15(ev.trace[i]) << ',' << fmt_g15(ev.coherence_st[i]) << '\n';
    return out.str();
}

Superoperator build_superop(SuperopKind kind, const SpinSystem& sys, const RateConstants& rates) {
    return kind == SuperopKind::haberkorn ? haberkorn_superop(sys, rates)
                                          : measurement_superop(sys, rates);
}

json fit_to_json(const std::optional<RateFit>& fit) {
    if (!fit)
        return nullptr;
    return json{{"rate", fit->rate},
                {"r_squared", fit->r_squared},
                {"t_lo", fit->t_lo},
                {"t_hi", fit->t_hi},
                {"low_r_squared", fit->low_r_squared}};
}

} // namespace

int cmd_evolve(const RunConfig& cfg, const CommandOptions& opt) {
    const SpinSystem sys = cfg.make_system();
    const ComplexMatrix rho0 = cfg.make_rho0(sys);
    const std::vector<double> times = cfg.times.materialize();
    const fs::path dir = resolve_out_dir(cfg, opt);
    for (SuperopKind kind : cfg.approaches()) {
        const EvolutionResult ev = propagate(sys, cfg.rates, build_superop(kind, sys, cfg.rates), rho0, times);
        write_file_atomic(dir / (cfg.prefix + "_" + to_string(kind) + ".csv"), evolution_csv(ev));
        if (!opt.quiet)
            std::cout << "wrote " << (dir / (cfg.prefix + "_" + to_string(kind) + ".csv")).string()
                      << " (" << times.size() << " rows)\n";
    }
    echo_config(cfg, opt, dir);
    return kExitOk;
}

int cmd_compare(const RunConfig& cfg, const CommandOptions& opt) {
    const SpinSystem sys = cfg.make_system();
    const ComplexMatrix rho0 = cfg.make_rho0(sys);
    const std::vector<double> times = cfg.times.materialize();
    const fs::path dir = resolve_out_dir(cfg, opt);

    const EvolutionResult hab =
        propagate(sys, cfg.rates, haberkorn_superop(sys, cfg.rates), rho0, times);
    const EvolutionResult mea =
        propagate(sys, cfg.rates, measurement_superop(sys, cfg.rates), rho0, times);
    write_file_atomic(dir / (cfg.prefix + "_haberkorn.csv"), evolution_csv(hab));
    write_file_atomic(dir / (cfg.prefix + "_measurement.csv"), evolution_csv(mea));

    double pop_diff = 0.0, coh_diff = 0.0, conservation = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        pop_diff = std::max({pop_diff, std::abs(hab.pop_s[i] - mea.pop_s[i]),
                             std::abs(hab.pop_t[i] - mea.pop_t[i])});
        coh_diff = std::max(coh_diff, std::abs(hab.coherence_st[i] - mea.coherence_st[i]));
        for (const EvolutionResult* ev : {&hab, &mea})
            conservation = std::max(conservation,
                                    std::abs(ev->pop_s[i] + ev->pop_t[i] + ev->yield_s[i] +
                                             ev->yield_t[i] - 1.0));
    }
    json report{
        {"max_abs_pop_diff", pop_diff},
        {"max_abs_coherence_diff", coh_diff},
        {"trace_defect_max", conservation},
        {"decoherence_gap_residual", decoherence_gap_residual(sys, cfg.rates)},
        {"yields",
         {{"haberkorn", {{"yield_s", hab.yield_s.back()}, {"yield_t", hab.yield_t.back()}}},
          {"measurement", {{"yield_s", mea.yield_s.back()}, {"yield_t", mea.yield_t.back()}}}}},
        {"fitted_rates",
         {{"haberkorn", fit_to_json(try_zeno_rate_fit(hab.times, hab.pop_s))},
          {"measurement", fit_to_json(try_zeno_rate_fit(mea.times, mea.pop_s))}}},
    };
    write_file_atomic(dir / (cfg.prefix + "_report.json"), report.dump(2) + "\n");
    echo_config(cfg, opt, dir);
    if (!opt.quiet)
        std::cout << "max_abs_pop_diff " << fmt_g15(pop_diff) << "\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt) {
    if (!cfg.two_level)
        throw ConfigError("sweep requires a two_level system");
    if (cfg.rates.k_s != 0.0 && !opt.quiet)
        std::cerr << "warning: sweep fixes k_s = 0; ignoring configured rates.k_s\n";
    const fs::path dir = resolve_out_dir(cfg, opt);

    std::vector<double> kt_grid, t_grid;
    for (std::int64_t i = 0; i < cfg.sweep.log10_count; ++i)
        kt_grid.push_back(cfg.sweep.log10_count == 1
                              ? cfg.sweep.log10_start
                              : cfg.sweep.log10_start + (cfg.sweep.log10_stop - cfg.sweep.log10_start) *
                                                            double(i) / double(cfg.sweep.log10_count - 1));
    for (std::int64_t i = 0; i < cfg.sweep.t_omega_count; ++i)
        t_grid.push_back(cfg.sweep.t_omega_count == 1
                             ? cfg.sweep.t_omega_start
                             : cfg.sweep.t_omega_start + (cfg.sweep.t_omega_stop - cfg.sweep.t_omega_start) *
                                                             double(i) / double(cfg.sweep.t_omega_count - 1));

    const SweepResult sweep = sweep_singlet_surface(cfg.omega, kt_grid, t_grid, cfg.approaches());

    std::ostringstream surface, rates_csv;
    surface << "log10_kt_over_omega,t_omega,pop_s,approach\n";
    rates_csv << "log10_kt_over_omega,approach,rate,r_squared\n";
    for (const ApproachSurface& surf : sweep.surfaces) {
        for (std::size_t r = 0; r < kt_grid.size(); ++r) {
            for (std::size_t c = 0; c < t_grid.size(); ++c)
                surface << fmt_g15(kt_grid[r]) << ',' << fmt_g15(t_grid[c]) << ','
                        << fmt_g15(surf.pop_s(Eigen::Index(r), Eigen::Index(c))) << ','
                        << to_string(surf.kind) << '\n';
            if (surf.fits[r])
                rates_csv << fmt_g15(kt_grid[r]) << ',' << to_string(surf.kind) << ','
                          << fmt_g15(surf.fits[r]->rate) << ',' << fmt_g15(surf.fits[r]->r_squared)
                          << '\n';
        }
    }
    write_file_atomic(dir / (cfg.prefix + "_surface.csv"), surface.str());
    write_file_atomic(dir / (cfg.prefix + "_rates.csv"), rates_csv.str());
    echo_config(cfg, opt, dir);
    if (!opt.quiet)
        std::cout << "wrote " << (dir / (cfg.prefix + "_surface.csv")).string() << "\n";
    return kExitOk;
}

int cmd_trajectories(const RunConfig& cfg, const CommandOptions& opt) {
    if (!cfg.trajectory)
        throw ConfigError("trajectory block is required for this command");
    const SpinSystem sys = cfg.make_system();
    const ComplexMatrix rho0 = cfg.make_rho0(sys);
    const fs::path dir = resolve_out_dir(cfg, opt);

    json summary;
    for (SuperopKind kind : cfg.approaches()) {
        TrajectoryConfig tc;
        tc.dt = cfg.trajectory->dt;
        tc.t_max = cfg.trajectory->t_max;
        tc.n_traj = cfg.trajectory->n_traj;
        tc.seed = cfg.trajectory->seed;
        tc.scheme = kind;
        const TrajectoryEnsemble ens = run_ensemble(sys, cfg.rates, rho0, tc);

        std::ostringstream out;
        out << "t,surviving_fraction,pop_s_est,pop_s_stderr,pop_t_est,pop_t_stderr\n";
        for (std::size_t i = 0; i < ens.times.size(); ++i)
            out << fmt_g15(ens.times[i]) << ',' << fmt_g15(ens.surviving_fraction[i]) << ','
                << fmt_g15(ens.pop_s_est[i]) << ',' << fmt_or_empty(ens.pop_s_stderr[i]) << ','
                << fmt_g15(ens.pop_t_est[i]) << ',' << fmt_or_empty(ens.pop_t_stderr[i]) << '\n';
        write_file_atomic(dir / (cfg.prefix + "_trajectories_" + to_string(kind) + ".csv"),
                          out.str());
        summary[to_string(kind)] = {{"n_traj", ens.n_traj},
                                    {"yield_s", ens.yield_s_final},
                                    {"yield_s_stderr", ens.yield_s_stderr},
                                    {"yield_t", ens.yield_t_final},
                                    {"yield_t_stderr", ens.yield_t_stderr},
                                    {"surviving_fraction_final", ens.surviving_fraction.back()}};
    }
    write_file_atomic(dir / (cfg.prefix + "_trajectory_yields.json"), summary.dump(2) + "\n");
    echo_config(cfg, opt, dir);
    return kExitOk;
}

int cmd_check(const RunConfig& cfg, const CommandOptions& opt) {
    const SpinSystem sys = cfg.make_system();
    sys.validate();
    const Superoperator hab = haberkorn_superop(sys, cfg.rates);
    const Superoperator mea = measurement_superop(sys, cfg.rates);

    // probe states: pure singlet slice, maximally mixed, and a few random ones
    std::vector<ComplexMatrix> probes;
    if (sys.q_singlet.trace().real() > 0.0)
        probes.push_back(sys.q_singlet / sys.q_singlet.trace().real());
    probes.push_back(sys.identity() / double(sys.dim));
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss;
    for (int r = 0; r < 3; ++r) {
        ComplexMatrix g(sys.dim, sys.dim);
        for (Eigen::Index i = 0; i < sys.dim; ++i)
            for (Eigen::Index j = 0; j < sys.dim; ++j)
                g(i, j) = Complex(gauss(rng), gauss(rng));
        ComplexMatrix rho = g * g.adjoint();
        probes.push_back(rho / rho.trace().real());
    }

    double dual_form = 0.0, app_hab = 0.0, app_mea = 0.0, trace_loss = 0.0;
    for (const ComplexMatrix& rho : probes) {
        const ComplexMatrix rm = rhs_measurement(sys, cfg.rates, rho);
        const ComplexMatrix rh = rhs_haberkorn(sys, cfg.rates, rho);
        dual_form = std::max(dual_form, max_abs(rm - rhs_measurement_projection(sys, cfg.rates, rho)));
        app_hab = std::max(app_hab, double((vec(rh) + hab.matrix * vec(rho)).cwiseAbs().maxCoeff()));
        app_mea = std::max(app_mea, double((vec(rm) + mea.matrix * vec(rho)).cwiseAbs().maxCoeff()));
        const auto [ps, pt] = populations(sys, rho);
        for (const ComplexMatrix* rhs : {&rh, &rm})
            trace_loss = std::max(trace_loss, std::abs(rhs->trace().real() + cfg.rates.k_s * ps +
                                                       cfg.rates.k_t * pt));
    }

    struct Line {
        const char* name;
        double value;
    };
    const Line lines[] = {
        {"hamiltonian_hermiticity_defect", hermiticity_defect(sys.hamiltonian)},
        {"projector_idempotency_defect",
         std::max(max_abs(sys.q_singlet * sys.q_singlet - sys.q_singlet),
                  max_abs(sys.q_triplet * sys.q_triplet - sys.q_triplet))},
        {"projector_completeness_defect", max_abs(sys.q_singlet + sys.q_triplet - sys.identity())},
        {"projector_orthogonality_defect", max_abs(sys.q_singlet * sys.q_triplet)},
        {"decoherence_gap_residual", decoherence_gap_residual(sys, cfg.rates)},
        {"measurement_dual_form_residual", dual_form},
        {"superop_application_residual_haberkorn", app_hab},
        {"superop_application_residual_measurement", app_mea},
        {"trace_loss_identity_residual", trace_loss},
    };
    bool ok = true;
    for (const Line& line : lines) {
        std::printf("%-42s %.3e\n", line.name, line.value);
        ok = ok && line.value <= 1e-9;
    }
    std::printf("%s\n", ok ? "all residuals within 1e-09" : "RESIDUAL EXCEEDED 1e-09");
    (void)opt;
    return ok ? kExitOk : kExitResidual;
}

} // namespace radpair
