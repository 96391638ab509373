#include "radpair/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "radpair/errors.hpp"

namespace radpair {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

void expect_keys(const json& j, const std::string& field, const std::set<std::string>& allowed) {
    if (!j.is_object())
        fail(field, "must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            fail(field + "." + it.key(), "unknown field");
}

double get_number(const json& j, const std::string& field) {
    if (!j.is_number())
        fail(field, "must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        fail(field, "must be finite");
    return v;
}

std::int64_t get_integer(const json& j, const std::string& field) {
    if (!j.is_number_integer())
        fail(field, "must be an integer");
    return j.get<std::int64_t>();
}

Complex get_complex(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2)
        fail(field, "complex entries are [re, im] pairs");
    return {get_number(j[0], field + "[0]"), get_number(j[1], field + "[1]")};
}

ComplexMatrix get_matrix(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        fail(field, "must be a nonempty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0)
        fail(field, "rows must be nonempty arrays");
    ComplexMatrix m{Eigen::Index(rows), Eigen::Index(cols)};
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            fail(field, "rows must all have the same length");
        for (std::size_t k = 0; k < cols; ++k)
            m(Eigen::Index(i), Eigen::Index(k)) =
                get_complex(j[i][k], field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return m;
}

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            row.push_back({m(i, k).real(), m(i, k).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<double> TimesSpec::materialize() const {
    if (explicit_list)
        return values;
    std::vector<double> out;
    out.reserve(std::size_t(count));
    for (std::int64_t i = 0; i < count; ++i)
        out.push_back(start + (stop - start) * double(i) / double(count - 1));
    return out;
}

SpinSystem RunConfig::make_system() const {
    if (two_level)
        return SpinSystem::minimal_two_level(omega);
    return SpinSystem::from_matrices(hamiltonian, q_singlet);
}

ComplexMatrix RunConfig::make_rho0(const SpinSystem& sys) const {
    if (rho0_singlet) {
        const double tr = sys.q_singlet.trace().real();
        if (tr <= 0.0)
            throw ValidationError("rho0 'singlet' needs a nonzero singlet projector");
        return sys.q_singlet / tr;
    }
    return rho0_matrix;
}

std::vector<SuperopKind> RunConfig::approaches() const {
    if (approach == "haberkorn")
        return {SuperopKind::haberkorn};
    if (approach == "measurement")
        return {SuperopKind::measurement};
    return {SuperopKind::haberkorn, SuperopKind::measurement};
}

RunConfig parse_config_json(const json& j) {
    RunConfig cfg;
    expect_keys(j, "(root)",
                {"schema", "system", "rates", "rho0", "times", "approach", "trajectory", "sweep",
                 "output"});
    if (!j.contains("schema") || get_integer(j.at("schema"), "schema") != 1)
        fail("schema", "must be present and equal to 1");

    if (!j.contains("system"))
        fail("system", "is required");
    expect_keys(j.at("system"), "system", {"two_level", "explicit"});
    if (j.at("system").contains("two_level") == j.at("system").contains("explicit"))
        fail("system", "needs exactly one of 'two_level' or 'explicit'");
    if (j.at("system").contains("two_level")) {
        const auto& tl = j.at("system").at("two_level");
        expect_keys(tl, "system.two_level", {"omega"});
        if (!tl.contains("omega"))
            fail("system.two_level.omega", "is required");
        cfg.two_level = true;
        cfg.omega = get_number(tl.at("omega"), "system.two_level.omega");
    } else {
        const auto& ex = j.at("system").at("explicit");
        expect_keys(ex, "system.explicit", {"hamiltonian", "q_singlet"});
        if (!ex.contains("hamiltonian") || !ex.contains("q_singlet"))
            fail("system.explicit", "needs 'hamiltonian' and 'q_singlet'");
        cfg.two_level = false;
        cfg.hamiltonian = get_matrix(ex.at("hamiltonian"), "system.explicit.hamiltonian");
        cfg.q_singlet = get_matrix(ex.at("q_singlet"), "system.explicit.q_singlet");
    }

    if (!j.contains("rates"))
        fail("rates", "is required");
    expect_keys(j.at("rates"), "rates", {"k_s", "k_t"});
    cfg.rates.k_s = j.at("rates").contains("k_s") ? get_number(j.at("rates").at("k_s"), "rates.k_s") : 0.0;
    cfg.rates.k_t = j.at("rates").contains("k_t") ? get_number(j.at("rates").at("k_t"), "rates.k_t") : 0.0;
    if (cfg.rates.k_s < 0.0)
        fail("rates.k_s", "must be nonnegative");
    if (cfg.rates.k_t < 0.0)
        fail("rates.k_t", "must be nonnegative");

    if (j.contains("rho0")) {
        if (j.at("rho0").is_string()) {
            if (j.at("rho0").get<std::string>() != "singlet")
                fail("rho0", "string form must be \"singlet\"");
            cfg.rho0_singlet = true;
        } else {
            cfg.rho0_singlet = false;
            cfg.rho0_matrix = get_matrix(j.at("rho0"), "rho0");
        }
    }

    if (!j.contains("times"))
        fail("times", "is required");
    if (j.at("times").is_array()) {
        cfg.times.explicit_list = true;
        for (std::size_t i = 0; i < j.at("times").size(); ++i)
            cfg.times.values.push_back(get_number(j.at("times")[i], "times[" + std::to_string(i) + "]"));
        if (cfg.times.values.size() < 2)
            fail("times", "needs at least 2 points");
        if (!std::is_sorted(cfg.times.values.begin(), cfg.times.values.end()))
            fail("times", "must be sorted");
    } else {
        expect_keys(j.at("times"), "times", {"start", "stop", "count"});
        if (!j.at("times").contains("start") || !j.at("times").contains("stop") ||
            !j.at("times").contains("count"))
            fail("times", "needs start, stop and count");
        cfg.times.start = get_number(j.at("times").at("start"), "times.start");
        cfg.times.stop = get_number(j.at("times").at("stop"), "times.stop");
        cfg.times.count = get_integer(j.at("times").at("count"), "times.count");
        if (cfg.times.count < 2)
            fail("times.count", "must be at least 2");
        if (!(cfg.times.stop >= cfg.times.start))
            fail("times.stop", "must be >= times.start");
    }
    if (cfg.times.explicit_list ? cfg.times.values.front() < 0.0 : cfg.times.start < 0.0)
        fail("times", "must be nonnegative");

    if (j.contains("approach")) {
        if (!j.at("approach").is_string())
            fail("approach", "must be a string");
        cfg.approach = j.at("approach").get<std::string>();
        if (cfg.approach != "haberkorn" && cfg.approach != "measurement" && cfg.approach != "both")
            fail("approach", "must be haberkorn, measurement or both");
    }

    if (j.contains("trajectory")) {
        const auto& tj = j.at("trajectory");
        expect_keys(tj, "trajectory", {"dt", "t_max", "n_traj", "seed"});
        for (const char* key : {"dt", "t_max", "n_traj", "seed"})
            if (!tj.contains(key))
                fail(std::string("trajectory.") + key, "is required");
        TrajectorySpec ts;
        ts.dt = get_number(tj.at("dt"), "trajectory.dt");
        ts.t_max = get_number(tj.at("t_max"), "trajectory.t_max");
        ts.n_traj = get_integer(tj.at("n_traj"), "trajectory.n_traj");
        ts.seed = std::uint64_t(get_integer(tj.at("seed"), "trajectory.seed"));
        if (!(ts.dt > 0.0))
            fail("trajectory.dt", "must be positive");
        if (!(ts.t_max > 0.0))
            fail("trajectory.t_max", "must be positive");
        if (ts.n_traj < 1)
            fail("trajectory.n_traj", "must be at least 1");
        cfg.trajectory = ts;
    }

    if (j.contains("sweep")) {
        const auto& sj = j.at("sweep");
        expect_keys(sj, "sweep", {"log10_kt_over_omega", "t_omega"});
        auto grid = [&](const json& g, const std::string& field, double& start, double& stop,
                        std::int64_t& count) {
            expect_keys(g, field, {"start", "stop", "count"});
            if (g.contains("start"))
                start = get_number(g.at("start"), field + ".start");
            if (g.contains("stop"))
                stop = get_number(g.at("stop"), field + ".stop");
            if (g.contains("count"))
                count = get_integer(g.at("count"), field + ".count");
            if (count < 1)
                fail(field + ".count", "must be at least 1");
        };
        if (sj.contains("log10_kt_over_omega"))
            grid(sj.at("log10_kt_over_omega"), "sweep.log10_kt_over_omega", cfg.sweep.log10_start,
                 cfg.sweep.log10_stop, cfg.sweep.log10_count);
        if (sj.contains("t_omega"))
            grid(sj.at("t_omega"), "sweep.t_omega", cfg.sweep.t_omega_start,
                 cfg.sweep.t_omega_stop, cfg.sweep.t_omega_count);
    }

    if (j.contains("output")) {
        expect_keys(j.at("output"), "output", {"directory", "prefix"});
        if (j.at("output").contains("directory")) {
            if (!j.at("output").at("directory").is_string())
                fail("output.directory", "must be a string");
            cfg.out_dir = j.at("output").at("directory").get<std::string>();
        }
        if (j.at("output").contains("prefix")) {
            if (!j.at("output").at("prefix").is_string())
                fail("output.prefix", "must be a string");
            cfg.prefix = j.at("output").at("prefix").get<std::string>();
        }
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config_json(j);
}

json to_json(const RunConfig& cfg) {
    json j;
    j["schema"] = cfg.schema;
    if (cfg.two_level)
        j["system"] = {{"two_level", {{"omega", cfg.omega}}}};
    else
        j["system"] = {{"explicit",
                        {{"hamiltonian", matrix_to_json(cfg.hamiltonian)},
                         {"q_singlet", matrix_to_json(cfg.q_singlet)}}}};
    j["rates"] = {{"k_s", cfg.rates.k_s}, {"k_t", cfg.rates.k_t}};
    if (cfg.rho0_singlet)
        j["rho0"] = "singlet";
    else
        j["rho0"] = matrix_to_json(cfg.rho0_matrix);
    if (cfg.times.explicit_list)
        j["times"] = cfg.times.values;
    else
        j["times"] = {{"start", cfg.times.start}, {"stop", cfg.times.stop}, {"count", cfg.times.count}};
    j["approach"] = cfg.approach;
    if (cfg.trajectory)
        j["trajectory"] = {{"dt", cfg.trajectory->dt},
                           {"t_max", cfg.trajectory->t_max},
                           {"n_traj", cfg.trajectory->n_traj},
                           {"seed", cfg.trajectory->seed}};
    j["sweep"] = {{"log10_kt_over_omega",
                   {{"start", cfg.sweep.log10_start},
                    {"stop", cfg.sweep.log10_stop},
                    {"count", cfg.sweep.log10_count}}},
                  {"t_omega",
                   {{"start", cfg.sweep.t_omega_start},
                    {"stop", cfg.sweep.t_omega_stop},
                    {"count", cfg.sweep.t_omega_count}}}};
    j["output"] = {{"directory", cfg.out_dir}, {"prefix", cfg.prefix}};
    return j;
}

} // namespace radpair
