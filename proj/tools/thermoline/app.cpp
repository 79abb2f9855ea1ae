#include "app.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thermoline/bounds.hpp"
#include "thermoline/inference.hpp"
#include "thermoline/io.hpp"
#include "thermoline/measurement.hpp"
#include "thermoline/random.hpp"
#include "thermoline/sample_models.hpp"
#include "thermoline/simulate.hpp"
#include "thermoline/version.hpp"

namespace thermoline::cli {
namespace {

using nlohmann::json;

// Configuration mistakes get their own type so the dispatcher can map them to
// exit code 2 with a message that names the offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// View over one JSON object that keeps track of its dotted path, so error
// messages can say `prior.theta_min` instead of just `theta_min`.
struct Section {
    const json* obj;
    std::string path;

    std::string full(const std::string& name) const {
        return path.empty() ? name : path + "." + name;
    }
    bool has(const std::string& name) const { return obj->contains(name); }
    const json& raw(const std::string& name) const {
        if (!obj->contains(name)) throw ConfigError("missing required field `" + full(name) + "`");
        return obj->at(name);
    }
    Section child(const std::string& name) const { return Section{&raw(name), full(name)}; }

    double number(const std::string& name) const {
        const json& v = raw(name);
        if (!v.is_number()) throw ConfigError("field `" + full(name) + "` must be a number");
        return v.get<double>();
    }
    double number_or(const std::string& name, double fallback) const {
        return has(name) ? number(name) : fallback;
    }
    long long integer(const std::string& name) const {
        const json& v = raw(name);
        if (!v.is_number_integer() && !v.is_number_unsigned())
            throw ConfigError("field `" + full(name) + "` must be an integer");
        return v.get<long long>();
    }
    long long integer_or(const std::string& name, long long fallback) const {
        return has(name) ? integer(name) : fallback;
    }
    std::uint64_t u64(const std::string& name) const {
        const json& v = raw(name);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw ConfigError("field `" + full(name) + "` must be a nonnegative integer");
        return v.get<std::uint64_t>();
    }
    std::string str(const std::string& name) const {
        const json& v = raw(name);
        if (!v.is_string()) throw ConfigError("field `" + full(name) + "` must be a string");
        return v.get<std::string>();
    }
    std::vector<long long> integer_array(const std::string& name) const {
        const json& v = raw(name);
        if (!v.is_array()) throw ConfigError("field `" + full(name) + "` must be an array");
        std::vector<long long> out;
        for (const auto& e : v) {
            if (!e.is_number_integer() && !e.is_number_unsigned())
                throw ConfigError("field `" + full(name) + "` must contain only integers");
            out.push_back(e.get<long long>());
        }
        return out;
    }
    std::vector<double> number_array(const std::string& name) const {
        const json& v = raw(name);
        if (!v.is_array()) throw ConfigError("field `" + full(name) + "` must be an array");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError("field `" + full(name) + "` must contain only numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
};

models::SampleModel parse_model(const Section& root) {
    Section m = root.child("model");
    const std::string kind = m.str("kind");
    if (kind == "ideal_reservoir")
        return models::SampleModel::ideal_reservoir(m.number_or("capacity_scale", 1.0));
    if (kind == "spin_half") return models::SampleModel::spin_half(m.number("gap"));
    if (kind == "boson_mode") return models::SampleModel::boson_mode(m.number("gap"));
    throw ConfigError("field `model.kind` must be one of ideal_reservoir, spin_half, boson_mode");
}

json effective_model(const models::SampleModel& m) {
    json j;
    j["kind"] = models::kind_name(m.kind);
    if (m.kind == models::ModelKind::ideal_reservoir)
        j["capacity_scale"] = m.capacity_scale;
    else
        j["gap"] = m.gap;
    return j;
}

infer::PriorSpec parse_prior(const Section& root, const models::SampleModel& model) {
    Section p = root.child("prior");
    infer::PriorSpec spec;
    spec.alpha = p.number("alpha");
    spec.domain = models::TemperatureDomain(model, p.number("theta_min"), p.number("theta_max"));
    return spec;
}

json effective_prior(const infer::PriorSpec& spec) {
    json j;
    j["alpha"] = spec.alpha;
    j["theta_min"] = spec.domain.theta_min;
    j["theta_max"] = spec.domain.theta_max;
    return j;
}

meas::MeasurementModel parse_measurement(const Section& root, const models::TemperatureDomain& domain) {
    Section m = root.child("measurement");
    const std::string kind = m.str("kind");
    if (kind == "spin_energy") {
        const long long mu = m.integer_or("batch_size", 1);
        if (mu < 0) throw ConfigError("field `measurement.batch_size` must be nonnegative");
        return meas::MeasurementModel::spin_energy(m.number("gap"), static_cast<int>(mu));
    }
    if (kind == "boson_occupation") {
        if (m.has("cutoff"))
            return meas::MeasurementModel::boson_occupation(m.number("gap"),
                                                            static_cast<int>(m.integer("cutoff")));
        return meas::MeasurementModel::boson_occupation(m.number("gap"), domain);
    }
    throw ConfigError("field `measurement.kind` must be spin_energy or boson_occupation");
}

json effective_measurement(const meas::MeasurementModel& m) {
    json j;
    j["gap"] = m.probe_gap;
    if (m.kind == meas::ProbeKind::spin_energy) {
        j["kind"] = "spin_energy";
        j["batch_size"] = m.batch_size;
    } else {
        j["kind"] = "boson_occupation";
        j["cutoff"] = m.occupation_cutoff;
    }
    return j;
}

int parse_grid_size(const Section& root) {
    const long long g = root.integer_or("grid_size", infer::default_grid_size);
    if (g < infer::min_grid_size || g > (1 << 24))
        throw ConfigError("field `grid_size` must be between " + std::to_string(infer::min_grid_size) +
                          " and " + std::to_string(1 << 24));
    return static_cast<int>(g);
}

std::vector<int> parse_nu_grid(const Section& root) {
    if (!root.has("nu_grid")) return sim::default_nu_grid();
    std::vector<int> grid;
    for (long long v : root.integer_array("nu_grid")) {
        if (v < 1 || v > (1ll << 31) - 1) throw ConfigError("field `nu_grid` entries must be in [1, 2^31)");
        grid.push_back(static_cast<int>(v));
    }
    return grid;
}

struct RunResult {
    std::uint64_t config_hash = 0;
    std::vector<std::filesystem::path> artifacts;
};

struct RunInputs {
    Section root;
    std::string command;
    std::uint64_t seed;
    int threads;
    std::filesystem::path outdir;
};

json effective_base(const RunInputs& in) {
    json j;
    j["command"] = in.command;
    j["seed"] = in.seed;
    return j;
}

RunResult run_prior(const RunInputs& in) {
    const auto model = parse_model(in.root);
    const auto spec = parse_prior(in.root, model);
    const int grid_size = parse_grid_size(in.root);

    json eff = effective_base(in);
    eff["grid_size"] = grid_size;
    eff["model"] = effective_model(model);
    eff["prior"] = effective_prior(spec);
    const std::uint64_t hash = io::fnv1a64(eff.dump());

    const auto grid = infer::smoothed_jeffreys_prior(spec, model, grid_size);
    const auto path = in.outdir / "prior_grid.csv";
    io::atomic_write(path, io::grid_csv(grid, hash));
    return {hash, {path}};
}

RunResult run_geometry(const RunInputs& in) {
    const double gap = in.root.number_or("gap", 1.0);
    if (!(gap > 0)) throw ConfigError("field `gap` must be positive");
    const double tmin = in.root.number_or("theta_min", gap / 10.0);
    const double tmax = in.root.number_or("theta_max", 5.0 * gap);
    if (!(tmin > 0) || !(tmax > tmin))
        throw ConfigError("fields `theta_min`/`theta_max` must satisfy 0 < theta_min < theta_max");
    const long long n = in.root.integer_or("n_points", 1001);
    if (n < 2 || n > (1 << 24)) throw ConfigError("field `n_points` must be in [2, 2^24]");
    const double scale = in.root.number_or("capacity_scale", 1.0);

    json eff = effective_base(in);
    eff["gap"] = gap;
    eff["theta_min"] = tmin;
    eff["theta_max"] = tmax;
    eff["n_points"] = n;
    eff["capacity_scale"] = scale;
    const std::uint64_t hash = io::fnv1a64(eff.dump());

    const auto reservoir = models::SampleModel::ideal_reservoir(scale);
    const auto spin = models::SampleModel::spin_half(gap);
    const auto boson = models::SampleModel::boson_mode(gap);

    std::string csv = "# config_hash=" + io::hash_hex(hash) + "\n";
    csv += "theta,qfi_reservoir,lambda_reservoir,qfi_spin,lambda_spin,qfi_boson,lambda_boson\n";
    for (long long i = 0; i < n; ++i) {
        const double theta = tmin + (tmax - tmin) * static_cast<double>(i) / static_cast<double>(n - 1);
        csv += io::format_value(theta);
        for (const auto* m : {&reservoir, &spin, &boson}) {
            csv += ',';
            csv += io::format_value(models::qfi(*m, theta));
            csv += ',';
            csv += io::format_value(models::lambda_of_theta(*m, theta));
        }
        csv += '\n';
    }
    const auto path = in.outdir / "geometry.csv";
    io::atomic_write(path, csv);
    return {hash, {path}};
}

RunResult run_trajectory_cmd(const RunInputs& in) {
    const auto model = parse_model(in.root);
    const auto spec = parse_prior(in.root, model);
    const auto m = parse_measurement(in.root, spec.domain);
    const int grid_size = parse_grid_size(in.root);
    const long long nu = in.root.integer("nu");
    if (nu < 0 || nu > 1000000) throw ConfigError("field `nu` must be in [0, 10^6]");
    const double true_theta = in.root.number("true_theta");

    json eff = effective_base(in);
    eff["grid_size"] = grid_size;
    eff["model"] = effective_model(model);
    eff["measurement"] = effective_measurement(m);
    eff["prior"] = effective_prior(spec);
    eff["nu"] = nu;
    eff["true_theta"] = true_theta;
    const std::uint64_t hash = io::fnv1a64(eff.dump());

    const auto grid = infer::smoothed_jeffreys_prior(spec, model, grid_size);
    const auto rec = sim::run_trajectory(grid, m, static_cast<int>(nu), true_theta, in.seed);
    const auto path = in.outdir / "trajectory.csv";
    io::atomic_write(path, io::trajectory_csv(rec, hash));
    return {hash, {path}};
}

RunResult run_ensemble_cmd(const RunInputs& in) {
    const auto model = parse_model(in.root);
    const auto spec = parse_prior(in.root, model);
    const auto m = parse_measurement(in.root, spec.domain);
    const int grid_size = parse_grid_size(in.root);
    const auto nu_grid = parse_nu_grid(in.root);
    const long long n_traj = in.root.integer("n_traj");
    if (n_traj < 2 || n_traj > 1000000) throw ConfigError("field `n_traj` must be in [2, 10^6]");

    json eff = effective_base(in);
    eff["grid_size"] = grid_size;
    eff["model"] = effective_model(model);
    eff["measurement"] = effective_measurement(m);
    eff["prior"] = effective_prior(spec);
    eff["nu_grid"] = nu_grid;
    eff["n_traj"] = n_traj;
    const std::uint64_t hash = io::fnv1a64(eff.dump());

    const auto grid = infer::smoothed_jeffreys_prior(spec, model, grid_size);
    const auto summary =
        sim::run_ensemble(grid, m, nu_grid, static_cast<int>(n_traj), in.seed, in.threads);
    const auto path = in.outdir / "ensemble.csv";
    io::atomic_write(path, io::ensemble_csv(summary, hash));
    return {hash, {path}};
}

RunResult run_bounds_cmd(const RunInputs& in) {
    const auto model = parse_model(in.root);
    const auto spec = parse_prior(in.root, model);
    const auto m = parse_measurement(in.root, spec.domain);
    const int grid_size = parse_grid_size(in.root);
    const auto nu_grid = parse_nu_grid(in.root);
    const long long n_mc = in.root.integer_or("n_mc", bounds::default_tbcrb_draws);
    if (n_mc < 100 || n_mc > 1000000) throw ConfigError("field `n_mc` must be in [100, 10^6]");

    json eff = effective_base(in);
    eff["grid_size"] = grid_size;
    eff["model"] = effective_model(model);
    eff["measurement"] = effective_measurement(m);
    eff["prior"] = effective_prior(spec);
    eff["nu_grid"] = nu_grid;
    eff["n_mc"] = n_mc;
    const std::uint64_t hash = io::fnv1a64(eff.dump());

    const auto grid = infer::smoothed_jeffreys_prior(spec, model, grid_size);
    std::vector<bounds::BoundReport> rows;
    rows.reserve(nu_grid.size());
    for (std::size_t j = 0; j < nu_grid.size(); ++j)
        rows.push_back(bounds::report(grid, model, m, nu_grid[j], static_cast<int>(n_mc),
                                      rng::derive_stream_seed(in.seed, j), in.threads));

    const auto csv_path = in.outdir / "bounds.csv";
    const auto json_path = in.outdir / "bounds.json";
    io::atomic_write(csv_path, io::bounds_csv(rows, hash));
    io::atomic_write(json_path, io::bounds_json(rows, hash));
    return {hash, {csv_path, json_path}};
}

RunResult run_adaptive_cmd(const RunInputs& in) {
    models::SampleModel model = models::SampleModel::ideal_reservoir();
    if (in.root.has("model")) model = parse_model(in.root);
    const auto spec = parse_prior(in.root, model);
    const int grid_size = parse_grid_size(in.root);
    const long long nu = in.root.integer("nu");
    if (nu < 1 || nu > 1000000) throw ConfigError("field `nu` must be in [1, 10^6]");
    const long long n_traj = in.root.integer("n_traj");
    if (n_traj < 2 || n_traj > 1000000) throw ConfigError("field `n_traj` must be in [2, 10^6]");

    sim::AdaptivePolicy policy;
    policy.reference = model;
    policy.gap_candidates = in.root.has("gap_candidates")
                                ? in.root.number_array("gap_candidates")
                                : sim::default_gap_candidates(spec.domain);

    json eff = effective_base(in);
    eff["grid_size"] = grid_size;
    eff["model"] = effective_model(model);
    eff["prior"] = effective_prior(spec);
    eff["nu"] = nu;
    eff["n_traj"] = n_traj;
    eff["gap_candidates"] = policy.gap_candidates;
    const std::uint64_t hash = io::fnv1a64(eff.dump());

    const auto grid = infer::smoothed_jeffreys_prior(spec, model, grid_size);
    const auto summary = sim::run_adaptive(grid, policy, static_cast<int>(nu),
                                           static_cast<int>(n_traj), in.seed, in.threads);
    const auto path = in.outdir / "adaptive_ensemble.csv";
    io::atomic_write(path, io::ensemble_csv(summary, hash));
    return {hash, {path}};
}

RunResult dispatch(const RunInputs& in) {
    if (in.command == "prior") return run_prior(in);
    if (in.command == "geometry") return run_geometry(in);
    if (in.command == "trajectory") return run_trajectory_cmd(in);
    if (in.command == "ensemble") return run_ensemble_cmd(in);
    if (in.command == "bounds") return run_bounds_cmd(in);
    if (in.command == "adaptive") return run_adaptive_cmd(in);
    throw ConfigError(
        "field `command` must be one of prior, geometry, trajectory, ensemble, bounds, adaptive");
}

}  // namespace

int main_impl(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian thermometry simulations on the thermodynamic-length scale"};
    app.name("thermoline");

    std::string config_path;
    app.add_option("--config", config_path, "path to the JSON experiment config")->required();
    std::uint64_t seed_override = 0;
    auto* seed_opt = app.add_option("--seed", seed_override, "override the config seed");
    std::string output_override;
    auto* output_opt = app.add_option("--output", output_override, "output directory");
    int threads_override = 0;
    auto* threads_opt =
        app.add_option("--threads", threads_override, "worker threads (0 = THERMOLINE_THREADS or all cores)");
    app.set_version_flag("--version", version_string);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    json cfg;
    {
        std::ifstream file(config_path);
        if (!file) {
            err << "config error: cannot open `" << config_path << "`\n";
            return 2;
        }
        try {
            cfg = json::parse(file);
        } catch (const json::parse_error& e) {
            err << "config error: " << e.what() << "\n";
            return 2;
        }
    }

    const auto t0 = std::chrono::steady_clock::now();
    RunResult result;
    RunInputs in{Section{&cfg, ""}, "", 0, 0, {}};
    try {
        if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
        in.command = in.root.str("command");
        in.seed = seed_opt->count() ? seed_override : in.root.u64("seed");
        if (threads_opt->count())
            in.threads = threads_override;
        else
            in.threads = static_cast<int>(in.root.integer_or("threads", 0));
        in.outdir = output_opt->count() ? output_override : in.root.has("output") ? in.root.str("output") : ".";

        std::filesystem::create_directories(in.outdir);
        result = dispatch(in);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return 3;
    }
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;

    nlohmann::ordered_json manifest;
    manifest["command"] = in.command;
    manifest["config_hash"] = io::hash_hex(result.config_hash);
    manifest["seed"] = in.seed;
    manifest["version"] = version_string;
    manifest["wall_time_seconds"] = wall.count();
    manifest["artifacts"] = json::array();
    for (const auto& p : result.artifacts) manifest["artifacts"].push_back(p.string());
    out << manifest.dump() << "\n";
    return 0;
}

}  // namespace thermoline::cli
