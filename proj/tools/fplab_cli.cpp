// Experiment front end: reads a declarative JSON config, runs one of the
// experiment families, writes bit-stable CSV/JSON/PGM artifacts plus a
// manifest. Exit codes: 0 ok, 2 config parse error, 3 validation error,
// 4 numerical failure.
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fplab/contraction.hpp"
#include "fplab/errors.hpp"
#include "fplab/fixpoint.hpp"
#include "fplab/io.hpp"
#include "fplab/parallel.hpp"
#include "fplab/sweep.hpp"
#include "fplab/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* TOOL_VERSION = "0.1.0";
constexpr std::uint64_t TAG_BASINS = 1, TAG_BETA = 2, TAG_DATA = 5, TAG_TRAIN = 6;

struct CliError : std::runtime_error {
    CliError(int code, const std::string& type, const std::string& msg)
        : std::runtime_error(msg), code(code), type(type) {}
    int code;
    std::string type;
};

[[noreturn]] void parse_fail(const std::string& msg) { throw CliError(2, "parse", msg); }
[[noreturn]] void validation_fail(const std::string& msg) { throw CliError(3, "validation", msg); }

template <typename T>
T get_req(const json& j, const std::string& key) {
    if (!j.contains(key)) parse_fail("missing required key: " + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        parse_fail("bad value for key " + key + ": " + e.what());
    }
}

template <typename T>
T get_opt(const json& j, const std::string& key, T def) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        parse_fail("bad value for key " + key + ": " + e.what());
    }
}

fplab::ActivationKind parse_activation_cfg(const json& j, const std::string& key,
                                           const std::string& def) {
    const std::string name = get_opt<std::string>(j, key, def);
    try {
        return fplab::parse_activation(name);
    } catch (const std::invalid_argument& e) {
        parse_fail(e.what());
    }
}

fplab::DistributionSpec parse_dist(const json& j) {
    fplab::DistributionSpec d;
    const std::string fam = get_opt<std::string>(j, "family", "gauss");
    try {
        d.family = fplab::parse_family(fam);
    } catch (const std::invalid_argument& e) {
        parse_fail(e.what());
    }
    const std::string rule = get_opt<std::string>(j, "scale_rule", "inverse_width");
    if (rule == "inverse_width") {
        d.scale_rule = fplab::ScaleRule::PerLayerInverseWidth;
    } else if (rule == "power_law") {
        d.scale_rule = fplab::ScaleRule::PowerLaw;
        d.beta = get_req<double>(j, "beta");
    } else if (rule == "inverse_sqrt_depth") {
        d.scale_rule = fplab::ScaleRule::InverseSqrtDepth;
    } else if (rule == "fixed") {
        d.scale_rule = fplab::ScaleRule::Fixed;
        d.value = get_req<double>(j, "value");
    } else {
        parse_fail("unknown scale_rule: " + rule);
    }
    d.zero_bias = get_opt<bool>(j, "zero_bias", false);
    return d;
}

fplab::GridSpec parse_grid(const json& j) {
    fplab::GridSpec g;
    if (j.contains("grid")) g.delta = get_opt<double>(j.at("grid"), "delta", 0.05);
    if (!(g.delta > 0.0) || g.delta > 2.0)
        validation_fail("GridSpec: delta must be in (0, 2], got " + fplab::fmt_double(g.delta));
    return g;
}

fplab::IterationPolicy parse_policy(const json& j) {
    fplab::IterationPolicy p;
    if (j.contains("policy")) {
        p.epsilon = get_opt<double>(j.at("policy"), "epsilon", 1e-5);
        p.max_iters = get_opt<std::size_t>(j.at("policy"), "max_iters", 50);
    }
    if (!(p.epsilon > 0.0)) validation_fail("IterationPolicy: epsilon must be > 0");
    if (p.max_iters < 1) validation_fail("IterationPolicy: max_iters must be >= 1");
    return p;
}

std::vector<std::size_t> parse_widths(const json& j) {
    auto widths = get_req<std::vector<std::size_t>>(j, "widths");
    if (widths.size() < 2) validation_fail("widths needs at least 2 entries");
    for (auto w : widths)
        if (w < 1) validation_fail("widths entries must be >= 1");
    return widths;
}

std::vector<double> parse_betas(const json& j) {
    if (!j.contains("betas")) parse_fail("missing required key: betas");
    const json& jb = j.at("betas");
    std::vector<double> betas;
    if (jb.is_array()) {
        betas = jb.get<std::vector<double>>();
    } else if (jb.is_object()) {
        const double from = get_req<double>(jb, "from");
        const double to = get_req<double>(jb, "to");
        const double step = get_req<double>(jb, "step");
        if (!(step > 0.0)) validation_fail("betas.step must be > 0");
        for (int i = 0;; ++i) {
            const double b = from + step * i;
            if (b > to + 1e-12) break;
            betas.push_back(b);
        }
    } else {
        parse_fail("betas must be an array or {from,to,step}");
    }
    if (betas.size() < 2) validation_fail("beta sweep needs >= 2 values");
    return betas;
}

struct Artifacts {
    fs::path dir;
    std::vector<std::string> written;
    void write(const std::string& name, const std::string& content) {
        fplab::write_file((dir / name).string(), content);
        written.push_back(name);
    }
};

ordered_json config_echo(const json& cfg) { return ordered_json::parse(cfg.dump()); }

void run_basins(const json& cfg, std::uint64_t master, std::size_t jobs, Artifacts* art) {
    const auto widths = parse_widths(cfg);
    if (widths.front() != 2 || widths.back() != 2)
        validation_fail("basins command needs an autoencoder with n_0 = n_L = 2");
    const auto activation = parse_activation_cfg(cfg, "activation", "tanh");
    const auto dist = parse_dist(get_opt<json>(cfg, "dist", json::object()));
    const auto grid = parse_grid(cfg);
    const auto policy = parse_policy(cfg);
    const double cluster_radius = get_opt<double>(cfg, "cluster_radius", 1e-3);
    if (!(cluster_radius > 0.0)) validation_fail("cluster_radius must be > 0");
    const auto seed_index = get_opt<std::uint64_t>(cfg, "seed_index", 0);

    const fplab::Seed seed = fplab::derive_seed(master, TAG_BASINS, seed_index);
    const fplab::Network net = fplab::init_network(widths, activation, dist, seed);
    const fplab::FixedPointReport rep =
        fplab::find_fixed_points(net, grid, policy, cluster_radius, jobs);
    art->write("fixed_points.json", fplab::fixed_points_to_json(rep));
    art->write("basins.csv", fplab::basins_to_csv(rep));
    art->write("basins.pgm", fplab::basins_to_pgm(rep));
}

void run_sweep_depth(const json& cfg, std::uint64_t master, std::size_t jobs, Artifacts* art) {
    fplab::SweepConfig sc;
    sc.width_N0 = get_opt<std::size_t>(cfg, "width_N0", 100);
    sc.depths = get_req<std::vector<std::size_t>>(cfg, "depths");
    if (sc.depths.empty()) validation_fail("depths must be nonempty");
    for (auto L : sc.depths)
        if (L < 1) validation_fail("depths entries must be >= 1");
    sc.family = parse_dist(get_opt<json>(cfg, "dist", json::object()));
    sc.activation = parse_activation_cfg(cfg, "activation", "tanh");
    sc.n_seeds = get_opt<std::size_t>(cfg, "n_seeds", 1);
    if (sc.n_seeds < 1) validation_fail("n_seeds must be >= 1");
    sc.grid = parse_grid(cfg);
    sc.policy = parse_policy(cfg);
    sc.cluster_radius = get_opt<double>(cfg, "cluster_radius", 1e-3);
    if (!(sc.cluster_radius > 0.0)) validation_fail("cluster_radius must be > 0");
    sc.master_seed = master;

    const fplab::SweepReport rep = fplab::run_sweep(sc, jobs);
    art->write("sweep_summary.csv", fplab::summarize(rep));
    if (get_opt<bool>(cfg, "write_fixed_points", true))
        art->write("sweep_fixed_points.json", fplab::sweep_fixed_points_json(rep));
}

void run_beta_sweep(const json& cfg, std::uint64_t master, std::size_t jobs, Artifacts* art) {
    const std::size_t width_N = get_req<std::size_t>(cfg, "width_N");
    if (width_N < 2) validation_fail("width_N must be >= 2");
    const std::size_t depth_L = get_opt<std::size_t>(cfg, "depth_L", 1);
    if (depth_L < 1) validation_fail("depth_L must be >= 1");
    const auto activation = parse_activation_cfg(cfg, "activation", "tanh");
    const auto betas = parse_betas(cfg);
    const std::size_t n_seeds = get_opt<std::size_t>(cfg, "n_seeds", 20);
    if (n_seeds < 1) validation_fail("n_seeds must be >= 1");
    const auto grid = parse_grid(cfg);

    std::vector<fplab::Seed> seeds;
    for (std::size_t i = 0; i < n_seeds; ++i)
        seeds.push_back(fplab::derive_seed(master, TAG_BETA, i));
    const std::vector<std::size_t> widths(depth_L + 1, width_N);
    const fplab::ContractionCurve curve =
        fplab::beta_sweep(widths, activation, betas, seeds, grid, jobs);

    std::string csv = "beta,seed_index,g\n";
    for (std::size_t i = 0; i < curve.samples.size(); ++i)
        csv += fplab::csv_row({fplab::fmt_double(curve.samples[i].beta),
                               std::to_string(i % n_seeds), fplab::fmt_double(curve.samples[i].g)});
    art->write("curve.csv", csv);
    ordered_json sum;
    if (curve.beta_cr)
        sum["beta_cr"] = *curve.beta_cr;
    else
        sum["beta_cr"] = nullptr;
    sum["diagnostic"] = curve.diagnostic;
    art->write("summary.json", sum.dump(2));
}

void run_depth_curve(const json& cfg, std::uint64_t master, std::size_t jobs, Artifacts* art) {
    const std::size_t width_N = get_req<std::size_t>(cfg, "width_N");
    if (width_N < 2) validation_fail("width_N must be >= 2");
    const auto activation = parse_activation_cfg(cfg, "activation", "tanh");
    const double beta = get_req<double>(cfg, "beta");
    const auto depths = get_req<std::vector<std::size_t>>(cfg, "depths");
    if (depths.empty()) validation_fail("depths must be nonempty");
    for (auto L : depths)
        if (L < 1) validation_fail("depths entries must be >= 1");
    const std::size_t n_seeds = get_opt<std::size_t>(cfg, "n_seeds", 20);
    if (n_seeds < 1) validation_fail("n_seeds must be >= 1");
    const auto grid = parse_grid(cfg);

    const fplab::DepthCurve dc =
        fplab::depth_curve(width_N, activation, beta, depths, n_seeds, master, grid, jobs);
    std::string csv = "L,seed_index,g\n";
    for (std::size_t i = 0; i < dc.samples.size(); ++i)
        csv += fplab::csv_row({std::to_string(dc.samples[i].depth_L), std::to_string(i % n_seeds),
                               fplab::fmt_double(dc.samples[i].g)});
    art->write("curve.csv", csv);
    ordered_json sum;
    sum["slope"] = dc.slope;
    sum["intercept"] = dc.intercept;
    sum["r2"] = dc.r2;
    auto& rows = sum["mean_g"] = ordered_json::array();
    for (const auto& r : dc.rows) {
        ordered_json jr;
        jr["L"] = r.L;
        jr["mean_g"] = r.mean_g;
        rows.push_back(std::move(jr));
    }
    art->write("summary.json", sum.dump(2));
}

void run_train_verify(const json& cfg, std::uint64_t master, std::size_t jobs, Artifacts* art) {
    const std::size_t K = get_opt<std::size_t>(cfg, "K", 5);
    const double radius = get_opt<double>(cfg, "radius", 0.15);
    const std::size_t ppc = get_opt<std::size_t>(cfg, "points_per_class", 50);
    const bool fixed_ring = get_opt<bool>(cfg, "fixed_ring", false);
    if (K < 1) validation_fail("K must be >= 1");
    if (!(radius > 0.0)) validation_fail("radius must be > 0");
    if (ppc < 1) validation_fail("points_per_class must be >= 1");

    fplab::TrainConfig tc;
    if (cfg.contains("widths")) tc.widths = parse_widths(cfg);
    if (tc.widths.front() != 2 || tc.widths.back() != 2)
        validation_fail("train-verify needs an autoencoder with n_0 = n_L = 2");
    tc.activation = parse_activation_cfg(cfg, "activation", "hardtanh");
    if (cfg.contains("optimizer")) {
        const json& jo = cfg.at("optimizer");
        tc.optimizer.learning_rate = get_opt<double>(jo, "learning_rate", 0.05);
        tc.optimizer.batch_size = get_opt<std::size_t>(jo, "batch_size", 16);
        tc.optimizer.max_epochs = get_opt<std::size_t>(jo, "max_epochs", 5000);
        tc.optimizer.target_loss = get_opt<double>(jo, "target_loss", 1e-4);
    }
    if (tc.optimizer.learning_rate < 0.0) validation_fail("learning_rate must be >= 0");
    if (tc.optimizer.max_epochs < 1) validation_fail("max_epochs must be >= 1");
    if (cfg.contains("init")) tc.init = parse_dist(cfg.at("init"));
    const auto grid = parse_grid(cfg);
    const auto policy = parse_policy(cfg);
    const double cluster_radius = get_opt<double>(cfg, "cluster_radius", 1e-3);
    if (!(cluster_radius > 0.0)) validation_fail("cluster_radius must be > 0");

    const auto data_index = get_opt<std::uint64_t>(cfg, "data_seed_index", 0);
    const auto train_index = get_opt<std::uint64_t>(cfg, "train_seed_index", 0);
    tc.seed = fplab::derive_seed(master, TAG_TRAIN, train_index);

    fplab::TrainingSet ts;
    try {
        ts = fplab::make_discs(K, radius, grid, ppc,
                               fplab::derive_seed(master, TAG_DATA, data_index), fixed_ring);
    } catch (const fplab::PackingError& e) {
        validation_fail(e.what());
    }
    const fplab::TrainTrace trace = fplab::train(tc, ts);
    const fplab::VerificationReport rep =
        fplab::verify_trained(trace.final_network, ts, grid, policy, cluster_radius, jobs);
    art->write("training_set.json", fplab::training_set_to_json(ts));
    art->write("loss_history.csv", fplab::loss_history_to_csv(trace));
    art->write("trained_net.json", fplab::network_to_json(trace.final_network));
    art->write("verify.json", fplab::verification_to_json(rep));
}

void run_variance_check(const json& cfg, std::uint64_t master, std::size_t /*jobs*/,
                        Artifacts* art) {
    const std::size_t width_N = get_opt<std::size_t>(cfg, "width_N", 100);
    const double sigma = get_opt<double>(cfg, "sigma", 0.1);
    const std::size_t n_seeds = get_opt<std::size_t>(cfg, "n_seeds", 10000);
    if (width_N < 1) validation_fail("width_N must be >= 1");
    if (sigma < 0.0) validation_fail("sigma must be >= 0");
    if (n_seeds < 1) validation_fail("n_seeds must be >= 1");

    const fplab::LayerStats st = fplab::preactivation_variance(width_N, sigma, n_seeds, master);
    ordered_json sum;
    sum["width_N"] = st.width_N;
    sum["sigma"] = st.sigma;
    sum["n_seeds"] = n_seeds;
    sum["variance"] = st.preactivation_variance;
    sum["expected"] = (static_cast<double>(width_N) + 1.0) * sigma * sigma;
    art->write("summary.json", sum.dump(2));
}

void validate_config(const json& cfg) {
    const std::string command = get_req<std::string>(cfg, "command");
    const auto master = get_opt<std::uint64_t>(cfg, "master_seed", 0);
    ordered_json out;
    out["command"] = command;
    out["master_seed"] = master;

    if (command == "basins") {
        const auto widths = parse_widths(cfg);
        if (widths.front() != 2 || widths.back() != 2)
            validation_fail("basins command needs an autoencoder with n_0 = n_L = 2");
        const auto dist = parse_dist(get_opt<json>(cfg, "dist", json::object()));
        const auto grid = parse_grid(cfg);
        parse_policy(cfg);
        out["grid_points"] = grid.total_points();
        out["grid_delta"] = grid.delta;
        auto& scales = out["per_layer_scales"] = ordered_json::array();
        for (std::size_t l = 0; l + 1 < widths.size(); ++l)
            scales.push_back(fplab::scale_for_layer(dist, widths, l));
    } else if (command == "sweep-depth") {
        const auto depths = get_req<std::vector<std::size_t>>(cfg, "depths");
        if (depths.empty()) validation_fail("depths must be nonempty");
        const auto grid = parse_grid(cfg);
        parse_policy(cfg);
        const std::size_t n_seeds = get_opt<std::size_t>(cfg, "n_seeds", 1);
        out["grid_points"] = grid.total_points();
        out["cells"] = depths.size() * n_seeds;
        auto& seeds = out["seed_list_head"] = ordered_json::array();
        for (std::size_t i = 0; i < std::min<std::size_t>(n_seeds, 3); ++i)
            seeds.push_back(fplab::derive_seed(master, depths[0], i).value);
    } else if (command == "beta-sweep") {
        const auto betas = parse_betas(cfg);
        const auto grid = parse_grid(cfg);
        out["grid_points"] = grid.total_points();
        out["n_betas"] = betas.size();
        out["beta_first"] = betas.front();
        out["beta_last"] = betas.back();
    } else if (command == "depth-curve") {
        get_req<std::size_t>(cfg, "width_N");
        get_req<double>(cfg, "beta");
        const auto depths = get_req<std::vector<std::size_t>>(cfg, "depths");
        if (depths.empty()) validation_fail("depths must be nonempty");
        const auto grid = parse_grid(cfg);
        out["grid_points"] = grid.total_points();
        out["n_depths"] = depths.size();
    } else if (command == "train-verify") {
        const std::size_t K = get_opt<std::size_t>(cfg, "K", 5);
        const double radius = get_opt<double>(cfg, "radius", 0.15);
        if (K < 1) validation_fail("K must be >= 1");
        if (!(radius > 0.0)) validation_fail("radius must be > 0");
        if (cfg.contains("widths")) {
            const auto widths = parse_widths(cfg);
            if (widths.front() != 2 || widths.back() != 2)
                validation_fail("train-verify needs an autoencoder with n_0 = n_L = 2");
        }
        const auto grid = parse_grid(cfg);
        parse_policy(cfg);
        out["grid_points"] = grid.total_points();
        out["K"] = K;
        out["points_per_class"] = get_opt<std::size_t>(cfg, "points_per_class", 50);
    } else if (command == "variance-check") {
        const std::size_t width_N = get_opt<std::size_t>(cfg, "width_N", 100);
        const double sigma = get_opt<double>(cfg, "sigma", 0.1);
        out["expected_variance"] = (static_cast<double>(width_N) + 1.0) * sigma * sigma;
    } else {
        parse_fail("unknown command: " + command);
    }
    std::cout << out.dump(2) << std::endl;
}

int run_config(const std::string& config_path, std::optional<std::size_t> jobs_flag) {
    json cfg;
    try {
        cfg = json::parse(fplab::read_file(config_path));
    } catch (const std::exception& e) {
        parse_fail(std::string("cannot parse config: ") + e.what());
    }
    const std::string command = get_req<std::string>(cfg, "command");
    const std::string output_dir = get_req<std::string>(cfg, "output_dir");
    const auto master = get_opt<std::uint64_t>(cfg, "master_seed", 0);
    std::size_t jobs = jobs_flag.value_or(get_opt<std::size_t>(cfg, "jobs", 1));
    jobs = fplab::resolve_jobs(jobs);

    // validate fully before any side effects, so bad configs leave nothing behind
    validate_config(cfg);

    Artifacts art;
    art.dir = output_dir;
    std::error_code ec;
    fs::create_directories(art.dir, ec);
    if (ec) validation_fail("cannot create output_dir: " + output_dir);

    const auto t0 = std::chrono::steady_clock::now();
    if (command == "basins")
        run_basins(cfg, master, jobs, &art);
    else if (command == "sweep-depth")
        run_sweep_depth(cfg, master, jobs, &art);
    else if (command == "beta-sweep")
        run_beta_sweep(cfg, master, jobs, &art);
    else if (command == "depth-curve")
        run_depth_curve(cfg, master, jobs, &art);
    else if (command == "train-verify")
        run_train_verify(cfg, master, jobs, &art);
    else if (command == "variance-check")
        run_variance_check(cfg, master, jobs, &art);
    else
        parse_fail("unknown command: " + command);
    const auto t1 = std::chrono::steady_clock::now();

    ordered_json manifest;
    manifest["tool_version"] = TOOL_VERSION;
    manifest["command"] = command;
    manifest["jobs"] = jobs;
    manifest["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    manifest["artifacts"] = art.written;
    manifest["config"] = config_echo(cfg);
    fplab::write_file((art.dir / "manifest.json").string(), manifest.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed-point laboratory for random-weight networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::size_t> jobs_flag;
    auto* run_cmd = app.add_subcommand("run", "execute the experiment in the config file");
    run_cmd->add_option("config", config_path, "config JSON path")->required();
    std::size_t jobs_val = 0;
    auto* jobs_opt = run_cmd->add_option("--jobs", jobs_val, "worker threads");

    std::string validate_path;
    auto* val_cmd = app.add_subcommand("validate", "dry-run validation of a config file");
    val_cmd->add_option("config", validate_path, "config JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            if (*jobs_opt) jobs_flag = jobs_val;
            return run_config(config_path, jobs_flag);
        }
        json cfg;
        try {
            cfg = json::parse(fplab::read_file(validate_path));
        } catch (const std::exception& e) {
            parse_fail(std::string("cannot parse config: ") + e.what());
        }
        validate_config(cfg);
        return 0;
    } catch (const CliError& e) {
        ordered_json err;
        err["error"]["type"] = e.type;
        err["error"]["message"] = e.what();
        std::cerr << err.dump(2) << std::endl;
        return e.code;
    } catch (const fplab::DivergenceError& e) {
        ordered_json err;
        err["error"]["type"] = "numeric";
        err["error"]["message"] = e.what();
        err["error"]["loss_trace_tail"] = std::vector<double>(
            e.loss_trace.end() - std::min<std::size_t>(e.loss_trace.size(), 5),
            e.loss_trace.end());
        std::cerr << err.dump(2) << std::endl;
        return 4;
    } catch (const std::invalid_argument& e) {
        ordered_json err;
        err["error"]["type"] = "validation";
        err["error"]["message"] = e.what();
        std::cerr << err.dump(2) << std::endl;
        return 3;
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"]["type"] = "numeric";
        err["error"]["message"] = e.what();
        std::cerr << err.dump(2) << std::endl;
        return 4;
    }
}
