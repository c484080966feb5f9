// End-to-end checks of the command-line tool: exit codes, error payloads,
// artifact layout, and byte-stability of reruns. The last two argv entries
// are the tool path and the shipped configs directory (wired in CMake).
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "fplab/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli;
fs::path g_configs;
fs::path g_tmp;

struct Proc {
    int code = -1;
    std::string out, err;
};

Proc run_proc(const std::string& args) {
    const fs::path so = g_tmp / "stdout.txt", se = g_tmp / "stderr.txt";
    const std::string cmd =
        "'" + g_cli + "' " + args + " > '" + so.string() + "' 2> '" + se.string() + "'";
    const int rc = std::system(cmd.c_str());
    Proc p;
    p.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    p.out = fplab::read_file(so.string());
    p.err = fplab::read_file(se.string());
    return p;
}

fs::path write_config(const std::string& name, const json& cfg) {
    const fs::path p = g_tmp / name;
    fplab::write_file(p.string(), cfg.dump(2));
    return p;
}

json small_basins_config(const fs::path& outdir) {
    json cfg;
    cfg["command"] = "basins";
    cfg["output_dir"] = outdir.string();
    cfg["master_seed"] = 1;
    cfg["seed_index"] = 5;
    cfg["widths"] = {2, 40, 2};
    cfg["dist"] = {{"family", "cauchy"}};
    cfg["grid"] = {{"delta", 0.1}};
    return cfg;
}

}  // namespace

TEST_CASE("validate prints derived quantities and exits zero") {
    json cfg;
    cfg["command"] = "basins";
    cfg["output_dir"] = (g_tmp / "unused").string();
    cfg["widths"] = {2, 100, 2};
    cfg["grid"] = {{"delta", 0.05}};
    const fs::path p = write_config("validate_ok.json", cfg);
    const Proc r = run_proc("validate '" + p.string() + "'");
    CHECK(r.code == 0);
    const json out = json::parse(r.out);
    CHECK(out.at("grid_points") == 1681);
    CHECK(out.at("per_layer_scales") == json({0.5, 0.01}));
    CHECK_FALSE(fs::exists(g_tmp / "unused"));
}

TEST_CASE("beta ladders expand with an inclusive endpoint") {
    json cfg;
    cfg["command"] = "beta-sweep";
    cfg["output_dir"] = (g_tmp / "unused2").string();
    cfg["width_N"] = 50;
    cfg["betas"] = {{"from", 0.1}, {"to", 0.3}, {"step", 0.05}};
    const fs::path p = write_config("validate_betas.json", cfg);
    const Proc r = run_proc("validate '" + p.string() + "'");
    CHECK(r.code == 0);
    const json out = json::parse(r.out);
    CHECK(out.at("n_betas") == 5);
    CHECK(out.at("beta_last") == doctest::Approx(0.3));
}

TEST_CASE("a bad grid aborts with exit 3 before any side effect") {
    const fs::path outdir = g_tmp / "never_created";
    json cfg = small_basins_config(outdir);
    cfg["grid"] = {{"delta", 0.0}};
    const fs::path p = write_config("bad_grid.json", cfg);
    const Proc r = run_proc("run '" + p.string() + "'");
    CHECK(r.code == 3);
    const json err = json::parse(r.err);
    CHECK(err.at("error").at("type") == "validation");
    CHECK(std::string(err.at("error").at("message")).find("GridSpec") != std::string::npos);
    CHECK_FALSE(fs::exists(outdir));
}

TEST_CASE("malformed json and missing files are parse errors") {
    const fs::path p = g_tmp / "broken.json";
    fplab::write_file(p.string(), "{ this is not json");
    const Proc r = run_proc("run '" + p.string() + "'");
    CHECK(r.code == 2);
    CHECK(json::parse(r.err).at("error").at("type") == "parse");

    const Proc missing = run_proc("run '" + (g_tmp / "no_such_file.json").string() + "'");
    CHECK(missing.code == 2);
}

TEST_CASE("non-autoencoder widths are a validation error") {
    json cfg = small_basins_config(g_tmp / "never2");
    cfg["widths"] = {2, 100, 3};
    const fs::path p = write_config("bad_widths.json", cfg);
    const Proc r = run_proc("run '" + p.string() + "'");
    CHECK(r.code == 3);
    CHECK(r.err.find("autoencoder") != std::string::npos);
    CHECK_FALSE(fs::exists(g_tmp / "never2"));
}

TEST_CASE("unknown commands and missing keys are parse errors") {
    json cfg;
    cfg["command"] = "frobnicate";
    cfg["output_dir"] = (g_tmp / "never3").string();
    const Proc r = run_proc("run '" + write_config("bad_cmd.json", cfg).string() + "'");
    CHECK(r.code == 2);
    CHECK(r.err.find("unknown command") != std::string::npos);

    json nokey;
    nokey["command"] = "basins";
    nokey["output_dir"] = (g_tmp / "never4").string();
    const Proc r2 = run_proc("run '" + write_config("no_widths.json", nokey).string() + "'");
    CHECK(r2.code == 2);
    CHECK(r2.err.find("missing required key: widths") != std::string::npos);
}

TEST_CASE("variance check writes a summary near the independent-sum value") {
    const fs::path outdir = g_tmp / "var_out";
    json cfg;
    cfg["command"] = "variance-check";
    cfg["output_dir"] = outdir.string();
    cfg["master_seed"] = 1;
    cfg["width_N"] = 100;
    cfg["sigma"] = 0.1;
    cfg["n_seeds"] = 2000;
    const Proc r = run_proc("run '" + write_config("var.json", cfg).string() + "'");
    REQUIRE(r.code == 0);
    const json sum = json::parse(fplab::read_file((outdir / "summary.json").string()));
    CHECK(std::fabs(double(sum.at("variance")) - 1.01) < 0.05);
    CHECK(double(sum.at("expected")) == (100 + 1.0) * 0.1 * 0.1);

    const json man = json::parse(fplab::read_file((outdir / "manifest.json").string()));
    CHECK(man.at("command") == "variance-check");
    CHECK(man.at("artifacts") == json({"summary.json"}));
    CHECK(man.at("config").at("sigma") == 0.1);
    CHECK(man.at("tool_version") == "0.1.0");
}

TEST_CASE("the shipped heavy-tailed example finds exactly two basins") {
    json cfg = json::parse(fplab::read_file((g_configs / "basins_cauchy_pair.json").string()));
    const fs::path outdir = g_tmp / "pair_out";
    cfg["output_dir"] = outdir.string();
    const Proc r = run_proc("run '" + write_config("pair.json", cfg).string() + "'");
    REQUIRE(r.code == 0);
    const json fps = json::parse(fplab::read_file((outdir / "fixed_points.json").string()));
    CHECK(fps.at("q") == 2);
    CHECK(fps.at("unresolved_fraction") == 0.0);
    const std::string pgm = fplab::read_file((outdir / "basins.pgm").string());
    CHECK(pgm.rfind("P2\n41 41\n2\n", 0) == 0);
    const std::string csv = fplab::read_file((outdir / "basins.csv").string());
    CHECK(csv.rfind("j,l,x,y,label,steps,status\n", 0) == 0);
}

TEST_CASE("artifacts are byte-identical across reruns and worker counts") {
    const fs::path a = g_tmp / "det_a", b = g_tmp / "det_b", c = g_tmp / "det_c";
    json cfg = small_basins_config(a);
    const fs::path pa = write_config("det_a.json", cfg);
    cfg["output_dir"] = b.string();
    const fs::path pb = write_config("det_b.json", cfg);
    cfg["output_dir"] = c.string();
    const fs::path pc = write_config("det_c.json", cfg);

    REQUIRE(run_proc("run '" + pa.string() + "' --jobs 1").code == 0);
    REQUIRE(run_proc("run '" + pb.string() + "' --jobs 8").code == 0);
    REQUIRE(run_proc("run '" + pc.string() + "' --jobs 1").code == 0);
    for (const char* name : {"basins.csv", "basins.pgm", "fixed_points.json"}) {
        const std::string fa = fplab::read_file((a / name).string());
        CHECK(fa == fplab::read_file((b / name).string()));
        CHECK(fa == fplab::read_file((c / name).string()));
    }
    const json ma = json::parse(fplab::read_file((a / "manifest.json").string()));
    const json mb = json::parse(fplab::read_file((b / "manifest.json").string()));
    CHECK(ma.at("jobs") == 1);
    CHECK(mb.at("jobs") == 8);
    CHECK(ma.at("artifacts") == mb.at("artifacts"));
}

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: test_cli [doctest args] <cli_path> <configs_dir>\n");
        return 1;
    }
    g_cli = argv[argc - 2];
    g_configs = argv[argc - 1];
    g_tmp = fs::temp_directory_path() / ("fplab_cli_test_" + std::to_string(getpid()));
    fs::create_directories(g_tmp);

    doctest::Context ctx;
    ctx.applyCommandLine(argc - 2, argv);
    const int rc = ctx.run();

    std::error_code ec;
    fs::remove_all(g_tmp, ec);
    return rc;
}
