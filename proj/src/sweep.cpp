#include "fplab/sweep.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "fplab/io.hpp"

namespace fplab {

std::size_t mode_of(const std::map<std::size_t, std::size_t>& histogram) {
    // map iteration is ascending in Q, so strict > keeps the smaller Q on ties
    std::size_t mode = 0, best_count = 0;
    for (const auto& [q, count] : histogram)
        if (count > best_count) {
            best_count = count;
            mode = q;
        }
    return mode;
}

SweepReport run_sweep(const SweepConfig& cfg, std::size_t jobs) {
    if (cfg.n_seeds < 1) throw std::invalid_argument("run_sweep: n_seeds must be >= 1");
    if (cfg.depths.empty()) throw std::invalid_argument("run_sweep: depths must be nonempty");
    SweepReport rep;
    rep.config = cfg;
    const std::size_t n_starts = cfg.grid.total_points();
    for (std::size_t L : cfg.depths) {
        if (L < 1) throw std::invalid_argument("run_sweep: depth must be >= 1");
        std::vector<std::size_t> widths;
        widths.push_back(2);
        for (std::size_t i = 0; i + 1 < L; ++i) widths.push_back(cfg.width_N0);
        widths.push_back(2);

        DepthSummary sum;
        sum.L = L;
        std::vector<std::vector<FixedPoint>> depth_fps;
        std::size_t unresolved = 0, total_q = 0;
        for (std::size_t si = 0; si < cfg.n_seeds; ++si) {
            const Seed sd = derive_seed(cfg.master_seed, L, si);
            Network net = init_network(widths, cfg.activation, cfg.family, sd);
            FixedPointReport fp =
                find_fixed_points(net, cfg.grid, cfg.policy, cfg.cluster_radius, jobs);
            sum.histogram[fp.q()] += 1;
            total_q += fp.q();
            unresolved += fp.unresolved_count();
            depth_fps.push_back(fp.fixed_points);
        }
        sum.mean_q = static_cast<double>(total_q) / static_cast<double>(cfg.n_seeds);
        sum.unresolved_fraction =
            static_cast<double>(unresolved) / static_cast<double>(n_starts * cfg.n_seeds);
        sum.mode_q = mode_of(sum.histogram);
        rep.per_depth.push_back(std::move(sum));
        rep.fixed_points.push_back(std::move(depth_fps));
    }
    return rep;
}

static std::string histogram_json(const std::map<std::size_t, std::size_t>& hist) {
    nlohmann::ordered_json j;
    for (const auto& [q, count] : hist) j[std::to_string(q)] = count;
    return j.dump();
}

std::string summarize(const SweepReport& report) {
    std::string out = "L,mode_q,mean_q,histogram,unresolved_fraction\n";
    for (const auto& d : report.per_depth)
        out += csv_row({std::to_string(d.L), std::to_string(d.mode_q), fmt_double(d.mean_q),
                        histogram_json(d.histogram), fmt_double(d.unresolved_fraction)});
    return out;
}

std::string sweep_fixed_points_json(const SweepReport& report) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (std::size_t di = 0; di < report.per_depth.size(); ++di) {
        nlohmann::ordered_json jd;
        jd["L"] = report.per_depth[di].L;
        auto& seeds = jd["seeds"] = nlohmann::ordered_json::array();
        for (const auto& fps : report.fixed_points[di]) {
            nlohmann::ordered_json js = nlohmann::ordered_json::array();
            for (const auto& fp : fps) {
                nlohmann::ordered_json jf;
                jf["x"] = fp.p.x;
                jf["y"] = fp.p.y;
                jf["residual"] = fp.residual;
                js.push_back(std::move(jf));
            }
            seeds.push_back(std::move(js));
        }
        j.push_back(std::move(jd));
    }
    return j.dump(2);
}

}  // namespace fplab
