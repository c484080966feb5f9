#include "fplab/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fplab/errors.hpp"
#include "fplab/io.hpp"
#include "fplab/parallel.hpp"

namespace fplab {

std::size_t FixedPointReport::unresolved_count() const {
    std::size_t n = 0;
    for (const auto& r : results)
        if (r.status == IterStatus::Unresolved) ++n;
    return n;
}

double FixedPointReport::unresolved_fraction() const {
    return results.empty() ? 0.0 : static_cast<double>(unresolved_count()) / results.size();
}

static void require_autoencoder_2d(const Network& net) {
    check_network(net);
    if (!net.autoencoder_shaped())
        throw ShapeError("fixed-point iteration needs n_0 = n_L", net.n_in(), net.n_out());
    if (net.n_in() != 2) throw ShapeError("grid iteration input width", 2, net.n_in());
}

// Active-set batch iteration. Every trajectory advances through the same row
// kernel in grid order, so results match single-start calls bitwise and are
// independent of batch composition.
static void iterate_block(const Network& net, const std::vector<Point>& starts,
                          std::size_t begin, std::size_t end, const IterationPolicy& policy,
                          std::vector<IterationResult>* out) {
    const std::size_t nb = end - begin;
    std::vector<std::size_t> active(nb);
    std::iota(active.begin(), active.end(), begin);
    std::vector<double> X(2 * nb);
    for (std::size_t i = 0; i < nb; ++i) {
        X[2 * i] = starts[begin + i].x;
        X[2 * i + 1] = starts[begin + i].y;
        auto& r = (*out)[begin + i];
        r.start = starts[begin + i];
        r.status = IterStatus::Unresolved;
        r.steps = policy.max_iters;
    }
    const double eps2 = policy.epsilon * policy.epsilon;
    for (std::size_t m = 1; m <= policy.max_iters && !active.empty(); ++m) {
        std::vector<double> Y = forward_batch(net, X, active.size());
        std::size_t kept = 0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const double nx = Y[2 * i], ny = Y[2 * i + 1];
            const double dx = nx - X[2 * i], dy = ny - X[2 * i + 1];
            auto& r = (*out)[active[i]];
            if (!std::isfinite(nx) || !std::isfinite(ny)) {
                r.steps = m;  // frozen as Unresolved
            } else if (dx * dx + dy * dy < eps2) {
                r.status = IterStatus::Converged;
                r.limit = {nx, ny};
                r.steps = m;
            } else {
                active[kept] = active[i];
                X[2 * kept] = nx;
                X[2 * kept + 1] = ny;
                ++kept;
            }
        }
        active.resize(kept);
        X.resize(2 * kept);
    }
}

IterationResult iterate(const Network& net, Point x1, const IterationPolicy& policy) {
    require_autoencoder_2d(net);
    std::vector<Point> starts{x1};
    std::vector<IterationResult> out(1);
    iterate_block(net, starts, 0, 1, policy, &out);
    return out[0];
}

std::vector<IterationResult> iterate_many(const Network& net, const std::vector<Point>& starts,
                                          const IterationPolicy& policy, std::size_t jobs) {
    require_autoencoder_2d(net);
    std::vector<IterationResult> out(starts.size());
    parallel_chunks(starts.size(), jobs,
                    [&](std::size_t b, std::size_t e, std::size_t) {
                        iterate_block(net, starts, b, e, policy, &out);
                    });
    return out;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

double dist2(Point a, Point b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

}  // namespace

FixedPointReport find_fixed_points(const Network& net, const GridSpec& spec,
                                   const IterationPolicy& policy, double cluster_radius,
                                   std::size_t jobs) {
    if (!(cluster_radius > 0.0))
        throw std::invalid_argument("cluster_radius must be > 0");
    const std::vector<Point> pts = make_grid(spec);
    FixedPointReport rep;
    rep.grid = spec;
    rep.results = iterate_many(net, pts, policy, jobs);
    rep.basin_label.assign(pts.size(), -1);

    std::vector<std::size_t> conv;  // grid indices, ascending
    for (std::size_t k = 0; k < rep.results.size(); ++k)
        if (rep.results[k].status == IterStatus::Converged) conv.push_back(k);
    if (conv.empty()) return rep;

    // Single-linkage at cluster_radius over converged limits. O(n^2) pair scan
    // is deterministic and cheap at grid scale; a second merge pass enforces
    // centroid separation > cluster_radius even for chained clusters.
    const double r2 = cluster_radius * cluster_radius;
    UnionFind uf(conv.size());
    for (std::size_t i = 0; i < conv.size(); ++i)
        for (std::size_t j = i + 1; j < conv.size(); ++j)
            if (dist2(rep.results[conv[i]].limit, rep.results[conv[j]].limit) < r2)
                uf.unite(i, j);

    std::vector<int> cluster_of(conv.size(), -1);
    std::vector<std::vector<std::size_t>> members;  // positions into conv
    for (std::size_t i = 0; i < conv.size(); ++i) {
        const std::size_t root = uf.find(i);
        if (cluster_of[root] < 0) {
            cluster_of[root] = static_cast<int>(members.size());
            members.emplace_back();
        }
        cluster_of[i] = cluster_of[root];
        members[cluster_of[i]].push_back(i);
    }

    auto centroid = [&](const std::vector<std::size_t>& mem) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t i : mem) {
            sx += rep.results[conv[i]].limit.x;
            sy += rep.results[conv[i]].limit.y;
        }
        const double n = static_cast<double>(mem.size());
        return Point{sx / n, sy / n};
    };

    std::vector<Point> cents(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) cents[c] = centroid(members[c]);

    // defensive merge of centroids that still violate the separation invariant
    bool merged = true;
    while (merged && members.size() > 1) {
        merged = false;
        for (std::size_t a = 0; a < members.size() && !merged; ++a)
            for (std::size_t b = a + 1; b < members.size() && !merged; ++b)
                if (dist2(cents[a], cents[b]) <= r2) {
                    members[a].insert(members[a].end(), members[b].begin(), members[b].end());
                    std::sort(members[a].begin(), members[a].end());
                    members.erase(members.begin() + static_cast<std::ptrdiff_t>(b));
                    cents[a] = centroid(members[a]);
                    cents.erase(cents.begin() + static_cast<std::ptrdiff_t>(b));
                    merged = true;
                }
    }

    for (std::size_t c = 0; c < members.size(); ++c)
        for (std::size_t i : members[c]) rep.basin_label[conv[i]] = static_cast<int>(c);

    const std::size_t nx = spec.points_per_axis();
    for (std::size_t c = 0; c < members.size(); ++c) {
        FixedPoint fp;
        fp.p = cents[c];
        fp.support = members[c].size();
        std::vector<double> img = forward(net, {fp.p.x, fp.p.y});
        fp.residual = std::sqrt(dist2({img[0], img[1]}, fp.p));
        fp.out_of_domain = std::fabs(fp.p.x) > 1.0 || std::fabs(fp.p.y) > 1.0;
        if (fp.support == 1) {
            // a lone exactly-on-grid repeller self-reports as converged;
            // suspect it when no grid neighbor joins the cluster
            const std::size_t k = conv[members[c][0]];
            const std::size_t j = k % nx, l = k / nx;
            bool neighbor_joins = false;
            const long offs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (const auto& o : offs) {
                const long jj = static_cast<long>(j) + o[0], ll = static_cast<long>(l) + o[1];
                if (jj < 0 || ll < 0 || jj >= static_cast<long>(nx) || ll >= static_cast<long>(nx))
                    continue;
                const std::size_t kk = static_cast<std::size_t>(ll) * nx +
                                       static_cast<std::size_t>(jj);
                if (rep.basin_label[kk] == static_cast<int>(c)) neighbor_joins = true;
            }
            fp.unstable_suspect = !neighbor_joins;
        }
        rep.fixed_points.push_back(fp);
    }
    return rep;
}

std::string basins_to_csv(const FixedPointReport& rep) {
    const std::size_t nx = rep.grid.points_per_axis();
    std::string out = "j,l,x,y,label,steps,status\n";
    for (std::size_t k = 0; k < rep.results.size(); ++k) {
        const auto& r = rep.results[k];
        out += csv_row({std::to_string(k % nx), std::to_string(k / nx), fmt_double(r.start.x),
                        fmt_double(r.start.y), std::to_string(rep.basin_label[k]),
                        std::to_string(r.steps),
                        r.status == IterStatus::Converged ? "converged" : "unresolved"});
    }
    return out;
}

std::string basins_to_pgm(const FixedPointReport& rep) {
    const std::size_t nx = rep.grid.points_per_axis();
    const std::size_t maxval = std::max<std::size_t>(rep.fixed_points.size(), 1);
    std::string out = "P2\n" + std::to_string(nx) + " " + std::to_string(nx) + "\n" +
                      std::to_string(maxval) + "\n";
    for (std::size_t l = nx; l-- > 0;) {
        for (std::size_t j = 0; j < nx; ++j) {
            if (j) out += ' ';
            out += std::to_string(rep.basin_label[l * nx + j] + 1);
        }
        out += '\n';
    }
    return out;
}

std::string fixed_points_to_json(const FixedPointReport& rep) {
    nlohmann::ordered_json j;
    j["q"] = rep.q();
    j["unresolved_fraction"] = rep.unresolved_fraction();
    auto& fps = j["fixed_points"] = nlohmann::ordered_json::array();
    for (const auto& fp : rep.fixed_points) {
        nlohmann::ordered_json jf;
        jf["x"] = fp.p.x;
        jf["y"] = fp.p.y;
        jf["residual"] = fp.residual;
        jf["support"] = fp.support;
        jf["out_of_domain"] = fp.out_of_domain;
        jf["unstable_suspect"] = fp.unstable_suspect;
        fps.push_back(std::move(jf));
    }
    return j.dump(2);
}

}  // namespace fplab
