#include "fplab/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "fplab/errors.hpp"
#include "fplab/io.hpp"

namespace fplab {

std::size_t TrainingSet::total_points() const {
    std::size_t n = 0;
    for (const auto& c : classes) n += c.points.size();
    return n;
}

TrainingSet make_discs(std::size_t K, double radius, const GridSpec& grid,
                       std::size_t points_per_class, const Seed& seed, bool fixed_ring) {
    (void)grid;  // discs live in the same Omega the grid spans
    if (K < 1) throw std::invalid_argument("make_discs: K must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("make_discs: radius must be > 0");
    // disjoint discs need separation > 2r; 0.5 is the floor used for the
    // default radius so basins have room to grow around each class
    const double min_sep = std::max(0.5, 2.0 * radius + 1e-9);
    const double lo = -1.0 + radius, hi = 1.0 - radius;
    if (lo > hi) throw PackingError("disc radius too large for Omega");

    std::vector<Point> centers;
    if (fixed_ring) {
        // evenly spaced on a ring, first center straight up
        const double ring_r = 0.6;
        const double pi = 3.14159265358979323846;
        for (std::size_t k = 0; k < K; ++k) {
            const double a = pi / 2.0 + 2.0 * pi * static_cast<double>(k) / static_cast<double>(K);
            centers.push_back({ring_r * std::cos(a), ring_r * std::sin(a)});
        }
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = a + 1; b < K; ++b) {
                const double dx = centers[a].x - centers[b].x, dy = centers[a].y - centers[b].y;
                if (std::sqrt(dx * dx + dy * dy) <= 2.0 * radius)
                    throw PackingError("ring layout cannot fit this K and radius");
            }
    } else {
        Seed cs{seed.value, seed.stream_id + 1000};
        std::uint64_t draw = 0;
        const std::size_t max_attempts = 100000;
        std::size_t attempts = 0;
        while (centers.size() < K) {
            if (++attempts > max_attempts)
                throw PackingError("could not place " + std::to_string(K) +
                                   " discs of radius " + std::to_string(radius) +
                                   " with separation " + std::to_string(min_sep));
            Point c{lo + (hi - lo) * uniform01(cs, draw), lo + (hi - lo) * uniform01(cs, draw + 1)};
            draw += 2;
            bool ok = true;
            for (const Point& p : centers) {
                const double dx = c.x - p.x, dy = c.y - p.y;
                if (std::sqrt(dx * dx + dy * dy) < min_sep) ok = false;
            }
            if (ok) centers.push_back(c);
        }
    }

    TrainingSet ts;
    for (std::size_t k = 0; k < K; ++k) {
        TrainingClass cls;
        cls.center = centers[k];
        cls.radius = radius;
        cls.points.push_back(centers[k]);  // the center is always a training point
        Seed ps{seed.value, seed.stream_id + 2000 + k};
        std::uint64_t draw = 0;
        while (cls.points.size() < points_per_class) {
            const double ux = radius * (2.0 * uniform01(ps, draw) - 1.0);
            const double uy = radius * (2.0 * uniform01(ps, draw + 1) - 1.0);
            draw += 2;
            if (ux * ux + uy * uy <= radius * radius)
                cls.points.push_back({centers[k].x + ux, centers[k].y + uy});
        }
        ts.classes.push_back(std::move(cls));
    }
    return ts;
}

static void require_2d_autoencoder(const Network& net) {
    check_network(net);
    if (!net.autoencoder_shaped() || net.n_in() != 2)
        throw ShapeError("training needs a 2-D autoencoder", 2, net.n_out());
}

double loss(const Network& net, const TrainingSet& ts) {
    require_2d_autoencoder(net);
    double total = 0.0;
    for (const auto& cls : ts.classes)
        for (const Point& p : cls.points) {
            const std::vector<double> out = forward(net, {p.x, p.y});
            const double dx = out[0] - cls.center.x, dy = out[1] - cls.center.y;
            total += dx * dx + dy * dy;
        }
    return total;
}

namespace {

ParamGrad zero_grad(const Network& net) {
    ParamGrad g;
    for (const auto& l : net.layers) {
        g.dW.emplace_back(l.n_out(), l.n_in());
        g.db.emplace_back(l.n_out(), 0.0);
    }
    return g;
}

// Accumulates the gradient of ||Phi(x) - target||^2 into g.
void backprop_point(const Network& net, Point x, Point target, ParamGrad* g) {
    const std::size_t L = net.layers.size();
    std::vector<std::vector<double>> acts(L + 1), preacts(L);
    acts[0] = {x.x, x.y};
    for (std::size_t l = 0; l < L; ++l) {
        const Layer& layer = net.layers[l];
        preacts[l].resize(layer.n_out());
        acts[l + 1].resize(layer.n_out());
        for (std::size_t o = 0; o < layer.n_out(); ++o) {
            const double* w = layer.weights.row(o);
            double acc = 0.0;
            for (std::size_t k = 0; k < layer.n_in(); ++k) acc += w[k] * acts[l][k];
            preacts[l][o] = acc + layer.bias[o];
            acts[l + 1][o] = apply_activation(layer.activation, preacts[l][o]);
        }
    }
    std::vector<double> delta(2);
    delta[0] = 2.0 * (acts[L][0] - target.x);
    delta[1] = 2.0 * (acts[L][1] - target.y);
    for (std::size_t l = L; l-- > 0;) {
        const Layer& layer = net.layers[l];
        for (std::size_t o = 0; o < layer.n_out(); ++o)
            delta[o] *= activation_derivative(layer.activation, preacts[l][o]);
        for (std::size_t o = 0; o < layer.n_out(); ++o) {
            g->db[l][o] += delta[o];
            double* gw = &g->dW[l](o, 0);
            for (std::size_t k = 0; k < layer.n_in(); ++k) gw[k] += delta[o] * acts[l][k];
        }
        if (l > 0) {
            std::vector<double> prev(layer.n_in(), 0.0);
            for (std::size_t k = 0; k < layer.n_in(); ++k) {
                double acc = 0.0;
                for (std::size_t o = 0; o < layer.n_out(); ++o)
                    acc += net.layers[l].weights(o, k) * delta[o];
                prev[k] = acc;
            }
            delta.swap(prev);
        }
    }
}

}  // namespace

ParamGrad gradient(const Network& net, const TrainingSet& ts) {
    require_2d_autoencoder(net);
    ParamGrad g = zero_grad(net);
    for (const auto& cls : ts.classes)
        for (const Point& p : cls.points) backprop_point(net, p, cls.center, &g);
    return g;
}

TrainTrace train(const TrainConfig& cfg, const TrainingSet& ts) {
    if (!(cfg.optimizer.learning_rate > 0.0) && cfg.optimizer.learning_rate != 0.0)
        throw std::invalid_argument("train: learning_rate must be >= 0");
    if (cfg.optimizer.max_epochs < 1)
        throw std::invalid_argument("train: max_epochs must be >= 1");
    Network net = init_network(cfg.widths, cfg.activation, cfg.init, cfg.seed);

    struct Sample {
        Point x, target;
    };
    std::vector<Sample> samples;
    for (const auto& cls : ts.classes)
        for (const Point& p : cls.points) samples.push_back({p, cls.center});
    if (samples.empty()) throw std::invalid_argument("train: empty training set");

    TrainTrace trace;
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t bs = std::max<std::size_t>(cfg.optimizer.batch_size, 1);

    for (std::size_t epoch = 0; epoch < cfg.optimizer.max_epochs; ++epoch) {
        // deterministic Fisher-Yates from the epoch's own stream
        Seed shuffle_seed{cfg.seed.value, cfg.seed.stream_id + 3000 + epoch};
        for (std::size_t i = order.size(); i-- > 1;) {
            const std::size_t j =
                static_cast<std::size_t>(uniform01(shuffle_seed, i) * static_cast<double>(i + 1));
            std::swap(order[i], order[std::min(j, i)]);
        }
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t end = std::min(start + bs, order.size());
            ParamGrad g = zero_grad(net);
            for (std::size_t i = start; i < end; ++i)
                backprop_point(net, samples[order[i]].x, samples[order[i]].target, &g);
            const double step = cfg.optimizer.learning_rate / static_cast<double>(end - start);
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                Layer& layer = net.layers[l];
                for (std::size_t i = 0; i < layer.weights.a.size(); ++i)
                    layer.weights.a[i] -= step * g.dW[l].a[i];
                for (std::size_t o = 0; o < layer.bias.size(); ++o)
                    layer.bias[o] -= step * g.db[l][o];
            }
        }
        const double epoch_loss = loss(net, ts);
        trace.loss_history.push_back(epoch_loss);
        if (epoch_loss > 1e6)
            throw DivergenceError("training diverged at epoch " + std::to_string(epoch),
                                  trace.loss_history);
        if (epoch_loss <= cfg.optimizer.target_loss) break;
    }
    trace.final_network = std::move(net);
    return trace;
}

VerificationReport verify_trained(const Network& net, const TrainingSet& ts,
                                  const GridSpec& grid, const IterationPolicy& policy,
                                  double cluster_radius, std::size_t jobs) {
    VerificationReport rep;
    rep.fp_report = find_fixed_points(net, grid, policy, cluster_radius, jobs);

    rep.fp_class.assign(rep.fp_report.q(), -1);
    for (std::size_t f = 0; f < rep.fp_report.q(); ++f) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < ts.classes.size(); ++k) {
            const Point c = ts.classes[k].center, p = rep.fp_report.fixed_points[f].p;
            const double d = std::hypot(p.x - c.x, p.y - c.y);
            if (d < best) {
                best = d;
                rep.fp_class[f] = static_cast<int>(k);
            }
        }
    }

    rep.per_class.assign(ts.classes.size(), {});
    rep.all_points_own_basin = true;
    for (std::size_t k = 0; k < ts.classes.size(); ++k) {
        auto& cv = rep.per_class[k];
        cv.center_distance = std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < rep.fp_report.q(); ++f) {
            if (rep.fp_class[f] != static_cast<int>(k)) continue;
            const Point c = ts.classes[k].center, p = rep.fp_report.fixed_points[f].p;
            cv.center_distance = std::min(cv.center_distance, std::hypot(p.x - c.x, p.y - c.y));
        }
        std::size_t own = 0;
        std::vector<IterationResult> its =
            iterate_many(net, ts.classes[k].points, policy, jobs);
        for (const auto& it : its) {
            if (it.status != IterStatus::Converged) {
                rep.all_points_own_basin = false;
                continue;
            }
            // nearest reported fixed point claims the limit
            int nearest = -1;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t f = 0; f < rep.fp_report.q(); ++f) {
                const Point p = rep.fp_report.fixed_points[f].p;
                const double d = std::hypot(it.limit.x - p.x, it.limit.y - p.y);
                if (d < best) {
                    best = d;
                    nearest = static_cast<int>(f);
                }
            }
            if (nearest >= 0 && rep.fp_class[nearest] == static_cast<int>(k))
                ++own;
            else
                rep.all_points_own_basin = false;
        }
        cv.own_basin_fraction =
            ts.classes[k].points.empty()
                ? 0.0
                : static_cast<double>(own) / static_cast<double>(ts.classes[k].points.size());
    }
    return rep;
}

std::string training_set_to_json(const TrainingSet& ts) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& cls : ts.classes) {
        nlohmann::ordered_json jc;
        jc["center"] = {cls.center.x, cls.center.y};
        jc["radius"] = cls.radius;
        auto& pts = jc["points"] = nlohmann::ordered_json::array();
        for (const Point& p : cls.points) pts.push_back({p.x, p.y});
        j.push_back(std::move(jc));
    }
    return j.dump(2);
}

std::string loss_history_to_csv(const TrainTrace& trace) {
    std::string out = "epoch,loss\n";
    for (std::size_t e = 0; e < trace.loss_history.size(); ++e)
        out += csv_row({std::to_string(e), fmt_double(trace.loss_history[e])});
    return out;
}

std::string verification_to_json(const VerificationReport& rep) {
    nlohmann::ordered_json j;
    j["q"] = rep.fp_report.q();
    j["all_points_own_basin"] = rep.all_points_own_basin;
    auto& classes = j["classes"] = nlohmann::ordered_json::array();
    for (const auto& cv : rep.per_class) {
        nlohmann::ordered_json jc;
        jc["center_distance"] = std::isfinite(cv.center_distance) ? cv.center_distance : -1.0;
        jc["own_basin_fraction"] = cv.own_basin_fraction;
        classes.push_back(std::move(jc));
    }
    auto& fps = j["fixed_points"] = nlohmann::ordered_json::array();
    for (std::size_t f = 0; f < rep.fp_report.q(); ++f) {
        nlohmann::ordered_json jf;
        jf["x"] = rep.fp_report.fixed_points[f].p.x;
        jf["y"] = rep.fp_report.fixed_points[f].p.y;
        jf["residual"] = rep.fp_report.fixed_points[f].residual;
        jf["class"] = rep.fp_class[f];
        fps.push_back(std::move(jf));
    }
    return j.dump(2);
}

}  // namespace fplab
