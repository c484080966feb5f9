#include "fplab/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fplab/errors.hpp"
#include "fplab/parallel.hpp"

namespace fplab {

namespace {

// Grid points zero-padded to the net input width, forwarded in one batch.
std::vector<double> grid_images(const Network& net, const std::vector<Point>& pts) {
    const std::size_t ni = net.n_in();
    std::vector<double> X(pts.size() * ni, 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        X[i * ni] = pts[i].x;
        X[i * ni + 1] = pts[i].y;
    }
    return forward_batch(net, X, pts.size());
}

double pair_ratio2(const double* yi, const double* yj, std::size_t no, double din2) {
    double dout2 = 0.0;
    for (std::size_t k = 0; k < no; ++k) {
        const double d = yi[k] - yj[k];
        dout2 += d * d;
    }
    return dout2 / din2;
}

}  // namespace

double contraction_constant(const Network& net, const GridSpec& spec, const PairBudget& budget,
                            std::size_t jobs) {
    check_network(net);
    if (net.n_in() < 2) throw ShapeError("contraction input width", 2, net.n_in());
    const std::vector<Point> pts = make_grid(spec);
    const std::size_t n = pts.size();
    if (n < 2) throw std::invalid_argument("contraction grid needs at least 2 points");
    const std::size_t no = net.n_out();
    const std::vector<double> Y = grid_images(net, pts);

    auto ratio2_of = [&](std::size_t i, std::size_t j) {
        const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
        return pair_ratio2(Y.data() + i * no, Y.data() + j * no, no, dx * dx + dy * dy);
    };

    if (budget.all) {
        // max over all i < j; per-chunk maxima folded sequentially. The chunk
        // count must match the partition parallel_chunks will use.
        const std::size_t chunks = std::min(std::max<std::size_t>(jobs, 1), n);
        std::vector<double> best(chunks, 0.0);
        parallel_chunks(n, chunks, [&](std::size_t b, std::size_t e, std::size_t c) {
            double m = 0.0;
            for (std::size_t i = b; i < e; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    m = std::max(m, ratio2_of(i, j));
            best[c] = m;
        });
        double m = 0.0;
        for (std::size_t c = 0; c < chunks; ++c) m = std::max(m, best[c]);
        return std::sqrt(m);
    }

    // seeded uniform pair subsample plus all nearest-neighbor pairs
    double m = 0.0;
    const std::size_t nx = spec.points_per_axis();
    for (std::size_t l = 0; l < nx; ++l)
        for (std::size_t j = 0; j < nx; ++j) {
            const std::size_t k = l * nx + j;
            if (j + 1 < nx) m = std::max(m, ratio2_of(k, k + 1));
            if (l + 1 < nx) m = std::max(m, ratio2_of(k, k + nx));
        }
    Seed s{budget.seed, 0};
    for (std::size_t t = 0; t < budget.count; ++t) {
        const std::size_t i = static_cast<std::size_t>(uniform01(s, 2 * t) * n);
        std::size_t j = static_cast<std::size_t>(uniform01(s, 2 * t + 1) * n);
        if (i == j) j = (j + 1) % n;
        m = std::max(m, ratio2_of(std::min(i, j), std::max(i, j)));
    }
    return std::sqrt(m);
}

ContractionCurve beta_sweep(const std::vector<std::size_t>& widths, ActivationKind activation,
                            const std::vector<double>& betas, const std::vector<Seed>& seeds,
                            const GridSpec& spec, std::size_t jobs) {
    if (betas.size() < 2) throw std::invalid_argument("beta_sweep needs >= 2 beta values");
    if (!std::is_sorted(betas.begin(), betas.end()))
        throw std::invalid_argument("beta_sweep betas must be ascending");
    ContractionCurve curve;
    std::vector<double> mean_g(betas.size(), 0.0);
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
        DistributionSpec dist;
        dist.family = Family::Gauss;
        dist.scale_rule = ScaleRule::PowerLaw;
        dist.beta = betas[bi];
        double sum = 0.0;
        for (const Seed& sd : seeds) {
            Network net = init_network(widths, activation, dist, sd);
            ContractionSample s;
            s.beta = betas[bi];
            s.width_N = widths[0];
            s.depth_L = widths.size() - 1;
            s.activation = activation;
            s.g = contraction_constant(net, spec, PairBudget::All(), jobs);
            s.seed = sd;
            curve.samples.push_back(s);
            sum += s.g;
        }
        mean_g[bi] = sum / static_cast<double>(seeds.size());
    }
    // first crossing of the seed-averaged curve through g = 1, scanning beta ascending
    for (std::size_t bi = 0; bi + 1 < betas.size(); ++bi) {
        const double g0 = mean_g[bi], g1 = mean_g[bi + 1];
        if ((g0 - 1.0) * (g1 - 1.0) <= 0.0 && g0 != g1) {
            curve.beta_cr = betas[bi] + (1.0 - g0) * (betas[bi + 1] - betas[bi]) / (g1 - g0);
            return curve;
        }
    }
    curve.diagnostic = "no crossing of g=1 on [" + std::to_string(betas.front()) + ", " +
                       std::to_string(betas.back()) + "]: mean g spans [" +
                       std::to_string(*std::min_element(mean_g.begin(), mean_g.end())) + ", " +
                       std::to_string(*std::max_element(mean_g.begin(), mean_g.end())) + "]";
    return curve;
}

DepthCurve depth_curve(std::size_t width_N, ActivationKind activation, double beta,
                       const std::vector<std::size_t>& depths, std::size_t n_seeds,
                       std::uint64_t master_seed, const GridSpec& spec, std::size_t jobs) {
    DepthCurve out;
    DistributionSpec dist;
    dist.family = Family::Gauss;
    dist.scale_rule = ScaleRule::PowerLaw;
    dist.beta = beta;
    std::vector<double> Ls, logs;
    for (std::size_t di = 0; di < depths.size(); ++di) {
        const std::size_t L = depths[di];
        if (L < 1) throw std::invalid_argument("depth_curve depths must be >= 1");
        const std::vector<std::size_t> widths(L + 1, width_N);
        double sum = 0.0;
        for (std::size_t si = 0; si < n_seeds; ++si) {
            const Seed sd = derive_seed(master_seed, di, si);
            Network net = init_network(widths, activation, dist, sd);
            ContractionSample s;
            s.beta = beta;
            s.width_N = width_N;
            s.depth_L = L;
            s.activation = activation;
            s.g = contraction_constant(net, spec, PairBudget::All(), jobs);
            s.seed = sd;
            out.samples.push_back(s);
            sum += s.g;
        }
        const double mean = sum / static_cast<double>(n_seeds);
        out.rows.push_back({L, mean});
        Ls.push_back(static_cast<double>(L));
        logs.push_back(std::log(mean));
    }
    const LineFit fit = fit_line(Ls, logs);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.r2 = fit.r2;
    return out;
}

LayerStats preactivation_variance(std::size_t width_N, double sigma, std::size_t n_seeds,
                                  std::uint64_t master_seed) {
    LayerStats st;
    st.width_N = width_N;
    st.sigma = sigma;
    if (sigma == 0.0) return st;
    const std::vector<double> x(width_N, 1.0);
    double sum = 0.0, sumsq = 0.0;
    const std::size_t count = n_seeds * width_N;
    constexpr std::uint64_t variance_tag = 101;
    for (std::size_t s = 0; s < n_seeds; ++s) {
        const Seed sd = derive_seed(master_seed, variance_tag, s);
        std::vector<double> W = sample_gauss(Seed{sd.value, 0}, width_N * width_N, sigma);
        std::vector<double> b = sample_gauss(Seed{sd.value, 1}, width_N, sigma);
        for (std::size_t o = 0; o < width_N; ++o) {
            double acc = 0.0;
            for (std::size_t k = 0; k < width_N; ++k) acc += W[o * width_N + k] * x[k];
            const double y = acc + b[o];
            sum += y;
            sumsq += y * y;
        }
    }
    const double mean = sum / static_cast<double>(count);
    st.preactivation_variance = sumsq / static_cast<double>(count) - mean * mean;
    return st;
}

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    LineFit f;
    const std::size_t n = xs.size();
    if (n < 2) {
        f.intercept = ys.empty() ? 0.0 : ys[0];
        f.r2 = 1.0;
        return f;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double nd = static_cast<double>(n);
    const double denom = nd * sxx - sx * sx;
    f.slope = (nd * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / nd;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / nd;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = f.slope * xs[i] + f.intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    f.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return f;
}

}  // namespace fplab
