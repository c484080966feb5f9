#include "fplab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace fplab {

std::size_t GridSpec::points_per_axis() const {
    if (!(delta > 0.0)) throw std::invalid_argument("grid delta must be > 0");
    if (delta > 2.0) throw std::invalid_argument("grid delta must be <= 2");
    return static_cast<std::size_t>(std::floor(2.0 / delta + 1e-9)) + 1;
}

std::vector<Point> make_grid(const GridSpec& spec) {
    const std::size_t n = spec.points_per_axis();
    std::vector<Point> pts;
    pts.reserve(n * n);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t j = 0; j < n; ++j)
            pts.push_back({-1.0 + spec.delta * static_cast<double>(j),
                           -1.0 + spec.delta * static_cast<double>(l)});
    return pts;
}

}  // namespace fplab
