// Discretized domains: intervals, rectangles, axisymmetric metric bands and
// two-arc circle covers. Charts are immutable after construction.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "semilin/errors.hpp"

namespace semilin {

enum class ChartKind { interval, rectangle, metric_band, circle_arc };

inline const char* chart_kind_name(ChartKind k) {
    switch (k) {
        case ChartKind::interval: return "interval";
        case ChartKind::rectangle: return "rectangle";
        case ChartKind::metric_band: return "metric_band";
        case ChartKind::circle_arc: return "circle_arc";
    }
    return "?";
}

// A uniform grid on a 1D or 2D coordinate chart. Full-grid nodes are stored
// row-major over (iy, ix) and include the boundary layer; `shape` counts
// interior nodes per axis. metric_weight holds sqrt(det g) per node (1 on
// flat charts), inv_metric holds (g^11, g^22, g^12).
struct Chart {
    ChartKind kind = ChartKind::interval;
    int dim = 1;
    std::array<int, 2> shape{0, 1};
    std::array<double, 2> spacing{0.0, 0.0};
    std::array<double, 2> origin{0.0, 0.0};  // coordinate of full-grid index 0 per axis

    std::vector<std::array<double, 2>> coords;
    std::vector<double> metric_weight;
    std::vector<std::array<double, 3>> inv_metric;
    std::vector<std::uint8_t> boundary_mask;
    std::vector<int> boundary_nodes;  // full indices, ascending

    int nx_full() const { return shape[0] + 2; }
    int ny_full() const { return dim == 2 ? shape[1] + 2 : 1; }
    int full_count() const { return nx_full() * ny_full(); }
    int interior_count() const { return shape[0] * (dim == 2 ? shape[1] : 1); }
    int full_index(int ix, int iy = 0) const { return iy * nx_full() + ix; }
    bool is_boundary(int full) const { return boundary_mask[static_cast<size_t>(full)] != 0; }
    double cell_volume() const { return dim == 2 ? spacing[0] * spacing[1] : spacing[0]; }
};

namespace detail {

inline void finalize_boundary_list(Chart& c) {
    c.boundary_nodes.clear();
    for (int i = 0; i < c.full_count(); ++i)
        if (c.boundary_mask[static_cast<size_t>(i)]) c.boundary_nodes.push_back(i);
}

inline Chart make_1d_chart(ChartKind kind, int n_interior, double x0, double x1) {
    Chart c;
    c.kind = kind;
    c.dim = 1;
    c.shape = {n_interior, 1};
    const double h = (x1 - x0) / (n_interior + 1);
    c.spacing = {h, 0.0};
    c.origin = {x0, 0.0};
    const int nf = n_interior + 2;
    c.coords.resize(static_cast<size_t>(nf));
    c.metric_weight.assign(static_cast<size_t>(nf), 1.0);
    c.inv_metric.assign(static_cast<size_t>(nf), {1.0, 1.0, 0.0});
    c.boundary_mask.assign(static_cast<size_t>(nf), 0);
    for (int i = 0; i < nf; ++i) c.coords[static_cast<size_t>(i)] = {x0 + i * h, 0.0};
    c.boundary_mask.front() = 1;
    c.boundary_mask.back() = 1;
    finalize_boundary_list(c);
    return c;
}

}  // namespace detail

inline Chart build_interval_grid(int n_interior, double length) {
    if (n_interior < 1) throw ConfigError("build_interval_grid: n_interior must be >= 1");
    if (!(length > 0.0)) throw ConfigError("build_interval_grid: length must be positive");
    return detail::make_1d_chart(ChartKind::interval, n_interior, 0.0, length);
}

inline Chart build_rectangle_grid(int nx, int ny, double lx, double ly) {
    if (nx < 1 || ny < 1) throw ConfigError("build_rectangle_grid: nx, ny must be >= 1");
    if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("build_rectangle_grid: lengths must be positive");
    Chart c;
    c.kind = ChartKind::rectangle;
    c.dim = 2;
    c.shape = {nx, ny};
    const double hx = lx / (nx + 1), hy = ly / (ny + 1);
    c.spacing = {hx, hy};
    c.origin = {0.0, 0.0};
    const int nfx = nx + 2, nfy = ny + 2;
    const size_t nf = static_cast<size_t>(nfx) * static_cast<size_t>(nfy);
    c.coords.resize(nf);
    c.metric_weight.assign(nf, 1.0);
    c.inv_metric.assign(nf, {1.0, 1.0, 0.0});
    c.boundary_mask.assign(nf, 0);
    for (int iy = 0; iy < nfy; ++iy)
        for (int ix = 0; ix < nfx; ++ix) {
            const size_t k = static_cast<size_t>(c.full_index(ix, iy));
            c.coords[k] = {ix * hx, iy * hy};
            if (ix == 0 || iy == 0 || ix == nfx - 1 || iy == nfy - 1) c.boundary_mask[k] = 1;
        }
    detail::finalize_boundary_list(c);
    return c;
}

// Axisymmetric band theta in (theta_min, theta_max) on the unit sphere:
// 1D chart in theta with volume weight sin(theta) and g^{theta theta} = 1,
// so that -Delta_g u = -(1/sin t) d/dt (sin t du/dt). Poles are excluded.
inline Chart build_metric_band(int n_interior, double theta_min, double theta_max) {
    if (n_interior < 1) throw ConfigError("build_metric_band: n must be >= 1");
    constexpr double pi = 3.14159265358979323846;
    if (!(theta_min > 0.0) || !(theta_max < pi) || !(theta_min < theta_max))
        throw ConfigError("build_metric_band: need 0 < theta_min < theta_max < pi (poles excluded)");
    Chart c = detail::make_1d_chart(ChartKind::metric_band, n_interior, theta_min, theta_max);
    c.kind = ChartKind::metric_band;
    for (size_t i = 0; i < c.metric_weight.size(); ++i)
        c.metric_weight[i] = std::sin(c.coords[i][0]);
    return c;
}

// Two overlapping arcs covering the unit circle, a partition of unity with
// raised-cosine ramps over the overlap windows, and a unit-mass bump sigma
// supported in the window around theta = pi.
struct CircleCover {
    int n_circle = 0;   // circle nodes theta_j = j*h, j = 0..n_circle-1
    double h = 0.0;     // 2*pi / n_circle
    int m = 0;          // overlap half-width in node counts

    Chart arc1, arc2;   // arc1 spans indices [-m, half+m], arc2 [half-m, n+m]
    std::vector<int> arc1_circle_index;  // per full arc node -> circle node
    std::vector<int> arc2_circle_index;

    std::vector<double> chi1, chi2;  // per circle node, chi1 + chi2 == 1
    std::vector<double> sigma;       // per circle node, sum(sigma)*h == 1

    std::vector<int> overlap_equator;  // circle nodes interior to both arcs, near pi
    std::vector<int> overlap_origin;   // near 0

    double theta(int j) const { return h * j; }
    int wrap(int j) const { return ((j % n_circle) + n_circle) % n_circle; }
};

inline CircleCover build_circle_cover(int n, double overlap_fraction) {
    constexpr double pi = 3.14159265358979323846;
    if (n < 8) throw ConfigError("build_circle_cover: n too small");
    if (!(overlap_fraction > 0.0) || !(overlap_fraction < 0.5))
        throw ConfigError("build_circle_cover: overlap_fraction must lie in (0, 0.5)");
    CircleCover cv;
    cv.n_circle = n;
    cv.h = 2.0 * pi / n;
    const int half = n / 2;
    cv.m = static_cast<int>(std::llround(overlap_fraction * n / 2.0));
    if (cv.m < 2)
        throw ConfigError("build_circle_cover: overlap too thin to host sigma (needs >= 3 interior overlap nodes)");
    if (half < 2 * cv.m + 2 || n - half < 2 * cv.m + 2)
        throw ConfigError("build_circle_cover: overlap too wide, arcs leave no exclusive region");
    const int m = cv.m;

    auto make_arc = [&](int first, int last, std::vector<int>& index_map) {
        Chart arc = detail::make_1d_chart(ChartKind::circle_arc, last - first - 1,
                                          first * cv.h, last * cv.h);
        index_map.resize(static_cast<size_t>(arc.full_count()));
        for (int k = 0; k < arc.full_count(); ++k)
            index_map[static_cast<size_t>(k)] = cv.wrap(first + k);
        return arc;
    };
    cv.arc1 = make_arc(-m, half + m, cv.arc1_circle_index);
    cv.arc2 = make_arc(half - m, n + m, cv.arc2_circle_index);

    cv.chi1.assign(static_cast<size_t>(n), 0.0);
    cv.chi2.assign(static_cast<size_t>(n), 0.0);
    cv.sigma.assign(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const int d0 = (j <= half) ? j : j - n;  // signed distance from theta = 0
        double chi;
        if (std::abs(d0) <= m) {
            // window around 0: ramp chi1 from 0 at -m to 1 at +m
            const double t = (d0 + m) / (2.0 * m);
            chi = 0.5 * (1.0 - std::cos(pi * t));
        } else if (std::abs(j - half) <= m) {
            // window around pi: ramp chi1 from 1 at half-m to 0 at half+m
            const double t = (j - (half - m)) / (2.0 * m);
            chi = 0.5 * (1.0 + std::cos(pi * t));
        } else {
            chi = (j > m && j < half - m) ? 1.0 : 0.0;
        }
        cv.chi1[static_cast<size_t>(j)] = chi;
        cv.chi2[static_cast<size_t>(j)] = 1.0 - chi;
    }

    double sigma_mass = 0.0;
    for (int j = half - m; j <= half + m; ++j) {
        const double raw = 1.0 + std::cos(pi * (j - half) / static_cast<double>(m));
        cv.sigma[static_cast<size_t>(cv.wrap(j))] = raw;
        sigma_mass += raw * cv.h;
    }
    for (auto& s : cv.sigma) s /= sigma_mass;

    for (int j = half - m + 1; j <= half + m - 1; ++j) cv.overlap_equator.push_back(cv.wrap(j));
    for (int j = -m + 1; j <= m - 1; ++j) cv.overlap_origin.push_back(cv.wrap(j));
    return cv;
}

}  // namespace semilin
