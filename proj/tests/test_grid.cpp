#include <catch2/catch.hpp>

#include "semilin/grid.hpp"
#include "semilin/operators.hpp"

using namespace semilin;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("interval grid nodes and spacing") {
    const Chart c1 = build_interval_grid(1, 1.0);
    REQUIRE(c1.interior_count() == 1);
    REQUIRE(c1.spacing[0] == Approx(0.5));
    REQUIRE(c1.coords[1][0] == Approx(0.5));

    const Chart c3 = build_interval_grid(3, 1.0);
    REQUIRE(c3.coords[1][0] == Approx(0.25));
    REQUIRE(c3.coords[2][0] == Approx(0.5));
    REQUIRE(c3.coords[3][0] == Approx(0.75));
    REQUIRE(c3.boundary_nodes == std::vector<int>{0, 4});

    const Chart big = build_interval_grid(255, 2.0);
    REQUIRE(big.interior_count() == 255);
    REQUIRE(big.spacing[0] == Approx(2.0 / 256.0));
}

TEST_CASE("interval grid rejects bad input") {
    REQUIRE_THROWS_AS(build_interval_grid(0, 1.0), ConfigError);
    REQUIRE_THROWS_AS(build_interval_grid(4, 0.0), ConfigError);
    REQUIRE_THROWS_AS(build_interval_grid(4, -1.0), ConfigError);
}

TEST_CASE("rectangle grid layout") {
    const Chart c = build_rectangle_grid(1, 1, 1.0, 1.0);
    REQUIRE(c.interior_count() == 1);
    const int mid = c.full_index(1, 1);
    REQUIRE(c.coords[static_cast<size_t>(mid)][0] == Approx(0.5));
    REQUIRE(c.coords[static_cast<size_t>(mid)][1] == Approx(0.5));

    const Chart row = build_rectangle_grid(3, 1, 1.0, 1.0);
    REQUIRE(row.interior_count() == 3);
    for (int ix = 1; ix <= 3; ++ix)
        REQUIRE(row.coords[static_cast<size_t>(row.full_index(ix, 1))][1] == Approx(0.5));

    const Chart sq = build_rectangle_grid(63, 63, 1.0, 1.0);
    REQUIRE(sq.interior_count() == 3969);
    REQUIRE(sq.spacing[0] == Approx(1.0 / 64.0));
    REQUIRE(sq.spacing[1] == Approx(1.0 / 64.0));
    REQUIRE_THROWS_AS(build_rectangle_grid(0, 3, 1.0, 1.0), ConfigError);
}

TEST_CASE("metric band carries sin(theta) weights and excludes poles") {
    const Chart band = build_metric_band(3, pi / 6.0, pi / 2.0);
    for (int i = 0; i < band.full_count(); ++i) {
        REQUIRE(band.metric_weight[static_cast<size_t>(i)] ==
                Approx(std::sin(band.coords[static_cast<size_t>(i)][0])));
        REQUIRE(band.metric_weight[static_cast<size_t>(i)] > 0.0);
    }
    const Chart fine = build_metric_band(255, pi / 4.0, pi / 2.0);
    REQUIRE(fine.spacing[0] == Approx((pi / 4.0) / 256.0));
    for (int i = 0; i < fine.full_count(); ++i) {
        REQUIRE(fine.metric_weight[static_cast<size_t>(i)] >= std::sqrt(2.0) / 2.0 - 1e-15);
        REQUIRE(fine.metric_weight[static_cast<size_t>(i)] <= 1.0);
    }
    REQUIRE_THROWS_AS(build_metric_band(8, 0.0, 1.0), ConfigError);
    REQUIRE_THROWS_AS(build_metric_band(8, 0.5, pi), ConfigError);
    REQUIRE_THROWS_AS(build_metric_band(8, 1.0, 0.5), ConfigError);
}

TEST_CASE("chart positivity invariants hold at every node") {
    const std::vector<Chart> charts = {build_interval_grid(17, 1.5), build_rectangle_grid(5, 7, 2.0, 1.0),
                                       build_metric_band(21, 0.4, 2.0)};
    for (const auto& c : charts) {
        REQUIRE(c.interior_count() == c.shape[0] * (c.dim == 2 ? c.shape[1] : 1));
        for (int i = 0; i < c.full_count(); ++i) {
            REQUIRE(c.metric_weight[static_cast<size_t>(i)] > 0.0);
            const auto& g = c.inv_metric[static_cast<size_t>(i)];
            REQUIRE(g[0] > 0.0);
            REQUIRE(g[1] > 0.0);
            REQUIRE(g[0] * g[1] - g[2] * g[2] > 0.0);  // positive definite
        }
        for (int d = 0; d < c.dim; ++d) REQUIRE(c.spacing[static_cast<size_t>(d)] > 0.0);
    }
}

TEST_CASE("constant-one l2 norm approximates the domain measure") {
    const Chart c = build_interval_grid(63, 1.0);
    const Field one_d = sample_field(c, BcKind::dirichlet_zero, [](double, double) { return 1.0; });
    const double m_d = std::abs(inner_product(c, one_d, one_d, IpKind::l2));
    REQUIRE(m_d == Approx(1.0).margin(2.0 * c.spacing[0]));

    const Field one_n = sample_field(c, BcKind::neumann, [](double, double) { return 1.0; });
    REQUIRE(std::abs(inner_product(c, one_n, one_n, IpKind::l2)) == Approx(1.0).epsilon(1e-14));

    const Chart sq = build_rectangle_grid(31, 31, 1.0, 2.0);
    const Field one_sq = sample_field(sq, BcKind::neumann, [](double, double) { return 1.0; });
    REQUIRE(std::abs(inner_product(sq, one_sq, one_sq, IpKind::l2)) == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("circle cover construction") {
    const CircleCover cv = build_circle_cover(64, 0.1);
    const double arc1_len = cv.arc1.spacing[0] * (cv.arc1.shape[0] + 1);
    const double arc2_len = cv.arc2.spacing[0] * (cv.arc2.shape[0] + 1);
    REQUIRE(arc1_len > pi);
    REQUIRE(arc2_len > pi);
    REQUIRE(cv.overlap_equator.size() >= 3);
    REQUIRE(cv.overlap_origin.size() >= 3);

    // partition of unity is exact at every node
    for (int j = 0; j < cv.n_circle; ++j) {
        REQUIRE(cv.chi1[static_cast<size_t>(j)] + cv.chi2[static_cast<size_t>(j)] == 1.0);
        REQUIRE(cv.chi1[static_cast<size_t>(j)] >= 0.0);
        REQUIRE(cv.chi2[static_cast<size_t>(j)] >= 0.0);
    }

    // sigma has unit discrete integral and is supported in the equator window
    double mass = 0.0;
    for (const auto& s : cv.sigma) mass += s * cv.h;
    REQUIRE(mass == Approx(1.0).margin(1e-14));
    std::vector<char> in_overlap(static_cast<size_t>(cv.n_circle), 0);
    for (const int j : cv.overlap_equator) in_overlap[static_cast<size_t>(j)] = 1;
    for (int j = 0; j < cv.n_circle; ++j)
        if (!in_overlap[static_cast<size_t>(j)]) REQUIRE(cv.sigma[static_cast<size_t>(j)] == 0.0);
}

TEST_CASE("circle cover rejects degenerate overlaps") {
    REQUIRE_THROWS_AS(build_circle_cover(64, 0.01), ConfigError);   // too thin for sigma
    REQUIRE_THROWS_AS(build_circle_cover(64, 0.49), ConfigError);   // no exclusive region left
    REQUIRE_THROWS_AS(build_circle_cover(64, 0.7), ConfigError);
    REQUIRE_THROWS_AS(build_circle_cover(64, 0.0), ConfigError);
}
