// Independent checks and ground-truth suppliers: the mean-zero two-chart
// decomposition, the discrete L1*L2 convolution inequality on the periodic
// grid, manufactured solutions with analytic Laplacians, the discrete
// Poincare property, and a periodic circle solve used as the gluing oracle.
#pragma once

#include <cmath>
#include <functional>

#include "semilin/nonlinearity.hpp"
#include "semilin/operators.hpp"
#include "semilin/rng.hpp"
#include "semilin/spectral.hpp"

namespace semilin {

// ---------------------------------------------------------------------------
// Mean-zero cover decomposition on the circle: u = u1 + u2 with
// u1 = chi1*u - I1*sigma supported in U1, u2 = chi2*u + I1*sigma in U2, and
// both parts of discrete integral zero.
struct CoverDecomposition {
    std::vector<CVec> parts;                // per circle node, one entry per chart
    std::vector<std::vector<int>> supports; // circle nodes interior to each chart
    std::vector<cplx> integrals;            // I_i = integral of chi_i * u
};

inline cplx circle_integral(const CVec& u, double h) {
    cplx s{};
    for (const auto& v : u) s += v;
    return s * h;
}

inline CoverDecomposition decompose_mean_zero(const CircleCover& cover, const CVec& u) {
    const int n = cover.n_circle;
    if (u.size() != static_cast<size_t>(n)) throw ConfigError("decompose_mean_zero: size mismatch");
    const double measure = 2.0 * 3.14159265358979323846;
    if (std::abs(circle_integral(u, cover.h)) / measure > 1e-12)
        throw ConfigError("decompose_mean_zero: input field does not have zero weighted mean");

    cplx i1{};
    for (int j = 0; j < n; ++j) i1 += cover.chi1[static_cast<size_t>(j)] * u[static_cast<size_t>(j)];
    i1 *= cover.h;

    CoverDecomposition dec;
    dec.parts.assign(2, CVec(static_cast<size_t>(n), cplx{}));
    for (int j = 0; j < n; ++j) {
        dec.parts[0][static_cast<size_t>(j)] =
            cover.chi1[static_cast<size_t>(j)] * u[static_cast<size_t>(j)] - i1 * cover.sigma[static_cast<size_t>(j)];
        dec.parts[1][static_cast<size_t>(j)] =
            cover.chi2[static_cast<size_t>(j)] * u[static_cast<size_t>(j)] + i1 * cover.sigma[static_cast<size_t>(j)];
    }
    dec.integrals = {i1, -i1};
    dec.supports.resize(2);
    for (int k = 1; k < cover.arc1.full_count() - 1; ++k)
        dec.supports[0].push_back(cover.arc1_circle_index[static_cast<size_t>(k)]);
    for (int k = 1; k < cover.arc2.full_count() - 1; ++k)
        dec.supports[1].push_back(cover.arc2_circle_index[static_cast<size_t>(k)]);
    return dec;
}

// ---------------------------------------------------------------------------
// Discrete Young inequality ||f*g||_2 <= ||f||_1 ||g||_2 under circular
// convolution with grid weight h.
struct YoungReport {
    double lhs = 0.0, rhs = 0.0;
    bool holds = false;
};

inline YoungReport check_young(const RVec& f, const CVec& g, double h) {
    if (f.size() != g.size()) throw ConfigError("check_young: size mismatch");
    const int n = static_cast<int>(f.size());
    CVec conv(static_cast<size_t>(n), cplx{});
    for (int j = 0; j < n; ++j) {
        cplx s{};
        for (int k = 0; k < n; ++k) s += f[static_cast<size_t>(k)] * g[static_cast<size_t>(((j - k) % n + n) % n)];
        conv[static_cast<size_t>(j)] = s * h;
    }
    double l2c = 0.0, l1f = 0.0, l2g = 0.0;
    for (int j = 0; j < n; ++j) {
        l2c += std::norm(conv[static_cast<size_t>(j)]) * h;
        l1f += std::abs(f[static_cast<size_t>(j)]) * h;
        l2g += std::norm(g[static_cast<size_t>(j)]) * h;
    }
    YoungReport r;
    r.lhs = std::sqrt(l2c);
    r.rhs = l1f * std::sqrt(l2g);
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-12);
    return r;
}

// ---------------------------------------------------------------------------
// Manufactured solutions with analytically known -Delta_g, gradients and
// traces. The analytic formulas never touch the discrete operator.
enum class StarTag { sin_pi_x, sin_pi_xy, cos_theta, band_poly };

inline const char* star_tag_name(StarTag t) {
    switch (t) {
        case StarTag::sin_pi_x: return "sin_pi_x";
        case StarTag::sin_pi_xy: return "sin_pi_xy";
        case StarTag::cos_theta: return "cos_theta";
        case StarTag::band_poly: return "band_poly";
    }
    return "?";
}

struct StarFunctions {
    std::function<double(double, double)> value;
    std::function<double(double, double)> minus_laplacian;
    std::function<double(double, double)> grad_x;
    std::function<double(double, double)> grad_y;
    bool zero_trace = false;  // vanishes on the chart boundary
};

inline StarFunctions star_functions(const Chart& c, StarTag tag) {
    constexpr double pi = 3.14159265358979323846;
    StarFunctions s;
    switch (tag) {
        case StarTag::sin_pi_x: {
            if (c.kind != ChartKind::interval)
                throw ConfigError("manufactured sin_pi_x needs an interval chart");
            const double L = c.spacing[0] * (c.shape[0] + 1);
            const double w = pi / L;
            s.value = [w](double x, double) { return std::sin(w * x); };
            s.minus_laplacian = [w](double x, double) { return w * w * std::sin(w * x); };
            s.grad_x = [w](double x, double) { return w * std::cos(w * x); };
            s.grad_y = [](double, double) { return 0.0; };
            s.zero_trace = true;
            break;
        }
        case StarTag::sin_pi_xy: {
            if (c.kind != ChartKind::rectangle)
                throw ConfigError("manufactured sin_pi_xy needs a rectangle chart");
            const double lx = c.spacing[0] * (c.shape[0] + 1), ly = c.spacing[1] * (c.shape[1] + 1);
            const double wx = pi / lx, wy = pi / ly;
            s.value = [wx, wy](double x, double y) { return std::sin(wx * x) * std::sin(wy * y); };
            s.minus_laplacian = [wx, wy](double x, double y) {
                return (wx * wx + wy * wy) * std::sin(wx * x) * std::sin(wy * y);
            };
            s.grad_x = [wx, wy](double x, double y) { return wx * std::cos(wx * x) * std::sin(wy * y); };
            s.grad_y = [wx, wy](double x, double y) { return wy * std::sin(wx * x) * std::cos(wy * y); };
            s.zero_trace = true;
            break;
        }
        case StarTag::cos_theta: {
            if (c.kind != ChartKind::metric_band)
                throw ConfigError("manufactured cos_theta needs a metric_band chart");
            // degree-1 zonal harmonic: -Delta_g cos(t) = 2 cos(t)
            s.value = [](double t, double) { return std::cos(t); };
            s.minus_laplacian = [](double t, double) { return 2.0 * std::cos(t); };
            s.grad_x = [](double t, double) { return -std::sin(t); };
            s.grad_y = [](double, double) { return 0.0; };
            s.zero_trace = false;
            break;
        }
        case StarTag::band_poly: {
            if (c.kind != ChartKind::metric_band)
                throw ConfigError("manufactured band_poly needs a metric_band chart");
            const double a = c.origin[0], b = c.origin[0] + c.spacing[0] * (c.shape[0] + 1);
            s.value = [a, b](double t, double) { return (t - a) * (b - t); };
            s.minus_laplacian = [a, b](double t, double) {
                return 2.0 - (a + b - 2.0 * t) / std::tan(t);
            };
            s.grad_x = [a, b](double t, double) { return a + b - 2.0 * t; };
            s.grad_y = [](double, double) { return 0.0; };
            s.zero_trace = true;
            break;
        }
    }
    return s;
}

inline Field manufactured_solution(const Chart& c, StarTag tag, BcKind bc) {
    const StarFunctions s = star_functions(c, tag);
    if (bc == BcKind::neumann)
        throw ConfigError("manufactured solutions: no catalog entry satisfies Neumann conditions");
    if (bc == BcKind::dirichlet_zero && !s.zero_trace)
        throw ConfigError(std::string("manufactured ") + star_tag_name(tag) +
                          " does not vanish on the boundary; use dirichlet_data");
    return sample_field(c, bc, [&](double x, double y) { return cplx(s.value(x, y), 0.0); });
}

// f = -Delta u* + xi u* + F(u*) + F2(grad u*), all terms analytic.
inline Field manufactured_rhs(const Chart& c, StarTag tag, const NonlinearitySpec& F, double xi,
                              BcKind bc) {
    const StarFunctions s = star_functions(c, tag);
    if (bc == BcKind::neumann)
        throw ConfigError("manufactured solutions: no catalog entry satisfies Neumann conditions");
    if (bc == BcKind::dirichlet_zero && !s.zero_trace)
        throw ConfigError(std::string("manufactured ") + star_tag_name(tag) +
                          " does not vanish on the boundary; use dirichlet_data");
    return sample_field(c, bc, [&](double x, double y) {
        const cplx u(s.value(x, y), 0.0);
        std::array<cplx, 2> g{cplx(s.grad_x(x, y), 0.0), cplx(s.grad_y(x, y), 0.0)};
        return cplx(s.minus_laplacian(x, y) + xi * s.value(x, y), 0.0) + F.eval(u) +
               F.eval_grad(g.data(), c.dim);
    });
}

// ---------------------------------------------------------------------------
// Discrete Poincare property over random fields: ||u||_l2 <= (C + 1e-8) ||u||_E
// with C from the chart's own spectral report.
struct PoincareCheck {
    int trials = 0;
    double constant = 0.0;
    double max_violation = 0.0;  // max of ||u||_l2 - (C + 1e-8) ||u||_E, <= 0 when the bound holds
    bool pass = false;
};

inline PoincareCheck poincare_check(const Chart& chart, BcKind bc, int trials, std::uint64_t seed) {
    const DiscreteOperator op = assemble_operator(chart, bc, 0.0);
    const EigenMode mode = bc == BcKind::neumann ? EigenMode::neumann_nonzero : EigenMode::dirichlet;
    const SpectralReport rep = smallest_eigenvalue(op, mode);
    Rng rng(seed);
    PoincareCheck chk;
    chk.trials = trials;
    chk.constant = rep.poincare_constant;
    chk.max_violation = -1e300;
    for (int t = 0; t < trials; ++t) {
        Field u = make_field(chart, bc);
        for (auto& v : u.values) v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        if (bc == BcKind::neumann) {
            const cplx m = weighted_mean(u);
            for (auto& v : u.values) v -= m;
        }
        const double l2 = norm_l2(chart, u);
        const double en = norm_energy(chart, u);
        chk.max_violation = std::max(chk.max_violation, l2 - (rep.poincare_constant + 1e-8) * en);
    }
    chk.pass = chk.max_violation <= 0.0;
    return chk;
}

// ---------------------------------------------------------------------------
// Direct periodic solve on the circle (mean-zero representative), used as
// the oracle for the two-chart gluing. Solves the circulant system by
// pinning the last unknown and a plain Thomas elimination on the remaining
// tridiagonal block, a code path independent of the chart machinery.
inline CVec solve_circle_periodic(const CVec& f, double h) {
    const int n = static_cast<int>(f.size());
    CVec b = f;
    cplx mean{};
    for (const auto& v : b) mean += v;
    mean /= static_cast<double>(n);
    for (auto& v : b) v -= mean;

    const int m = n - 1;
    const double diag = 2.0 / (h * h), off = -1.0 / (h * h);
    RVec c(static_cast<size_t>(m), 0.0);
    CVec d(static_cast<size_t>(m));
    RVec piv(static_cast<size_t>(m), 0.0);
    piv[0] = diag;
    d[0] = b[0];
    for (int i = 1; i < m; ++i) {
        c[static_cast<size_t>(i)] = off / piv[static_cast<size_t>(i - 1)];
        piv[static_cast<size_t>(i)] = diag - c[static_cast<size_t>(i)] * off;
        d[static_cast<size_t>(i)] = b[static_cast<size_t>(i)] - c[static_cast<size_t>(i)] * d[static_cast<size_t>(i - 1)];
    }
    CVec u(static_cast<size_t>(n), cplx{});
    u[static_cast<size_t>(m - 1)] = d[static_cast<size_t>(m - 1)] / piv[static_cast<size_t>(m - 1)];
    for (int i = m - 2; i >= 0; --i)
        u[static_cast<size_t>(i)] =
            (d[static_cast<size_t>(i)] - off * u[static_cast<size_t>(i + 1)]) / piv[static_cast<size_t>(i)];
    u[static_cast<size_t>(n - 1)] = cplx{};

    cplx umean{};
    for (const auto& v : u) umean += v;
    umean /= static_cast<double>(n);
    for (auto& v : u) v -= umean;
    return u;
}

}  // namespace semilin
