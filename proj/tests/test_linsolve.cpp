#include <catch2/catch.hpp>

#include "oracles.hpp"
#include "semilin/linsolve.hpp"
#include "semilin/spectral.hpp"

using namespace semilin;

namespace {
constexpr double pi = 3.14159265358979323846;

double l2_error(const Chart& c, const Field& u, const std::function<double(double)>& exact) {
    const auto fwd = active_to_full(c, u.bc);
    Field d = make_field(c, u.bc);
    for (size_t a = 0; a < fwd.size(); ++a)
        d.values[a] = u.values[a] - exact(c.coords[static_cast<size_t>(fwd[a])][0]);
    return norm_l2(c, d);
}
}  // namespace

TEST_CASE("zero rhs gives the zero solution") {
    const Chart c = build_interval_grid(33, 1.0);
    const DiscreteOperator op = assemble_operator(c, BcKind::dirichlet_zero);
    const Field rhs = make_field(c, BcKind::dirichlet_zero);
    auto [u, stats] = solve_linear(op, rhs);
    for (const auto& v : u.values) REQUIRE(std::abs(v) == 0.0);
    REQUIRE(stats.iterations == 0);
    REQUIRE(stats.method == SolveMethod::direct_cholesky_like);
}

TEST_CASE("Dirichlet Poisson solve converges at second order") {
    auto err = [](int n) {
        const Chart c = build_interval_grid(n, 1.0);
        const DiscreteOperator op = assemble_operator(c, BcKind::dirichlet_zero);
        const Field rhs = sample_field(c, BcKind::dirichlet_zero,
                                       [](double x, double) { return pi * pi * std::sin(pi * x); });
        auto [u, stats] = solve_linear(op, rhs);
        REQUIRE(stats.residual_norm <= 1e-10);
        return l2_error(c, u, [](double x) { return std::sin(pi * x); });
    };
    const double e1 = err(63), e2 = err(127);
    REQUIRE(e1 / e2 == Approx(4.0).margin(0.5));
}

TEST_CASE("Neumann solve returns the mean-zero cosine") {
    auto err = [](int n) {
        const Chart c = build_interval_grid(n, 1.0);
        const DiscreteOperator op = assemble_operator(c, BcKind::neumann);
        const Field rhs = sample_field(c, BcKind::neumann,
                                       [](double x, double) { return std::cos(pi * x); });
        auto [u, stats] = solve_linear(op, rhs);
        REQUIRE(u.mean_zero);
        REQUIRE(std::abs(weighted_mean(u)) <= 1e-12);
        return l2_error(c, u, [](double x) { return std::cos(pi * x) / (pi * pi); });
    };
    const double e1 = err(63), e2 = err(127);
    REQUIRE(e1 / e2 == Approx(4.0).margin(0.5));
}

TEST_CASE("Neumann rhs with nonzero mean is projected out") {
    const Chart c = build_interval_grid(21, 1.0);
    const DiscreteOperator op = assemble_operator(c, BcKind::neumann);
    const Field rhs = sample_field(c, BcKind::neumann, [](double, double) { return 1.0; });
    auto [u, stats] = solve_linear(op, rhs);
    for (const auto& v : u.values) REQUIRE(std::abs(v) <= 1e-12);
    REQUIRE(stats.neumann_projection == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solving with an eigenvector rhs inverts the eigenvalue") {
    const Chart c = build_interval_grid(30, 1.0);
    const DiscreteOperator op = assemble_operator(c, BcKind::dirichlet_zero);
    // sin(pi x) is the exact discrete eigenvector of the uniform stencil
    const double lambda = oracles::discrete_dirichlet_lambda(30, 1.0);
    const Field v1 = sample_field(c, BcKind::dirichlet_zero,
                                  [](double x, double) { return std::sin(pi * x); });
    auto [u, stats] = solve_linear(op, v1);
    for (size_t a = 0; a < u.values.size(); ++a)
        REQUIRE(std::abs(u.values[a] - v1.values[a] / lambda) <= 1e-8);
}

TEST_CASE("shifted solves agree with the dense oracle") {
    const Chart c = build_interval_grid(25, 1.0);
    const double xi = 3.5;
    const DiscreteOperator op = assemble_operator(c, BcKind::dirichlet_zero, xi);
    const Field rhs = sample_field(c, BcKind::dirichlet_zero,
                                   [](double x, double) { return cplx(x, 1.0 - x); });
    auto [u, stats] = solve_linear(op, rhs);
    // residual in operator form: (-Delta + xi) u - rhs
    Field res = make_field(c, BcKind::dirichlet_zero);
    res.values = op.apply(u);
    for (size_t i = 0; i < res.values.size(); ++i) res.values[i] -= rhs.values[i];
    REQUIRE(norm_l2(c, res) <= 1e-9 * std::max(1.0, norm_l2(c, rhs)));
}

TEST_CASE("conjugate gradient path matches the direct path") {
    const Chart c = build_rectangle_grid(19, 17, 1.0, 1.3);
    const DiscreteOperator op = assemble_operator(c, BcKind::dirichlet_zero);
    const Field rhs = sample_field(c, BcKind::dirichlet_zero, [](double x, double y) {
        return cplx(std::sin(2.0 * x + y), std::cos(x - y));
    });
    PoissonSolver direct(op);
    auto [ud, sd] = direct.solve(rhs.values);

    // force the CG path through a projected solve of the same system
    RVec re(rhs.values.size()), x;
    for (size_t i = 0; i < re.size(); ++i) re[i] = (op.mass[i] * rhs.values[i]).real();
    auto apply = [&](const RVec& p, RVec& out) {
        out.assign(p.size(), 0.0);
        for (int i = 0; i < op.A.n; ++i) {
            double acc = 0.0;
            for (int k = op.A.row_ptr[static_cast<size_t>(i)]; k < op.A.row_ptr[static_cast<size_t>(i) + 1]; ++k)
                acc += op.A.val[static_cast<size_t>(k)] * p[static_cast<size_t>(op.A.col[static_cast<size_t>(k)])];
            out[static_cast<size_t>(i)] = op.vol * acc;
        }
    };
    double rel = 0.0;
    const int iters = detail::conjugate_gradient(apply, x, re, 1e-12, 100000, [](RVec&) {}, rel);
    REQUIRE(iters > 0);
    REQUIRE(rel <= 1e-12);
    for (size_t i = 0; i < x.size(); ++i) REQUIRE(std::abs(x[i] - ud[i].real()) <= 1e-8);
}

TEST_CASE("wide-band systems fall back to CG and match the direct path") {
    // the same physical domain in both orientations: 300x2 has bandwidth 302
    // (conjugate gradient), 2x300 has bandwidth 4 (direct factorization)
    const Chart wide = build_rectangle_grid(300, 2, 3.0, 1.0);
    const Chart tall = build_rectangle_grid(2, 300, 1.0, 3.0);
    const DiscreteOperator op_w = assemble_operator(wide, BcKind::dirichlet_zero);
    const DiscreteOperator op_t = assemble_operator(tall, BcKind::dirichlet_zero);
    auto f = [](double a, double b) { return cplx(std::sin(a + 2.0 * b), std::cos(a - b)); };
    const Field rhs_w = sample_field(wide, BcKind::dirichlet_zero,
                                     [&](double x, double y) { return f(x, y); });
    const Field rhs_t = sample_field(tall, BcKind::dirichlet_zero,
                                     [&](double x, double y) { return f(y, x); });
    auto [uw, sw] = solve_linear(op_w, rhs_w);
    auto [ut, st] = solve_linear(op_t, rhs_t);
    REQUIRE(sw.method == SolveMethod::conjugate_gradient);
    REQUIRE(sw.iterations > 0);
    REQUIRE(st.method == SolveMethod::direct_cholesky_like);
    // transpose the tall solution onto the wide ordering and compare
    for (int iy = 1; iy <= 2; ++iy)
        for (int ix = 1; ix <= 300; ++ix) {
            const size_t aw = static_cast<size_t>((iy - 1) * 300 + (ix - 1));
            const size_t at = static_cast<size_t>((ix - 1) * 2 + (iy - 1));
            REQUIRE(std::abs(uw.values[aw] - ut.values[at]) <= 1e-9);
        }
}

TEST_CASE("indefinite band factorization is reported as a numerical error") {
    detail::BandedLdlt ldlt;
    // [1 2; 2 1] is indefinite
    REQUIRE_THROWS_AS(ldlt.factor(2, 1, RVec{0.0, 2.0}, RVec{1.0, 1.0}), NumericalError);
}

TEST_CASE("mismatched rhs is rejected") {
    const Chart c = build_interval_grid(9, 1.0);
    const Chart c2 = build_interval_grid(11, 1.0);
    const DiscreteOperator op = assemble_operator(c, BcKind::dirichlet_zero);
    const Field rhs = make_field(c2, BcKind::dirichlet_zero);
    REQUIRE_THROWS_AS(solve_linear(op, rhs), ConfigError);
}
