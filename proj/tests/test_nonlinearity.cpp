#include <catch2/catch.hpp>

#include "semilin/nonlinearity.hpp"

using namespace semilin;

TEST_CASE("catalog evaluation") {
    REQUIRE(NonlinearitySpec::zero().eval(cplx(3.0, -2.0)) == cplx{});

    const auto lin = NonlinearitySpec::linear(cplx(2.0, 1.0));
    REQUIRE(std::abs(lin.eval(cplx(0.0, 1.0)) - cplx(-1.0, 2.0)) <= 1e-15);
    REQUIRE(lin.declared_C1 == Approx(std::sqrt(5.0)));

    const auto ph = NonlinearitySpec::phase(0.5);
    REQUIRE(std::abs(ph.eval(cplx{}) - cplx(0.5, 0.0)) <= 1e-15);  // F(0) = alpha
    REQUIRE(std::abs(std::abs(ph.eval(cplx(1.3, -0.4))) - 0.5) <= 1e-15);
    REQUIRE(ph.declared_C1 == Approx(0.5 * std::sqrt(2.0)));

    const auto sr = NonlinearitySpec::sine_real(2.0);
    REQUIRE(std::abs(sr.eval(cplx(0.5, 9.0)) - cplx(2.0 * std::sin(0.5), 0.0)) <= 1e-15);
    REQUIRE(sr.declared_C1 == Approx(2.0));

    const auto sat = NonlinearitySpec::saturating(1.0);
    REQUIRE(std::abs(sat.eval(cplx(3.0, 4.0)) - cplx(0.5, 2.0 / 3.0)) <= 1e-15);
    REQUIRE(std::abs(sat.eval(cplx{})) == 0.0);

    const auto mod = NonlinearitySpec::modulus_type(2.0);
    REQUIRE(std::abs(mod.eval(cplx(1.0, 0.0)) - cplx(1.0, 0.0)) <= 1e-15);
}

TEST_CASE("gradient catalog evaluation") {
    auto F = NonlinearitySpec::zero();
    F.with_linear_combo({cplx(1.0, 0.0), cplx(0.0, 2.0)});
    const cplx g[2] = {cplx(1.0, 1.0), cplx(2.0, 0.0)};
    REQUIRE(std::abs(F.eval_grad(g, 2) - (g[0] + cplx(0.0, 2.0) * g[1])) <= 1e-15);
    REQUIRE(F.declared_C2 == Approx(std::sqrt(5.0)));

    auto G = NonlinearitySpec::zero();
    G.with_saturating_grad(1.5, 2);
    REQUIRE(G.declared_C2 == Approx(1.5 * std::sqrt(2.0)));
    REQUIRE(std::abs(G.eval_grad(g, 2) -
                     1.5 * (g[0] / (1.0 + std::abs(g[0])) + g[1] / (1.0 + std::abs(g[1])))) <= 1e-15);

    auto bad = NonlinearitySpec::zero();
    bad.with_linear_combo({cplx(1.0, 0.0)});
    REQUIRE_THROWS_AS(bad.eval_grad(g, 2), ConfigError);
}

TEST_CASE("sampled Lipschitz constants") {
    // phase(1): sharp constant sqrt(2), sampling approaches it from below
    const double s_phase = sample_lipschitz(NonlinearitySpec::phase(1.0), 2000, 3.0);
    REQUIRE(s_phase >= std::sqrt(2.0) - 0.05);
    REQUIRE(s_phase <= std::sqrt(2.0) + 1e-9);

    // linear: the difference quotient is |a| everywhere
    const double s_lin = sample_lipschitz(NonlinearitySpec::linear(cplx(0.3, -0.4)), 200, 2.0);
    REQUIRE(s_lin == Approx(0.5).epsilon(1e-12));

    REQUIRE(sample_lipschitz(NonlinearitySpec::zero(), 100, 1.0) == 0.0);

    // every catalog entry stays below its declared constant
    for (const auto& F : {NonlinearitySpec::phase(1.0), NonlinearitySpec::sine_real(0.7),
                          NonlinearitySpec::saturating(1.2), NonlinearitySpec::modulus_type(0.9),
                          NonlinearitySpec::linear(cplx(1.0, 2.0))}) {
        const double s = sample_lipschitz(F, 1000, 5.0, 99);
        REQUIRE(s <= F.declared_C1 * (1.0 + 1e-9));
    }

    auto G = NonlinearitySpec::zero();
    G.with_linear_combo({cplx(0.6, 0.0), cplx(0.0, 0.8)});
    const double sg = sample_lipschitz_grad(G, 2, 1000, 2.0);
    REQUIRE(sg <= G.declared_C2 * (1.0 + 1e-9));
    REQUIRE(sg >= 0.5 * G.declared_C2);  // linear functional: sampling gets close

    REQUIRE_THROWS_AS(sample_lipschitz(NonlinearitySpec::zero(), 1, 1.0), ConfigError);
    REQUIRE_THROWS_AS(NonlinearitySpec::phase(-1.0), ConfigError);
}
