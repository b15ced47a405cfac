// Catalog of globally Lipschitz nonlinearities F(u) (and optionally
// F2(grad u)) with their declared Lipschitz constants. Declared constants
// are trusted inputs for the contraction certificate; sample_lipschitz gives
// a necessary-condition probe that never exceeds the true constant.
#pragma once

#include <cmath>
#include <string>

#include "semilin/errors.hpp"
#include "semilin/field.hpp"
#include "semilin/rng.hpp"

namespace semilin {

enum class FKind { zero, linear, phase, sine_real, saturating, modulus_type };
enum class GradKind { none, linear_combo, saturating_grad };

inline const char* f_kind_name(FKind k) {
    switch (k) {
        case FKind::zero: return "zero";
        case FKind::linear: return "linear";
        case FKind::phase: return "phase";
        case FKind::sine_real: return "sine_real";
        case FKind::saturating: return "saturating";
        case FKind::modulus_type: return "modulus_type";
    }
    return "?";
}

struct NonlinearitySpec {
    FKind f_kind = FKind::zero;
    cplx a{};            // linear coefficient
    double alpha = 0.0;  // parameter of the scalar catalog entries
    double declared_C1 = 0.0;

    GradKind grad_kind = GradKind::none;
    CVec b;                   // linear_combo coefficients, one per axis
    double grad_alpha = 0.0;  // saturating_grad parameter
    double declared_C2 = 0.0;

    static NonlinearitySpec zero() { return {}; }
    static NonlinearitySpec linear(cplx coeff) {
        NonlinearitySpec s;
        s.f_kind = FKind::linear;
        s.a = coeff;
        s.declared_C1 = std::abs(coeff);
        return s;
    }
    // alpha * exp(i (Re z + Im z)); sharp global Lipschitz constant alpha*sqrt(2)
    static NonlinearitySpec phase(double alpha) {
        return scalar(FKind::phase, alpha, alpha * std::sqrt(2.0));
    }
    static NonlinearitySpec sine_real(double alpha) { return scalar(FKind::sine_real, alpha, alpha); }
    static NonlinearitySpec saturating(double alpha) { return scalar(FKind::saturating, alpha, alpha); }
    static NonlinearitySpec modulus_type(double alpha) { return scalar(FKind::modulus_type, alpha, alpha); }

    NonlinearitySpec& with_linear_combo(CVec coeffs) {
        grad_kind = GradKind::linear_combo;
        b = std::move(coeffs);
        double s = 0.0;
        for (const auto& bi : b) s += std::norm(bi);
        declared_C2 = std::sqrt(s);
        return *this;
    }
    NonlinearitySpec& with_saturating_grad(double alpha, int dim) {
        grad_kind = GradKind::saturating_grad;
        grad_alpha = alpha;
        declared_C2 = alpha * std::sqrt(static_cast<double>(dim));
        return *this;
    }

    bool has_grad() const { return grad_kind != GradKind::none; }

    cplx eval(cplx z) const {
        switch (f_kind) {
            case FKind::zero: return {};
            case FKind::linear: return a * z;
            case FKind::phase: {
                const double s = z.real() + z.imag();
                return alpha * cplx(std::cos(s), std::sin(s));
            }
            case FKind::sine_real: return {alpha * std::sin(z.real()), 0.0};
            case FKind::saturating: return alpha * z / (1.0 + std::abs(z));
            case FKind::modulus_type: return alpha * z / (1.0 + std::norm(z));
        }
        return {};
    }

    cplx eval_grad(const cplx* g, int dim) const {
        switch (grad_kind) {
            case GradKind::none: return {};
            case GradKind::linear_combo: {
                if (static_cast<int>(b.size()) != dim)
                    throw ConfigError("linear_combo: coefficient count must match chart dimension");
                cplx s{};
                for (int d = 0; d < dim; ++d) s += b[static_cast<size_t>(d)] * g[d];
                return s;
            }
            case GradKind::saturating_grad: {
                cplx s{};
                for (int d = 0; d < dim; ++d) s += g[d] / (1.0 + std::abs(g[d]));
                return grad_alpha * s;
            }
        }
        return {};
    }

  private:
    static NonlinearitySpec scalar(FKind k, double alpha, double c1) {
        if (alpha < 0.0) throw ConfigError("nonlinearity parameter must be nonnegative");
        NonlinearitySpec s;
        s.f_kind = k;
        s.alpha = alpha;
        s.declared_C1 = c1;
        return s;
    }
};

// Max sampled difference quotient |F(z)-F(w)| / |z-w| over pairs in the disc
// of the given radius; half the pairs are near-coincident to probe the local
// slope. The step 1e-3*radius balances curvature undershoot against the
// cancellation noise in F(z)-F(w), keeping quotient errors near 1e-12 so the
// estimate never exceeds the true global constant.
inline double sample_lipschitz(const NonlinearitySpec& F, int n_samples, double radius,
                               std::uint64_t seed = 0x5eed) {
    if (n_samples < 2) throw ConfigError("sample_lipschitz: need at least 2 samples");
    if (!(radius > 0.0)) throw ConfigError("sample_lipschitz: radius must be positive");
    Rng rng(seed);
    double best = 0.0;
    constexpr double two_pi = 6.28318530717958647692;
    for (int s = 0; s < n_samples; ++s) {
        const cplx z = rng.in_disc(radius);
        cplx w;
        if (s % 2 == 0) {
            const double phi = rng.uniform(0.0, two_pi);
            w = z + 1e-3 * radius * cplx(std::cos(phi), std::sin(phi));
        } else {
            w = rng.in_disc(radius);
        }
        const double dz = std::abs(z - w);
        if (dz == 0.0) continue;
        best = std::max(best, std::abs(F.eval(z) - F.eval(w)) / dz);
    }
    return best;
}

// Same probe for the gradient part, over pairs of C^dim vectors.
inline double sample_lipschitz_grad(const NonlinearitySpec& F, int dim, int n_samples, double radius,
                                    std::uint64_t seed = 0x5eed) {
    if (!F.has_grad()) return 0.0;
    if (n_samples < 2) throw ConfigError("sample_lipschitz_grad: need at least 2 samples");
    Rng rng(seed);
    double best = 0.0;
    CVec v(static_cast<size_t>(dim)), w(static_cast<size_t>(dim));
    for (int s = 0; s < n_samples; ++s) {
        double dist2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            v[static_cast<size_t>(d)] = rng.in_disc(radius);
            const cplx step = (s % 2 == 0) ? 1e-3 * radius * rng.in_disc(1.0) : rng.in_disc(radius) - v[static_cast<size_t>(d)];
            w[static_cast<size_t>(d)] = v[static_cast<size_t>(d)] + step;
            dist2 += std::norm(step);
        }
        if (dist2 == 0.0) continue;
        best = std::max(best, std::abs(F.eval_grad(v.data(), dim) - F.eval_grad(w.data(), dim)) /
                                  std::sqrt(dist2));
    }
    return best;
}

}  // namespace semilin
