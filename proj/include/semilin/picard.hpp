// Certified Picard iteration for -Delta_g u + xi u + F(u) + F2(grad u) = f.
//
// The engine refuses to start unless rho = C1*C^2 + C2*C < 1 with
// C = (lambda_1 + xi)^(-1/2) computed from the discrete operator. Iterates
// u_k solve the linear problem with frozen nonlinearity; the successive
// difference is monitored in the shifted energy norm
// (||d||_E^2 + xi ||d||_L2^2)^(1/2), the norm in which the contraction
// bound holds. Dirichlet data is handled by lifting; a direct
// boundary-insertion path is kept as an independent cross-check. The
// two-chart circle gluing is experimental and reports diagnostics only.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "semilin/nonlinearity.hpp"
#include "semilin/spectral.hpp"

namespace semilin {

struct Tolerances {
    double picard_tol = 1e-10;  // on the (shifted) energy norm of successive differences
    int max_iters = 200;
    double inner_tol = 1e-12;
    bool uniqueness_probe = false;  // also run from u0 = A^{-1} f and u0 = 0 and compare
};

struct ProblemSpec {
    const Chart* chart = nullptr;
    BcKind bc = BcKind::dirichlet_zero;
    Field forcing;        // active-node values for bc
    Field boundary_data;  // dirichlet_data: the extension g-tilde (interior + bc_data)
    NonlinearitySpec F;
    double shift = 0.0;  // xi >= 0, folded into the operator
    Tolerances tol;
};

struct StepRecord {
    int k = 0;
    double energy_diff = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();  // NaN for k = 1
};

struct IterationReport {
    double lambda1 = 0.0;            // unshifted smallest eigenvalue
    double poincare_constant = 0.0;  // (lambda1 + shift)^(-1/2)
    double rho_certified = 0.0;
    std::vector<StepRecord> steps;
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    std::optional<double> uniqueness_check;

    double max_ratio() const {
        double m = 0.0;
        for (const auto& s : steps)
            if (s.k >= 2 && std::isfinite(s.ratio)) m = std::max(m, s.ratio);
        return m;
    }
};

namespace detail {

// Nonlinearity evaluation with the optional translation from lifting:
// F_eff(i, w) = F(w + gtilde_i), F2_eff(i, g) = F2(g + grad gtilde_i).
struct BoundNonlinearity {
    const NonlinearitySpec* F = nullptr;
    const CVec* val_offset = nullptr;
    const std::vector<CVec>* grad_offset = nullptr;

    cplx f1(size_t i, cplx z) const {
        return F->eval(z + (val_offset ? (*val_offset)[i] : cplx{}));
    }
    cplx f2(size_t i, const cplx* g, int dim) const {
        if (!F->has_grad()) return {};
        if (!grad_offset) return F->eval_grad(g, dim);
        std::array<cplx, 2> shifted{};
        for (int d = 0; d < dim; ++d)
            shifted[static_cast<size_t>(d)] = g[d] + (*grad_offset)[static_cast<size_t>(d)][i];
        return F->eval_grad(shifted.data(), dim);
    }
};

class PicardEngine {
  public:
    PicardEngine(const Chart& chart, BcKind bc, double shift, const NonlinearitySpec& F,
                 const Tolerances& tol, CVec forcing, BoundNonlinearity bound,
                 const CVec* direct_boundary_data)
        : chart_(&chart),
          bc_(bc),
          shift_(shift),
          F_(&F),
          tol_(tol),
          forcing_(std::move(forcing)),
          bound_(bound),
          bdata_(direct_boundary_data),
          op_(assemble_operator(chart, bc, shift)) {
        bound_.F = &F;
        const DiscreteOperator op0 = shift == 0.0 ? op_ : assemble_operator(chart, bc, 0.0);
        const EigenMode mode =
            bc == BcKind::neumann ? EigenMode::neumann_nonzero : EigenMode::dirichlet;
        spec_ = smallest_eigenvalue(op0, mode);
        c_eff_ = 1.0 / std::sqrt(spec_.lambda1 + shift);
        rho_ = F.declared_C1 * c_eff_ * c_eff_ + F.declared_C2 * c_eff_;
        if (!(rho_ < 1.0))
            throw CertificateError(rho_, "contraction certificate failed: rho = C1*C^2 + C2*C = " +
                                             std::to_string(rho_) + " >= 1, refusing to iterate");
        solver_.emplace(op_, tol_.inner_tol);
    }

    double rho() const { return rho_; }
    const SpectralReport& spectral() const { return spec_; }
    const DiscreteOperator& op() const { return op_; }

    // init == nullptr: u0 solves the linear problem with the nonlinearity
    // normalized to vanish at zero (u0 = L^{-1}(f - F_eff(0))).
    std::pair<Field, IterationReport> run(const CVec* init) const {
        const size_t n = static_cast<size_t>(op_.n);
        IterationReport rep;
        rep.lambda1 = spec_.lambda1;
        rep.poincare_constant = c_eff_;
        rep.rho_certified = rho_;

        Field u = make_field(*chart_, bc_);
        if (bdata_ != nullptr) u.bc_data = *bdata_;
        if (init != nullptr) {
            u.values = *init;
        } else {
            u.values = solve_step(make_field(*chart_, bc_), nullptr);
        }
        check_declared_lipschitz(u);

        double prev_diff = 0.0;
        for (int k = 1; k <= tol_.max_iters; ++k) {
            CVec next = solve_step(u, &u);
            Field d = make_field(*chart_, bc_ == BcKind::neumann ? BcKind::neumann : BcKind::dirichlet_zero);
            for (size_t i = 0; i < n; ++i) d.values[i] = next[i] - u.values[i];
            const double en = std::abs(inner_product(*chart_, d, d, IpKind::energy));
            const double l2 = shift_ > 0.0 ? std::abs(inner_product(*chart_, d, d, IpKind::l2)) : 0.0;
            const double diff = std::sqrt(en + shift_ * l2);
            StepRecord rec;
            rec.k = k;
            rec.energy_diff = diff;
            if (k >= 2 && prev_diff > 0.0) rec.ratio = diff / prev_diff;
            rep.steps.push_back(rec);
            u.values = std::move(next);
            rep.iterations = k;
            prev_diff = diff;
            if (diff <= tol_.picard_tol) {
                rep.converged = true;
                break;
            }
        }
        if (bc_ == BcKind::neumann) u.mean_zero = true;
        return {std::move(u), std::move(rep)};
    }

    // u0 = L^{-1} f without the F(0) normalization (uniqueness probe).
    CVec plain_first_solve() const { return solver_->solve(forcing_, bdata_).first; }

    double shifted_energy_distance(const Field& a, const Field& b) const {
        Field d = make_field(*chart_, bc_ == BcKind::neumann ? BcKind::neumann : BcKind::dirichlet_zero);
        for (size_t i = 0; i < d.values.size(); ++i) d.values[i] = a.values[i] - b.values[i];
        const double en = std::abs(inner_product(*chart_, d, d, IpKind::energy));
        const double l2 = shift_ > 0.0 ? std::abs(inner_product(*chart_, d, d, IpKind::l2)) : 0.0;
        return std::sqrt(en + shift_ * l2);
    }

  private:
    // One linear solve with the nonlinearity frozen at w.
    CVec solve_step(const Field& w, const Field* w_for_grad) const {
        const size_t n = static_cast<size_t>(op_.n);
        CVec rhs(n);
        if (F_->has_grad() || bound_.grad_offset != nullptr) {
            GradientField g = w_for_grad != nullptr
                                  ? gradient(*w_for_grad)
                                  : GradientField{chart_, bc_,
                                                  std::vector<CVec>(static_cast<size_t>(chart_->dim),
                                                                    CVec(n, cplx{}))};
            std::array<cplx, 2> gi{};
            for (size_t i = 0; i < n; ++i) {
                for (int d = 0; d < chart_->dim; ++d) gi[static_cast<size_t>(d)] = g.comp[static_cast<size_t>(d)][i];
                rhs[i] = forcing_[i] - bound_.f1(i, w.values[i]) - bound_.f2(i, gi.data(), chart_->dim);
            }
        } else {
            for (size_t i = 0; i < n; ++i) rhs[i] = forcing_[i] - bound_.f1(i, w.values[i]);
        }
        return solver_->solve(rhs, bdata_).first;
    }

    // Necessary-condition probe of the declared constants around the first
    // iterate's scale; a sampled violation is a configuration error.
    void check_declared_lipschitz(const Field& u0) const {
        double scale = 0.0;
        for (size_t i = 0; i < u0.values.size(); ++i) {
            const cplx z = u0.values[i] + (bound_.val_offset ? (*bound_.val_offset)[i] : cplx{});
            scale = std::max(scale, std::abs(z));
        }
        const double radius = scale > 0.0 ? 10.0 * scale : 1.0;
        const double s1 = sample_lipschitz(*F_, 512, radius);
        if (s1 > F_->declared_C1 * (1.0 + 1e-9))
            throw ConfigError("declared C1 violated by sampling: sampled " + std::to_string(s1) +
                              " > declared " + std::to_string(F_->declared_C1));
        if (F_->has_grad()) {
            const double s2 = sample_lipschitz_grad(*F_, chart_->dim, 512, radius);
            if (s2 > F_->declared_C2 * (1.0 + 1e-9))
                throw ConfigError("declared C2 violated by sampling: sampled " + std::to_string(s2) +
                                  " > declared " + std::to_string(F_->declared_C2));
        }
    }

    const Chart* chart_;
    BcKind bc_;
    double shift_;
    const NonlinearitySpec* F_;
    Tolerances tol_;
    CVec forcing_;
    BoundNonlinearity bound_;
    const CVec* bdata_;
    DiscreteOperator op_;
    SpectralReport spec_;
    double c_eff_ = 0.0, rho_ = 0.0;
    mutable std::optional<PoissonSolver> solver_;
};

}  // namespace detail

// Discrete strong-form residual ||op(u) + F(u) + F2(grad u) - f||_l2 scaled
// by max(||f||_l2, 1). For Neumann problems the defect is projected to the
// weighted mean-zero complement first (the weak form tests against
// mean-zero functions only); the removed mean is available separately.
inline double residual(const ProblemSpec& p, const Field& u, double* removed_mean = nullptr) {
    const DiscreteOperator op = assemble_operator(*p.chart, p.bc, p.shift);
    CVec defect = op.apply(u);
    const GradientField g = gradient(u);
    std::array<cplx, 2> gi{};
    for (size_t i = 0; i < defect.size(); ++i) {
        for (int d = 0; d < p.chart->dim; ++d) gi[static_cast<size_t>(d)] = g.comp[static_cast<size_t>(d)][i];
        defect[i] += p.F.eval(u.values[i]) + p.F.eval_grad(gi.data(), p.chart->dim) - p.forcing.values[i];
    }
    Field df = make_field(*p.chart, p.bc == BcKind::neumann ? BcKind::neumann : BcKind::dirichlet_zero);
    df.values = std::move(defect);
    if (p.bc == BcKind::neumann) {
        const cplx m = weighted_mean(df);
        if (removed_mean != nullptr) *removed_mean = std::abs(m);
        for (auto& v : df.values) v -= m;
    } else if (removed_mean != nullptr) {
        *removed_mean = 0.0;
    }
    const double fnorm = norm_l2(*p.chart, p.forcing);
    return norm_l2(*p.chart, df) / std::max(fnorm, 1.0);
}

// Rewrites a dirichlet_data problem as a zero-boundary one via u = w + g:
// forcing becomes f - (-Delta_h g) - xi g (interior stencil with g's
// boundary values) and the nonlinearity is translated by g, which preserves
// the Lipschitz constants. After solving, u = w + g.
struct LiftedProblem {
    ProblemSpec zero_bc;
    CVec offset_values;                // g at interior nodes
    std::vector<CVec> offset_grad;     // grad g per axis at interior nodes
    Field gtilde;
};

inline LiftedProblem lift_boundary(const ProblemSpec& p) {
    if (p.bc != BcKind::dirichlet_data)
        throw ConfigError("lift_boundary: problem is not dirichlet_data");
    if (p.boundary_data.chart != p.chart || p.boundary_data.bc != BcKind::dirichlet_data ||
        p.boundary_data.bc_data.size() != p.chart->boundary_nodes.size())
        throw ConfigError("lift_boundary: missing or malformed boundary data extension");
    LiftedProblem L;
    L.gtilde = p.boundary_data;
    const DiscreteOperator op_d = assemble_operator(*p.chart, BcKind::dirichlet_data, 0.0);
    const CVec ag = op_d.apply(p.boundary_data);
    L.zero_bc = p;
    L.zero_bc.bc = BcKind::dirichlet_zero;
    L.zero_bc.boundary_data = Field{};
    L.zero_bc.forcing = make_field(*p.chart, BcKind::dirichlet_zero);
    for (size_t i = 0; i < ag.size(); ++i)
        L.zero_bc.forcing.values[i] =
            p.forcing.values[i] - ag[i] - p.shift * p.boundary_data.values[i];
    L.offset_values = p.boundary_data.values;
    const GradientField gg = gradient(p.boundary_data);
    L.offset_grad = gg.comp;
    return L;
}

inline std::pair<Field, IterationReport> picard_solve(const ProblemSpec& p) {
    if (p.chart == nullptr) throw ConfigError("picard_solve: no chart");
    if (p.forcing.values.size() != static_cast<size_t>(active_count(*p.chart, p.bc)))
        throw ConfigError("picard_solve: forcing size does not match the boundary condition");
    if (p.shift < 0.0) throw ConfigError("picard_solve: shift must be nonnegative");

    if (p.bc == BcKind::dirichlet_data) {
        LiftedProblem L = lift_boundary(p);
        detail::BoundNonlinearity bound;
        bound.val_offset = &L.offset_values;
        bound.grad_offset = &L.offset_grad;
        detail::PicardEngine engine(*p.chart, BcKind::dirichlet_zero, p.shift, p.F, p.tol,
                                    L.zero_bc.forcing.values, bound, nullptr);
        auto [w, rep] = engine.run(nullptr);
        Field u = make_field(*p.chart, BcKind::dirichlet_data);
        for (size_t i = 0; i < u.values.size(); ++i) u.values[i] = w.values[i] + L.offset_values[i];
        u.bc_data = L.gtilde.bc_data;
        rep.final_residual = residual(p, u);
        if (p.tol.uniqueness_probe) {
            const CVec init_a = engine.plain_first_solve();
            const CVec init_b(w.values.size(), cplx{});
            auto [ua, ra] = engine.run(&init_a);
            auto [ub, rb] = engine.run(&init_b);
            rep.uniqueness_check = engine.shifted_energy_distance(ua, ub);
        }
        return {std::move(u), std::move(rep)};
    }

    detail::PicardEngine engine(*p.chart, p.bc, p.shift, p.F, p.tol, p.forcing.values, {}, nullptr);
    auto [u, rep] = engine.run(nullptr);
    rep.final_residual = residual(p, u);
    if (p.tol.uniqueness_probe) {
        const CVec init_a = engine.plain_first_solve();
        const CVec init_b(u.values.size(), cplx{});
        auto [ua, ra] = engine.run(&init_a);
        auto [ub, rb] = engine.run(&init_b);
        rep.uniqueness_check = engine.shifted_energy_distance(ua, ub);
    }
    return {std::move(u), std::move(rep)};
}

// Independent route for dirichlet_data problems: keep the boundary values in
// every linear solve instead of lifting. Cross-checks lift_boundary.
inline std::pair<Field, IterationReport> picard_solve_direct_bc(const ProblemSpec& p) {
    if (p.bc != BcKind::dirichlet_data)
        throw ConfigError("picard_solve_direct_bc: problem is not dirichlet_data");
    if (p.boundary_data.bc_data.size() != p.chart->boundary_nodes.size())
        throw ConfigError("picard_solve_direct_bc: missing boundary data");
    detail::PicardEngine engine(*p.chart, BcKind::dirichlet_data, p.shift, p.F, p.tol,
                                p.forcing.values, {}, &p.boundary_data.bc_data);
    auto [u, rep] = engine.run(nullptr);
    rep.final_residual = residual(p, u);
    return {std::move(u), std::move(rep)};
}

// Standing-wave reduction u(t,x) = e^{i xi t} Q(x): Schroedinger gives
// -Delta Q + xi Q + F(Q) = 0, the wave equation the same with xi^2.
inline ProblemSpec standing_wave_problem(double xi, const NonlinearitySpec& F, const Field& g,
                                         const Chart& chart, bool wave_mode = false) {
    if (xi < 0.0) throw ConfigError("standing_wave_problem: xi must be nonnegative");
    ProblemSpec p;
    p.chart = &chart;
    p.bc = BcKind::dirichlet_data;
    p.boundary_data = g;
    p.forcing = make_field(chart, BcKind::dirichlet_data);
    p.F = F;
    p.shift = wave_mode ? xi * xi : xi;
    return p;
}

struct GlueDiagnostics {
    double d1 = 0.0, d2 = 0.0;  // per-arc Poincare constants
    double rho = 0.0;           // C1*C^2 + C2*C with C = max(d1, d2)
    double overlap_mismatch = 0.0;
    std::array<double, 2> interface_value_jump{};
    std::array<double, 2> interface_derivative_jump{};
    double residual_away = 0.0;
    int iterations1 = 0, iterations2 = 0;
    bool converged = false;
};

// Two-chart solve on the circle: Dirichlet on U1 with artificial data h,
// then on U2 with data read from u1, glued by the case split
// v = u1 on U1 minus the overlap closure, u1 at the U2 boundary nodes, and
// u2 elsewhere. Experimental: diagnostics only for nonzero F.
inline std::pair<CVec, GlueDiagnostics> glue_circle_solve(const CircleCover& cover,
                                                          const CVec& f_circle,
                                                          const NonlinearitySpec& F,
                                                          std::pair<cplx, cplx> h,
                                                          Tolerances tol = {}) {
    if (f_circle.size() != static_cast<size_t>(cover.n_circle))
        throw ConfigError("glue_circle_solve: forcing size must match the circle");
    if (F.has_grad())
        throw ConfigError("glue_circle_solve: gradient nonlinearities are not supported on the circle");
    const int n = cover.n_circle;

    GlueDiagnostics diag;
    {
        const DiscreteOperator op1 = assemble_operator(cover.arc1, BcKind::dirichlet_zero, 0.0);
        const DiscreteOperator op2 = assemble_operator(cover.arc2, BcKind::dirichlet_zero, 0.0);
        diag.d1 = smallest_eigenvalue(op1, EigenMode::dirichlet).poincare_constant;
        diag.d2 = smallest_eigenvalue(op2, EigenMode::dirichlet).poincare_constant;
    }
    const double c = std::max(diag.d1, diag.d2);
    diag.rho = F.declared_C1 * c * c + F.declared_C2 * c;
    if (!(diag.rho < 1.0))
        throw CertificateError(diag.rho, "glue_circle_solve: certificate failed on an arc");

    auto arc_local = [&](const std::vector<int>& index_map) {
        std::vector<int> inv(static_cast<size_t>(n), -1);
        for (size_t k = 0; k < index_map.size(); ++k) inv[static_cast<size_t>(index_map[k])] = static_cast<int>(k);
        return inv;
    };
    const std::vector<int> local1 = arc_local(cover.arc1_circle_index);
    const std::vector<int> local2 = arc_local(cover.arc2_circle_index);

    auto solve_arc = [&](const Chart& arc, const std::vector<int>& circle_index, cplx left,
                         cplx right, IterationReport& rep_out) {
        ProblemSpec p;
        p.chart = &arc;
        p.bc = BcKind::dirichlet_data;
        p.tol = tol;
        p.F = F;
        const double t0 = arc.coords.front()[0], t1 = arc.coords.back()[0];
        p.boundary_data = sample_field(arc, BcKind::dirichlet_data, [&](double t, double) {
            return left + (right - left) * ((t - t0) / (t1 - t0));
        });
        p.forcing = make_field(arc, BcKind::dirichlet_data);
        const auto fwd = active_to_full(arc, BcKind::dirichlet_data);
        for (size_t a = 0; a < fwd.size(); ++a)
            p.forcing.values[a] = f_circle[static_cast<size_t>(circle_index[static_cast<size_t>(fwd[a])])];
        auto [u, rep] = picard_solve(p);
        rep_out = rep;
        return full_values(u);
    };

    IterationReport rep1, rep2;
    const CVec u1 = solve_arc(cover.arc1, cover.arc1_circle_index, h.first, h.second, rep1);

    const int half = n / 2, m = cover.m;
    const int b_left = cover.wrap(half - m), b_right = cover.wrap(m);  // boundary of U2
    const cplx g_left = u1[static_cast<size_t>(local1[static_cast<size_t>(b_left)])];
    const cplx g_right = u1[static_cast<size_t>(local1[static_cast<size_t>(b_right)])];
    const CVec u2 = solve_arc(cover.arc2, cover.arc2_circle_index, g_left, g_right, rep2);

    diag.iterations1 = rep1.iterations;
    diag.iterations2 = rep2.iterations;
    diag.converged = rep1.converged && rep2.converged;

    CVec v(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const bool exclusive1 = j > m && j < half - m;
        const bool interface = j == b_left || j == b_right;
        if (exclusive1 || interface)
            v[static_cast<size_t>(j)] = u1[static_cast<size_t>(local1[static_cast<size_t>(j)])];
        else
            v[static_cast<size_t>(j)] = u2[static_cast<size_t>(local2[static_cast<size_t>(j)])];
    }

    for (const int j : cover.overlap_equator)
        diag.overlap_mismatch = std::max(diag.overlap_mismatch,
                                         std::abs(u1[static_cast<size_t>(local1[static_cast<size_t>(j)])] -
                                                  u2[static_cast<size_t>(local2[static_cast<size_t>(j)])]));
    for (const int j : cover.overlap_origin)
        diag.overlap_mismatch = std::max(diag.overlap_mismatch,
                                         std::abs(u1[static_cast<size_t>(local1[static_cast<size_t>(j)])] -
                                                  u2[static_cast<size_t>(local2[static_cast<size_t>(j)])]));

    const std::array<int, 2> interfaces{b_left, b_right};
    for (size_t t = 0; t < 2; ++t) {
        const int j = interfaces[t];
        diag.interface_value_jump[t] =
            std::abs(u1[static_cast<size_t>(local1[static_cast<size_t>(j)])] -
                     u2[static_cast<size_t>(local2[static_cast<size_t>(j)])]);
        // second-order one-sided derivatives from each side of the interface
        auto at = [&](int k) { return v[static_cast<size_t>(cover.wrap(k))]; };
        const cplx left_d = (at(j - 2) - 4.0 * at(j - 1) + 3.0 * at(j)) / (2.0 * cover.h);
        const cplx right_d = (-3.0 * at(j) + 4.0 * at(j + 1) - at(j + 2)) / (2.0 * cover.h);
        diag.interface_derivative_jump[t] = std::abs(right_d - left_d);
    }

    double fmax = 0.0;
    for (const auto& fv : f_circle) fmax = std::max(fmax, std::abs(fv));
    for (int j = 0; j < n; ++j) {
        int dist = n;
        for (const int b : interfaces) {
            const int d = std::abs(j - b);
            dist = std::min({dist, d, n - d});
        }
        if (dist < 2) continue;
        const cplx stencil = (2.0 * v[static_cast<size_t>(j)] - v[static_cast<size_t>(cover.wrap(j - 1))] -
                              v[static_cast<size_t>(cover.wrap(j + 1))]) /
                             (cover.h * cover.h);
        diag.residual_away =
            std::max(diag.residual_away,
                     std::abs(stencil + F.eval(v[static_cast<size_t>(j)]) - f_circle[static_cast<size_t>(j)]) /
                         std::max(fmax, 1.0));
    }
    return {std::move(v), diag};
}

}  // namespace semilin
