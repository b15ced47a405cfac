// Command dispatch and artifact emission: solve / eigen / verify / sweep.
// Outputs are deterministic for a fixed config and seed: fixed key order,
// fixed float formatting, fixed row order.
#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "semilin/cli_exit.hpp"
#include "semilin/config.hpp"

namespace semilin {
namespace cli {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file " + path.string());
    os << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

inline std::string solution_csv(const Chart& chart, const Field& u) {
    const bool angular = chart.kind == ChartKind::metric_band || chart.kind == ChartKind::circle_arc;
    std::string out = chart.dim == 2 ? "x,y,re,im\n" : (angular ? "theta,re,im\n" : "x,re,im\n");
    const CVec full = full_values(u);
    for (int i = 0; i < chart.full_count(); ++i) {
        const auto& xy = chart.coords[static_cast<size_t>(i)];
        out += fmt(xy[0]);
        if (chart.dim == 2) out += "," + fmt(xy[1]);
        out += "," + fmt(full[static_cast<size_t>(i)].real()) + "," + fmt(full[static_cast<size_t>(i)].imag()) + "\n";
    }
    return out;
}

inline std::string circle_csv(const CircleCover& cover, const CVec& v) {
    std::string out = "theta,re,im\n";
    for (int j = 0; j < cover.n_circle; ++j)
        out += fmt(cover.theta(j)) + "," + fmt(v[static_cast<size_t>(j)].real()) + "," +
               fmt(v[static_cast<size_t>(j)].imag()) + "\n";
    return out;
}

inline json report_json(const IterationReport& rep) {
    json j;
    j["rho_certified"] = rep.rho_certified;
    j["lambda1"] = rep.lambda1;
    j["poincare_constant"] = rep.poincare_constant;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["final_residual"] = rep.final_residual;
    if (rep.uniqueness_check)
        j["uniqueness_check"] = *rep.uniqueness_check;
    else
        j["uniqueness_check"] = nullptr;
    j["max_ratio"] = rep.max_ratio();
    json steps = json::array();
    for (const auto& s : rep.steps) {
        json e;
        e["k"] = s.k;
        e["energy_diff"] = s.energy_diff;
        if (std::isfinite(s.ratio))
            e["ratio"] = s.ratio;
        else
            e["ratio"] = nullptr;
        steps.push_back(e);
    }
    j["steps"] = steps;
    return j;
}

inline std::string steps_csv(const IterationReport& rep) {
    std::string out = "k,energy_diff,ratio\n";
    for (const auto& s : rep.steps) {
        out += std::to_string(s.k) + "," + fmt(s.energy_diff) + ",";
        if (std::isfinite(s.ratio)) out += fmt(s.ratio);
        out += "\n";
    }
    return out;
}

inline json spectral_json(EigenMode mode, const SpectralReport& rep) {
    json j;
    j["mode"] = mode == EigenMode::dirichlet ? "dirichlet" : "neumann_nonzero";
    j["lambda1"] = rep.lambda1;
    j["poincare_constant"] = rep.poincare_constant;
    j["iterations"] = rep.iterations;
    j["residual"] = rep.residual;
    return j;
}

inline json glue_json(const GlueDiagnostics& d) {
    json j;
    j["d1"] = d.d1;
    j["d2"] = d.d2;
    j["rho"] = d.rho;
    j["overlap_mismatch"] = d.overlap_mismatch;
    j["interface_value_jump"] = {d.interface_value_jump[0], d.interface_value_jump[1]};
    j["interface_derivative_jump"] = {d.interface_derivative_jump[0], d.interface_derivative_jump[1]};
    j["residual_away"] = d.residual_away;
    j["iterations"] = {d.iterations1, d.iterations2};
    j["converged"] = d.converged;
    return j;
}

// ---------------------------------------------------------------------------
namespace detail_cli {

inline void maybe_dump_operator(const RunConfig& rc, const Chart& chart, double shift_eff,
                                const std::filesystem::path& out_dir) {
    if (rc.dump_operator.empty()) return;
    const DiscreteOperator op = assemble_operator(chart, rc.bc, shift_eff);
    std::ofstream os(out_dir / rc.dump_operator, std::ios::binary);
    if (!os) throw ConfigError("cannot open operator dump file");
    write_matrix_market(op, os);
}

inline int run_solve_circle(const RunConfig& rc, const std::filesystem::path& out_dir) {
    const CircleCover cover = build_circle_cover(rc.chart.n, rc.chart.overlap_fraction);
    CVec f(static_cast<size_t>(cover.n_circle), cplx{});
    if (rc.forcing.source == FieldSource::inline_values) {
        if (rc.forcing.values.size() != f.size())
            throw ConfigError("circle forcing: inline array must have one entry per circle node");
        f = rc.forcing.values;
    } else if (rc.forcing.source == FieldSource::tag) {
        for (int j = 0; j < cover.n_circle; ++j)
            f[static_cast<size_t>(j)] = eval_analytic_tag(rc.forcing.tag, cover.theta(j), 0.0);
    } else {
        throw ConfigError("circle forcing: manufactured forcing is not available on the circle");
    }

    std::pair<cplx, cplx> h{cplx{}, cplx{}};
    const int half = cover.n_circle / 2;
    const int left = cover.wrap(-cover.m), right = cover.wrap(half + cover.m);  // boundary of U1
    if (rc.boundary) {
        if (rc.boundary->source == FieldSource::inline_values) {
            if (rc.boundary->values.size() != 2)
                throw ConfigError("circle boundary: inline values must be the two arc endpoint values");
            h = {rc.boundary->values[0], rc.boundary->values[1]};
        } else if (rc.boundary->source == FieldSource::tag && rc.boundary->tag == "oracle_trace") {
            const CVec oracle = solve_circle_periodic(f, cover.h);
            h = {oracle[static_cast<size_t>(left)], oracle[static_cast<size_t>(right)]};
        } else if (rc.boundary->source == FieldSource::tag) {
            h = {eval_analytic_tag(rc.boundary->tag, cover.theta(-cover.m), 0.0),
                 eval_analytic_tag(rc.boundary->tag, cover.theta(half + cover.m), 0.0)};
        } else {
            throw ConfigError("circle boundary: use a tag, 'oracle_trace', or a two-entry value pair");
        }
    }

    auto [v, diag] = glue_circle_solve(cover, f, rc.F, h, rc.tol);
    write_text(out_dir / "solution.csv", circle_csv(cover, v));
    write_json(out_dir / "glue.json", glue_json(diag));
    return diag.converged ? exit_ok : exit_numerical;
}

inline int run_solve(const RunConfig& rc, const std::filesystem::path& out_dir) {
    if (rc.chart.kind == ChartCfgKind::circle) return run_solve_circle(rc, out_dir);
    const Chart chart = build_chart(rc.chart);
    const ProblemSpec p = build_problem(rc, chart);
    maybe_dump_operator(rc, chart, p.shift, out_dir);
    auto [u, rep] = picard_solve(p);
    write_text(out_dir / "solution.csv", solution_csv(chart, u));
    write_json(out_dir / "report.json", report_json(rep));
    write_text(out_dir / "steps.csv", steps_csv(rep));
    return rep.converged ? exit_ok : exit_numerical;
}

inline int run_eigen(const RunConfig& rc, const std::filesystem::path& out_dir) {
    const Chart chart = build_chart(rc.chart);
    const EigenMode mode = rc.eigen_mode.value_or(
        rc.bc == BcKind::neumann ? EigenMode::neumann_nonzero : EigenMode::dirichlet);
    const BcKind bc = mode == EigenMode::neumann_nonzero ? BcKind::neumann : BcKind::dirichlet_zero;
    const DiscreteOperator op = assemble_operator(chart, bc, 0.0);
    const SpectralReport rep = smallest_eigenvalue(op, mode);
    write_json(out_dir / "spectral.json", spectral_json(mode, rep));
    return exit_ok;
}

inline int run_verify(const RunConfig& rc, const std::filesystem::path& out_dir) {
    json checks = json::array();
    bool all_pass = true;
    auto push = [&](const std::string& name, int trials, double max_violation, bool pass) {
        json c;
        c["check_name"] = name;
        c["trials"] = trials;
        c["max_violation"] = max_violation;
        c["pass"] = pass;
        checks.push_back(c);
        all_pass = all_pass && pass;
    };

    {  // mean-zero cover decomposition invariants
        const CircleCover cover = build_circle_cover(128, 0.12);
        Rng rng(rc.seed + 1);
        double worst = 0.0;
        bool pass = true;
        const int trials = std::min(rc.verify_trials, 200);
        for (int t = 0; t < trials; ++t) {
            CVec u(static_cast<size_t>(cover.n_circle));
            for (auto& v : u) v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            cplx mean{};
            for (const auto& v : u) mean += v;
            mean /= static_cast<double>(cover.n_circle);
            double umax = 0.0;
            for (auto& v : u) {
                v -= mean;
                umax = std::max(umax, std::abs(v));
            }
            const CoverDecomposition dec = decompose_mean_zero(cover, u);
            double partition = 0.0, means = 0.0, leak = 0.0;
            for (int j = 0; j < cover.n_circle; ++j)
                partition = std::max(partition, std::abs(dec.parts[0][static_cast<size_t>(j)] +
                                                         dec.parts[1][static_cast<size_t>(j)] -
                                                         u[static_cast<size_t>(j)]));
            for (size_t i = 0; i < 2; ++i) {
                means = std::max(means, std::abs(circle_integral(dec.parts[i], cover.h)));
                std::vector<char> in(static_cast<size_t>(cover.n_circle), 0);
                for (const int j : dec.supports[i]) in[static_cast<size_t>(j)] = 1;
                for (int j = 0; j < cover.n_circle; ++j)
                    if (!in[static_cast<size_t>(j)])
                        leak = std::max(leak, std::abs(dec.parts[i][static_cast<size_t>(j)]));
            }
            worst = std::max({worst, partition, means, leak});
            pass = pass && partition <= 1e-14 * std::max(1.0, umax) && means <= 1e-12 && leak == 0.0;
        }
        push("decompose_mean_zero", trials, worst, pass);
    }

    {  // discrete Young inequality on the periodic grid
        const int n = 128;
        const double h = 2.0 * 3.14159265358979323846 / n;
        Rng rng(rc.seed + 2);
        double worst = -1e300;
        for (int t = 0; t < rc.verify_trials; ++t) {
            RVec f(static_cast<size_t>(n));
            CVec g(static_cast<size_t>(n));
            for (auto& v : f) v = rng.uniform();
            for (auto& v : g) v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            const YoungReport r = check_young(f, g, h);
            worst = std::max(worst, r.lhs - r.rhs * (1.0 + 1e-12));
        }
        push("young", rc.verify_trials, worst, worst <= 0.0);
    }

    {  // sampled Lipschitz constants never exceed the declared ones
        const std::vector<NonlinearitySpec> entries = {
            NonlinearitySpec::phase(1.0),       NonlinearitySpec::linear(cplx(0.7, 0.4)),
            NonlinearitySpec::sine_real(0.9),   NonlinearitySpec::saturating(1.3),
            NonlinearitySpec::modulus_type(1.1)};
        double worst = -1e300;
        for (size_t i = 0; i < entries.size(); ++i) {
            const double s = sample_lipschitz(entries[i], std::max(rc.verify_trials, 100), 3.0,
                                              rc.seed + 10 + i);
            worst = std::max(worst, s - entries[i].declared_C1 * (1.0 + 1e-9));
        }
        push("lipschitz_catalog", static_cast<int>(entries.size()), worst, worst <= 0.0);
    }

    {  // phase(1) sampling lands tightly under sqrt(2)
        const double s = sample_lipschitz(NonlinearitySpec::phase(1.0), 2000, 3.0, rc.seed + 20);
        const double lo = std::sqrt(2.0) - 0.05, hi = std::sqrt(2.0) + 1e-9;
        const double viol = std::max({0.0, lo - s, s - hi});
        push("lipschitz_phase_window", 2000, viol, viol == 0.0);
    }

    {  // discrete Poincare inequality, Dirichlet and mean-zero Neumann
        const Chart chart = build_interval_grid(63, 1.0);
        const PoincareCheck d = poincare_check(chart, BcKind::dirichlet_zero, rc.verify_trials, rc.seed + 3);
        push("poincare_dirichlet", d.trials, d.max_violation, d.pass);
        const PoincareCheck nm = poincare_check(chart, BcKind::neumann, rc.verify_trials, rc.seed + 4);
        push("poincare_neumann", nm.trials, nm.max_violation, nm.pass);
    }

    write_json(out_dir / "verify.json", checks);
    return all_pass ? exit_ok : exit_numerical;
}

inline NonlinearitySpec rebind_alpha(const NonlinearitySpec& base, double alpha) {
    NonlinearitySpec F;
    switch (base.f_kind) {
        case FKind::phase: F = NonlinearitySpec::phase(alpha); break;
        case FKind::sine_real: F = NonlinearitySpec::sine_real(alpha); break;
        case FKind::saturating: F = NonlinearitySpec::saturating(alpha); break;
        case FKind::modulus_type: F = NonlinearitySpec::modulus_type(alpha); break;
        case FKind::linear: F = NonlinearitySpec::linear(cplx(alpha, 0.0)); break;
        case FKind::zero:
            throw ConfigError("sweep: the zero nonlinearity has no parameter to sweep");
    }
    F.grad_kind = base.grad_kind;
    F.b = base.b;
    F.grad_alpha = base.grad_alpha;
    F.declared_C2 = base.declared_C2;
    return F;
}

inline int run_sweep(const RunConfig& rc, const std::filesystem::path& out_dir) {
    const Chart chart = build_chart(rc.chart);
    struct Row {
        double alpha = 0.0;
        double rho = 0.0;
        int iterations = 0;
        std::string status;  // "true" / "false" / "refused" / "failed"
        double max_ratio = 0.0;
        bool has_ratio = false;
    };
    std::vector<Row> rows(rc.sweep_values.size());

    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = cursor.fetch_add(1);
            if (i >= rc.sweep_values.size()) return;
            Row& row = rows[i];
            row.alpha = rc.sweep_values[i];
            try {
                RunConfig point = rc;
                point.F = rebind_alpha(rc.F, row.alpha);
                const ProblemSpec p = build_problem(point, chart);
                auto [u, rep] = picard_solve(p);
                row.rho = rep.rho_certified;
                row.iterations = rep.iterations;
                row.status = rep.converged ? "true" : "false";
                row.max_ratio = rep.max_ratio();
                row.has_ratio = true;
            } catch (const CertificateError& e) {
                row.rho = e.rho;
                row.status = "refused";
            } catch (const NumericalError&) {
                row.status = "failed";
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t + 1 < hw && t + 1 < rc.sweep_values.size(); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::string csv = "alpha,rho,iterations,converged,max_ratio\n";
    bool failed = false;
    for (const auto& row : rows) {
        csv += fmt(row.alpha) + "," + fmt(row.rho) + "," + std::to_string(row.iterations) + "," +
               row.status + ",";
        if (row.has_ratio) csv += fmt(row.max_ratio);
        csv += "\n";
        failed = failed || row.status == "failed" || row.status == "false";
    }
    write_text(out_dir / "sweep.csv", csv);
    return failed ? exit_numerical : exit_ok;
}

}  // namespace detail_cli

// Dispatch a parsed configuration. Writes artifacts into out_dir and maps
// error classes onto the exit-code contract.
inline int dispatch(const json& config_json, const std::string& out_dir,
                    std::optional<std::uint64_t> seed_override = std::nullopt) {
    try {
        RunConfig rc = parse_config(config_json);
        if (seed_override) rc.seed = *seed_override;
        std::filesystem::create_directories(out_dir);
        if (rc.command == "solve") return detail_cli::run_solve(rc, out_dir);
        if (rc.command == "eigen") return detail_cli::run_eigen(rc, out_dir);
        if (rc.command == "verify") return detail_cli::run_verify(rc, out_dir);
        return detail_cli::run_sweep(rc, out_dir);
    } catch (const CertificateError& e) {
        std::cerr << "certificate refusal: " << e.what() << "\n";
        return exit_certificate;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
}

// Entry point used by the tool: reads and parses the config file.
inline int run(const std::string& config_path, const std::string& out_dir,
               std::optional<std::uint64_t> seed_override = std::nullopt) {
    json config_json;
    try {
        std::ifstream is(config_path, std::ios::binary);
        if (!is) {
            std::cerr << "config error: cannot open " << config_path << "\n";
            return exit_config;
        }
        config_json = json::parse(is);
    } catch (const json::parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    return dispatch(config_json, out_dir, seed_override);
}

}  // namespace cli
}  // namespace semilin
