// JSON run configuration: schema-validated parsing (unknown keys rejected)
// and construction of charts, fields and problems from their descriptions.
#pragma once

#include <json.hpp>

#include <optional>
#include <set>
#include <string>

#include "semilin/picard.hpp"
#include "semilin/verify.hpp"

namespace semilin {

using json = nlohmann::ordered_json;

namespace cfg {

inline void check_keys(const json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items())
        if (ok.find(item.key()) == ok.end())
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <class T>
inline T require(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

template <class T>
inline T get_or(const json& j, const std::string& where, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

}  // namespace cfg

// ---------------------------------------------------------------------------
// Chart description (the serializable form used in configs).
enum class ChartCfgKind { interval, rectangle, metric_band, circle };

struct ChartConfig {
    ChartCfgKind kind = ChartCfgKind::interval;
    int n = 0, nx = 0, ny = 0;
    double length = 1.0, lx = 1.0, ly = 1.0;
    double theta_min = 0.0, theta_max = 0.0;
    double overlap_fraction = 0.0;
};

inline ChartConfig chart_config_from_json(const json& j) {
    const std::string where = "problem.chart";
    const std::string kind = cfg::require<std::string>(j, where, "kind");
    ChartConfig c;
    if (kind == "interval") {
        cfg::check_keys(j, where, {"kind", "n", "length"});
        c.kind = ChartCfgKind::interval;
        c.n = cfg::require<int>(j, where, "n");
        c.length = cfg::get_or(j, where, "length", 1.0);
    } else if (kind == "rectangle") {
        cfg::check_keys(j, where, {"kind", "nx", "ny", "lx", "ly"});
        c.kind = ChartCfgKind::rectangle;
        c.nx = cfg::require<int>(j, where, "nx");
        c.ny = cfg::require<int>(j, where, "ny");
        c.lx = cfg::get_or(j, where, "lx", 1.0);
        c.ly = cfg::get_or(j, where, "ly", 1.0);
    } else if (kind == "metric_band") {
        cfg::check_keys(j, where, {"kind", "n", "theta_min", "theta_max"});
        c.kind = ChartCfgKind::metric_band;
        c.n = cfg::require<int>(j, where, "n");
        c.theta_min = cfg::require<double>(j, where, "theta_min");
        c.theta_max = cfg::require<double>(j, where, "theta_max");
    } else if (kind == "circle") {
        cfg::check_keys(j, where, {"kind", "n", "overlap_fraction"});
        c.kind = ChartCfgKind::circle;
        c.n = cfg::require<int>(j, where, "n");
        c.overlap_fraction = cfg::require<double>(j, where, "overlap_fraction");
    } else {
        throw ConfigError(where + ".kind: unknown chart kind '" + kind + "'");
    }
    return c;
}

inline json chart_config_to_json(const ChartConfig& c) {
    json j;
    switch (c.kind) {
        case ChartCfgKind::interval:
            j["kind"] = "interval";
            j["n"] = c.n;
            j["length"] = c.length;
            break;
        case ChartCfgKind::rectangle:
            j["kind"] = "rectangle";
            j["nx"] = c.nx;
            j["ny"] = c.ny;
            j["lx"] = c.lx;
            j["ly"] = c.ly;
            break;
        case ChartCfgKind::metric_band:
            j["kind"] = "metric_band";
            j["n"] = c.n;
            j["theta_min"] = c.theta_min;
            j["theta_max"] = c.theta_max;
            break;
        case ChartCfgKind::circle:
            j["kind"] = "circle";
            j["n"] = c.n;
            j["overlap_fraction"] = c.overlap_fraction;
            break;
    }
    return j;
}

inline Chart build_chart(const ChartConfig& c) {
    switch (c.kind) {
        case ChartCfgKind::interval: return build_interval_grid(c.n, c.length);
        case ChartCfgKind::rectangle: return build_rectangle_grid(c.nx, c.ny, c.lx, c.ly);
        case ChartCfgKind::metric_band: return build_metric_band(c.n, c.theta_min, c.theta_max);
        case ChartCfgKind::circle:
            throw ConfigError("circle charts build a cover, not a single chart");
    }
    throw ConfigError("unreachable chart kind");
}

// ---------------------------------------------------------------------------
// Field descriptions: an analytic tag, a manufactured forcing, or inline
// node values.
enum class FieldSource { tag, manufactured, inline_values };

struct FieldSpecConfig {
    FieldSource source = FieldSource::tag;
    std::string tag = "zero";
    StarTag star = StarTag::sin_pi_x;
    CVec values;
};

inline cplx eval_analytic_tag(const std::string& tag, double x, double y) {
    constexpr double pi = 3.14159265358979323846;
    if (tag == "zero") return {};
    if (tag == "one") return {1.0, 0.0};
    if (tag == "x") return {x, 0.0};
    if (tag == "sin_pi_x") return {std::sin(pi * x), 0.0};
    if (tag == "cos_pi_x") return {std::cos(pi * x), 0.0};
    if (tag == "sinh_2x") return {std::sinh(2.0 * x), 0.0};
    if (tag == "cos_theta") return {std::cos(x), 0.0};
    if (tag == "sin_theta") return {std::sin(x), 0.0};
    (void)y;
    throw ConfigError("unknown analytic tag '" + tag + "'");
}

inline StarTag parse_star_tag(const std::string& s) {
    if (s == "sin_pi_x") return StarTag::sin_pi_x;
    if (s == "sin_pi_xy") return StarTag::sin_pi_xy;
    if (s == "cos_theta") return StarTag::cos_theta;
    if (s == "band_poly") return StarTag::band_poly;
    throw ConfigError("unknown manufactured solution tag '" + s + "'");
}

inline FieldSpecConfig field_spec_from_json(const json& j, const std::string& where) {
    FieldSpecConfig f;
    cfg::check_keys(j, where, {"tag", "manufactured", "values"});
    const int given = (j.contains("tag") ? 1 : 0) + (j.contains("manufactured") ? 1 : 0) +
                      (j.contains("values") ? 1 : 0);
    if (given != 1)
        throw ConfigError(where + ": give exactly one of 'tag', 'manufactured', 'values'");
    if (j.contains("tag")) {
        f.source = FieldSource::tag;
        f.tag = j.at("tag").get<std::string>();
        // "oracle_trace" is resolved by the circle solve; everything else is
        // an analytic tag, validated early.
        if (f.tag != "oracle_trace") eval_analytic_tag(f.tag, 0.0, 0.0);
    } else if (j.contains("manufactured")) {
        f.source = FieldSource::manufactured;
        f.star = parse_star_tag(j.at("manufactured").get<std::string>());
    } else {
        f.source = FieldSource::inline_values;
        const auto& arr = j.at("values");
        if (!arr.is_array()) throw ConfigError(where + ".values: expected an array of [re, im]");
        for (const auto& e : arr) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError(where + ".values: entries must be [re, im] pairs");
            f.values.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;
    std::string dump_operator;  // optional .mtx path (relative to the output dir)

    ChartConfig chart;
    BcKind bc = BcKind::dirichlet_zero;
    FieldSpecConfig forcing;
    std::optional<FieldSpecConfig> boundary;
    NonlinearitySpec F;
    double shift = 0.0;
    bool wave_mode = false;
    Tolerances tol;

    std::optional<EigenMode> eigen_mode;
    int verify_trials = 1000;
    std::vector<double> sweep_values;
};

inline NonlinearitySpec nonlinearity_from_json(const json& j) {
    const std::string where = "problem.nonlinearity";
    cfg::check_keys(j, where, {"kind", "alpha", "a", "grad_kind", "b", "grad_alpha"});
    const std::string kind = cfg::require<std::string>(j, where, "kind");
    NonlinearitySpec F;
    if (kind == "zero") {
        F = NonlinearitySpec::zero();
    } else if (kind == "linear") {
        const auto& a = j.at("a");
        if (!a.is_array() || a.size() != 2) throw ConfigError(where + ".a: expected [re, im]");
        F = NonlinearitySpec::linear(cplx(a.at(0).get<double>(), a.at(1).get<double>()));
    } else {
        const double alpha = cfg::require<double>(j, where, "alpha");
        if (kind == "phase") F = NonlinearitySpec::phase(alpha);
        else if (kind == "sine_real") F = NonlinearitySpec::sine_real(alpha);
        else if (kind == "saturating") F = NonlinearitySpec::saturating(alpha);
        else if (kind == "modulus_type") F = NonlinearitySpec::modulus_type(alpha);
        else throw ConfigError(where + ".kind: unknown nonlinearity '" + kind + "'");
    }
    if (j.contains("grad_kind")) {
        const std::string gk = j.at("grad_kind").get<std::string>();
        if (gk == "linear_combo") {
            const auto& b = j.at("b");
            if (!b.is_array()) throw ConfigError(where + ".b: expected an array of [re, im]");
            CVec coeffs;
            for (const auto& e : b) coeffs.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
            F.with_linear_combo(std::move(coeffs));
        } else if (gk == "saturating_grad") {
            F.with_saturating_grad(cfg::require<double>(j, where, "grad_alpha"), 2);
        } else {
            throw ConfigError(where + ".grad_kind: unknown kind '" + gk + "'");
        }
    }
    return F;
}

inline RunConfig parse_config(const json& root) {
    cfg::check_keys(root, "config",
                    {"command", "seed", "dump_operator", "problem", "eigen", "verify", "sweep"});
    RunConfig rc;
    rc.command = cfg::require<std::string>(root, "config", "command");
    if (rc.command != "solve" && rc.command != "eigen" && rc.command != "verify" &&
        rc.command != "sweep")
        throw ConfigError("config.command: unknown command '" + rc.command + "'");
    rc.seed = cfg::get_or<std::uint64_t>(root, "config", "seed", 0);
    rc.dump_operator = cfg::get_or<std::string>(root, "config", "dump_operator", "");

    if (rc.command != "verify" || root.contains("problem")) {
        const json& p = cfg::require<json>(root, "config", "problem");
        cfg::check_keys(p, "problem",
                        {"chart", "bc", "forcing", "boundary", "nonlinearity", "shift", "wave_mode",
                         "picard_tol", "max_iters", "uniqueness_probe"});
        rc.chart = chart_config_from_json(cfg::require<json>(p, "problem", "chart"));
        const std::string bc = cfg::get_or<std::string>(p, "problem", "bc", "dirichlet_zero");
        if (bc == "dirichlet_zero") rc.bc = BcKind::dirichlet_zero;
        else if (bc == "dirichlet_data") rc.bc = BcKind::dirichlet_data;
        else if (bc == "neumann") rc.bc = BcKind::neumann;
        else throw ConfigError("problem.bc: unknown boundary condition '" + bc + "'");
        if (p.contains("forcing"))
            rc.forcing = field_spec_from_json(p.at("forcing"), "problem.forcing");
        if (p.contains("boundary"))
            rc.boundary = field_spec_from_json(p.at("boundary"), "problem.boundary");
        if (p.contains("nonlinearity")) rc.F = nonlinearity_from_json(p.at("nonlinearity"));
        rc.shift = cfg::get_or(p, "problem", "shift", 0.0);
        rc.wave_mode = cfg::get_or(p, "problem", "wave_mode", false);
        if (rc.shift < 0.0)
            throw ConfigError(rc.wave_mode ? "problem.shift: wave mode needs xi >= 0"
                                           : "problem.shift: xi must be nonnegative");
        rc.tol.picard_tol = cfg::get_or(p, "problem", "picard_tol", 1e-10);
        rc.tol.max_iters = cfg::get_or(p, "problem", "max_iters", 200);
        rc.tol.uniqueness_probe = cfg::get_or(p, "problem", "uniqueness_probe", false);
        if (rc.bc == BcKind::dirichlet_data && !rc.boundary)
            throw ConfigError("problem.boundary: required for dirichlet_data problems");
        if (rc.boundary && rc.bc != BcKind::dirichlet_data && rc.chart.kind != ChartCfgKind::circle)
            throw ConfigError("problem.boundary: only meaningful for dirichlet_data or circle charts");
    }
    if (root.contains("eigen")) {
        const json& e = root.at("eigen");
        cfg::check_keys(e, "eigen", {"mode"});
        const std::string m = cfg::get_or<std::string>(e, "eigen", "mode", "");
        if (m == "dirichlet") rc.eigen_mode = EigenMode::dirichlet;
        else if (m == "neumann_nonzero") rc.eigen_mode = EigenMode::neumann_nonzero;
        else if (!m.empty()) throw ConfigError("eigen.mode: unknown mode '" + m + "'");
    }
    if (root.contains("verify")) {
        const json& v = root.at("verify");
        cfg::check_keys(v, "verify", {"trials"});
        rc.verify_trials = cfg::get_or(v, "verify", "trials", 1000);
        if (rc.verify_trials < 1) throw ConfigError("verify.trials: must be positive");
    }
    if (root.contains("sweep")) {
        const json& s = root.at("sweep");
        cfg::check_keys(s, "sweep", {"parameter", "values", "from", "to", "count"});
        const std::string param = cfg::get_or<std::string>(s, "sweep", "parameter", "alpha");
        if (param != "alpha") throw ConfigError("sweep.parameter: only 'alpha' is supported");
        if (s.contains("values")) {
            for (const auto& v : s.at("values")) rc.sweep_values.push_back(v.get<double>());
        } else {
            const double from = cfg::require<double>(s, "sweep", "from");
            const double to = cfg::require<double>(s, "sweep", "to");
            const int count = cfg::require<int>(s, "sweep", "count");
            if (count < 2) throw ConfigError("sweep.count: must be at least 2");
            for (int i = 0; i < count; ++i)
                rc.sweep_values.push_back(from + (to - from) * i / (count - 1));
        }
        if (rc.sweep_values.empty()) throw ConfigError("sweep: no parameter values given");
    } else if (rc.command == "sweep") {
        throw ConfigError("config: command 'sweep' needs a 'sweep' section");
    }
    return rc;
}

// Builds an active-node field from its description.
inline Field build_field(const FieldSpecConfig& fs, const Chart& chart, BcKind bc,
                         const NonlinearitySpec& F, double shift) {
    switch (fs.source) {
        case FieldSource::tag:
            return sample_field(chart, bc,
                                [&](double x, double y) { return eval_analytic_tag(fs.tag, x, y); });
        case FieldSource::manufactured: return manufactured_rhs(chart, fs.star, F, shift, bc);
        case FieldSource::inline_values: {
            Field f = make_field(chart, bc);
            if (fs.values.size() == f.values.size()) {
                f.values = fs.values;
            } else if (bc == BcKind::dirichlet_data &&
                       fs.values.size() == static_cast<size_t>(chart.full_count())) {
                // inline full-grid array: split into interior and boundary parts
                const auto fwd = active_to_full(chart, bc);
                for (size_t a = 0; a < fwd.size(); ++a)
                    f.values[a] = fs.values[static_cast<size_t>(fwd[a])];
                for (size_t b = 0; b < chart.boundary_nodes.size(); ++b)
                    f.bc_data[b] = fs.values[static_cast<size_t>(chart.boundary_nodes[b])];
            } else {
                throw ConfigError("inline field values: wrong length for this chart/bc");
            }
            return f;
        }
    }
    throw ConfigError("unreachable field source");
}

// The boundary extension for dirichlet_data problems (interior + boundary).
inline Field build_boundary_extension(const FieldSpecConfig& fs, const Chart& chart) {
    if (fs.source == FieldSource::manufactured)
        return manufactured_solution(chart, fs.star, BcKind::dirichlet_data);
    return build_field(fs, chart, BcKind::dirichlet_data, NonlinearitySpec::zero(), 0.0);
}

inline ProblemSpec build_problem(const RunConfig& rc, const Chart& chart) {
    ProblemSpec p;
    p.chart = &chart;
    p.bc = rc.bc;
    p.F = rc.F;
    p.shift = rc.wave_mode ? rc.shift * rc.shift : rc.shift;
    p.tol = rc.tol;
    p.forcing = build_field(rc.forcing, chart, rc.bc, rc.F, p.shift);
    if (rc.bc == BcKind::dirichlet_data)
        p.boundary_data = build_boundary_extension(*rc.boundary, chart);
    return p;
}

}  // namespace semilin
