#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "semilin/cli.hpp"

using namespace semilin;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path("cli_test") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json trivial_solve_config() {
    json j;
    j["command"] = "solve";
    j["seed"] = 1;
    j["problem"]["chart"] = {{"kind", "interval"}, {"n", 31}, {"length", 1.0}};
    j["problem"]["bc"] = "dirichlet_zero";
    j["problem"]["forcing"] = {{"tag", "zero"}};
    j["problem"]["nonlinearity"] = {{"kind", "zero"}};
    return j;
}

}  // namespace

TEST_CASE("solve with zero data writes a zero solution and succeeds") {
    const fs::path out = fresh_dir("zero");
    REQUIRE(cli::dispatch(trivial_solve_config(), out.string()) == cli::exit_ok);
    const json rep = json::parse(slurp(out / "report.json"));
    REQUIRE(rep.at("converged").get<bool>());
    REQUIRE(rep.at("iterations").get<int>() == 1);
    REQUIRE(rep.at("final_residual").get<double>() <= 1e-12);
    const std::string csv = slurp(out / "solution.csv");
    REQUIRE(csv.rfind("x,re,im\n", 0) == 0);
    REQUIRE(csv.find("0.5,0,0") != std::string::npos);
    REQUIRE(slurp(out / "steps.csv").rfind("k,energy_diff,ratio\n", 0) == 0);
}

TEST_CASE("unknown config keys are rejected with the config exit code") {
    json j = trivial_solve_config();
    j["problem"]["nonlinearityy"] = {{"kind", "zero"}};
    REQUIRE(cli::dispatch(j, fresh_dir("badkey").string()) == cli::exit_config);

    json j2 = trivial_solve_config();
    j2["problem"]["chart"]["kindd"] = "interval";
    REQUIRE(cli::dispatch(j2, fresh_dir("badkey2").string()) == cli::exit_config);

    json j3 = trivial_solve_config();
    j3["command"] = "explode";
    REQUIRE(cli::dispatch(j3, fresh_dir("badcmd").string()) == cli::exit_config);
}

TEST_CASE("certificate refusal exits with its own code") {
    json j = trivial_solve_config();
    j["problem"]["nonlinearity"] = {{"kind", "linear"}, {"a", {50.0, 0.0}}};  // rho = 50/lambda1 > 1
    j["problem"]["forcing"] = {{"tag", "sin_pi_x"}};
    REQUIRE(cli::dispatch(j, fresh_dir("refuse").string()) == cli::exit_certificate);
}

TEST_CASE("iteration cap exhaustion exits with the numerical code") {
    json j = trivial_solve_config();
    j["problem"]["nonlinearity"] = {{"kind", "linear"}, {"a", {2.0, 0.0}}};
    j["problem"]["forcing"] = {{"tag", "sin_pi_x"}};
    j["problem"]["picard_tol"] = 1e-13;
    j["problem"]["max_iters"] = 1;
    const fs::path out = fresh_dir("exhaust");
    REQUIRE(cli::dispatch(j, out.string()) == cli::exit_numerical);
    const json rep = json::parse(slurp(out / "report.json"));
    REQUIRE_FALSE(rep.at("converged").get<bool>());
}

TEST_CASE("eigen command reports lambda1 near pi^2") {
    json j;
    j["command"] = "eigen";
    j["problem"]["chart"] = {{"kind", "interval"}, {"n", 511}, {"length", 1.0}};
    j["problem"]["bc"] = "dirichlet_zero";
    const fs::path out = fresh_dir("eigen");
    REQUIRE(cli::dispatch(j, out.string()) == cli::exit_ok);
    const json rep = json::parse(slurp(out / "spectral.json"));
    REQUIRE(rep.at("lambda1").get<double>() == Approx(9.8696).epsilon(0.01));
    REQUIRE(rep.at("mode").get<std::string>() == "dirichlet");
}

TEST_CASE("solve honors dirichlet data from the config") {
    json j = trivial_solve_config();
    j["problem"]["bc"] = "dirichlet_data";
    j["problem"]["boundary"] = {{"tag", "x"}};
    const fs::path out = fresh_dir("lifted");
    REQUIRE(cli::dispatch(j, out.string()) == cli::exit_ok);
    const std::string csv = slurp(out / "solution.csv");
    REQUIRE(csv.find("\n1,1,0\n") != std::string::npos);  // u(1) = 1
}

TEST_CASE("sweep marks refused parameter rows") {
    json j;
    j["command"] = "sweep";
    j["problem"]["chart"] = {{"kind", "interval"}, {"n", 63}, {"length", 1.0}};
    j["problem"]["bc"] = "dirichlet_zero";
    j["problem"]["forcing"] = {{"tag", "sin_pi_x"}};
    j["problem"]["nonlinearity"] = {{"kind", "phase"}, {"alpha", 0.5}};
    j["sweep"] = {{"parameter", "alpha"}, {"values", {0.5, 2.0, 8.0}}};
    const fs::path out = fresh_dir("sweep");
    REQUIRE(cli::dispatch(j, out.string()) == cli::exit_ok);
    const std::string csv = slurp(out / "sweep.csv");
    REQUIRE(csv.rfind("alpha,rho,iterations,converged,max_ratio\n", 0) == 0);
    REQUIRE(csv.find("refused") != std::string::npos);
    REQUIRE(csv.find("true") != std::string::npos);
    // rows appear in parameter order
    REQUIRE(csv.find("0.5,") < csv.find("\n2,"));
    REQUIRE(csv.find("\n2,") < csv.find("\n8,"));
    // rho column carries alpha*sqrt(2)/lambda1 for each row
    const Chart chart = build_interval_grid(63, 1.0);
    const DiscreteOperator op = assemble_operator(chart, BcKind::dirichlet_zero);
    const double lambda1 = smallest_eigenvalue(op, EigenMode::dirichlet).lambda1;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    for (const double alpha : {0.5, 2.0, 8.0}) {
        REQUIRE(std::getline(lines, line).good());
        const size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
        const double rho = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        REQUIRE(rho == Approx(alpha * std::sqrt(2.0) / lambda1).epsilon(1e-10));
    }
}

TEST_CASE("inline forcing arrays are accepted for small grids") {
    json j;
    j["command"] = "solve";
    j["problem"]["chart"] = {{"kind", "interval"}, {"n", 3}, {"length", 1.0}};
    j["problem"]["bc"] = "dirichlet_zero";
    // f = lambda1 * v1 with v1 = sin(pi x) at the three interior nodes
    const double lambda = 2.0 / (0.25 * 0.25) * (1.0 - std::cos(3.14159265358979323846 * 0.25));
    const double s = std::sin(3.14159265358979323846 * 0.25);
    j["problem"]["forcing"] = {{"values", {{lambda * s, 0.0}, {lambda * 1.0, 0.0}, {lambda * s, 0.0}}}};
    j["problem"]["nonlinearity"] = {{"kind", "zero"}};
    const fs::path out = fresh_dir("inline");
    REQUIRE(cli::dispatch(j, out.string()) == cli::exit_ok);
    // the solution is v1 itself; read its midpoint value back from the CSV
    std::istringstream csv(slurp(out / "solution.csv"));
    std::string line;
    double mid = 0.0;
    while (std::getline(csv, line))
        if (line.rfind("0.5,", 0) == 0) mid = std::stod(line.substr(4, line.find(',', 4) - 4));
    REQUIRE(mid == Approx(1.0).epsilon(1e-10));

    json bad = j;
    bad["problem"]["forcing"] = {{"values", {{1.0, 0.0}}}};  // wrong length
    REQUIRE(cli::dispatch(bad, fresh_dir("inline_bad").string()) == cli::exit_config);
}

TEST_CASE("chart descriptions round-trip through JSON") {
    for (const char* text :
         {R"({"kind":"interval","n":31,"length":2.5})",
          R"({"kind":"rectangle","nx":5,"ny":7,"lx":1.0,"ly":2.0})",
          R"({"kind":"metric_band","n":11,"theta_min":0.5,"theta_max":2.0})",
          R"({"kind":"circle","n":64,"overlap_fraction":0.1})"}) {
        const json j = json::parse(text);
        const ChartConfig cc = chart_config_from_json(j);
        REQUIRE(chart_config_to_json(cc) == j);
    }
    REQUIRE_THROWS_AS(chart_config_from_json(json::parse(R"({"kind":"torus","n":4})")), ConfigError);
}

TEST_CASE("verify command passes its whole battery") {
    json j;
    j["command"] = "verify";
    j["seed"] = 4;
    j["verify"] = {{"trials", 300}};
    const fs::path out = fresh_dir("verify");
    REQUIRE(cli::dispatch(j, out.string()) == cli::exit_ok);
    const json checks = json::parse(slurp(out / "verify.json"));
    REQUIRE(checks.is_array());
    REQUIRE(checks.size() >= 5);
    for (const auto& c : checks) {
        INFO(c.at("check_name").get<std::string>());
        REQUIRE(c.at("pass").get<bool>());
    }
}

TEST_CASE("repeated runs with a fixed seed are byte-identical") {
    {
        json j = trivial_solve_config();
        j["problem"]["nonlinearity"] = {{"kind", "phase"}, {"alpha", 0.5}};
        j["problem"]["forcing"] = {{"tag", "sin_pi_x"}};
        const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
        REQUIRE(cli::dispatch(j, a.string()) == cli::exit_ok);
        REQUIRE(cli::dispatch(j, b.string()) == cli::exit_ok);
        for (const char* f : {"solution.csv", "report.json", "steps.csv"})
            REQUIRE(slurp(a / f) == slurp(b / f));
    }
    {
        json j;
        j["command"] = "verify";
        j["seed"] = 11;
        j["verify"] = {{"trials", 50}};
        const fs::path a = fresh_dir("det_va"), b = fresh_dir("det_vb");
        REQUIRE(cli::dispatch(j, a.string()) == cli::exit_ok);
        REQUIRE(cli::dispatch(j, b.string()) == cli::exit_ok);
        REQUIRE(slurp(a / "verify.json") == slurp(b / "verify.json"));
    }
}

TEST_CASE("circle solve emits glue diagnostics") {
    json j;
    j["command"] = "solve";
    j["problem"]["chart"] = {{"kind", "circle"}, {"n", 96}, {"overlap_fraction", 0.12}};
    j["problem"]["forcing"] = {{"tag", "cos_theta"}};
    j["problem"]["boundary"] = {{"tag", "oracle_trace"}};
    j["problem"]["nonlinearity"] = {{"kind", "zero"}};
    const fs::path out = fresh_dir("circle");
    REQUIRE(cli::dispatch(j, out.string()) == cli::exit_ok);
    const json glue = json::parse(slurp(out / "glue.json"));
    REQUIRE(glue.at("converged").get<bool>());
    REQUIRE(glue.at("overlap_mismatch").get<double>() <= 1e-8);
    const std::string csv = slurp(out / "solution.csv");
    REQUIRE(csv.rfind("theta,re,im\n", 0) == 0);
}

TEST_CASE("operator dump is written when requested") {
    json j = trivial_solve_config();
    j["dump_operator"] = "op.mtx";
    const fs::path out = fresh_dir("dump");
    REQUIRE(cli::dispatch(j, out.string()) == cli::exit_ok);
    const std::string mm = slurp(out / "op.mtx");
    REQUIRE(mm.rfind("%%MatrixMarket", 0) == 0);
}

TEST_CASE("run() maps malformed files to the config exit code") {
    const fs::path out = fresh_dir("badfile");
    const fs::path cfg = out / "broken.json";
    std::ofstream(cfg) << "{ not json";
    REQUIRE(cli::run(cfg.string(), out.string()) == cli::exit_config);
    REQUIRE(cli::run((out / "missing.json").string(), out.string()) == cli::exit_config);
}
