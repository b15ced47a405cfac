// semilin command-line runner: loads a JSON config and dispatches
// solve / eigen / verify / sweep, writing CSV/JSON artifacts.
#include <CLI11.hpp>

#include <optional>
#include <string>

#include "semilin/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"semilin: certified Picard solver for semilinear elliptic problems"};
    std::string config_path;
    std::string out_dir = "out";
    std::int64_t seed = -1;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--seed", seed, "override the config seed (nonnegative integer)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return semilin::cli::exit_config;
    }
    std::optional<std::uint64_t> seed_override;
    if (seed >= 0) seed_override = static_cast<std::uint64_t>(seed);
    return semilin::cli::run(config_path, out_dir, seed_override);
}
