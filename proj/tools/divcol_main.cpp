#include "runcase.hpp"
#include "runconfig.hpp"

#include "divcol/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"divcol: divergence-conforming B-spline collocation benchmarks"};
    app.require_subcommand(1);

    CLI::App* run_cmd = app.add_subcommand("run", "run a configured case or study");
    std::string config_path;
    std::vector<std::string> overrides;
    run_cmd->add_option("--config", config_path, "flat key=value configuration file");
    run_cmd->add_option("--set", overrides, "override a configuration key (key=value)");

    CLI11_PARSE(app, argc, argv);

    try {
        const divcol::cli::RunConfig cfg =
            config_path.empty() ? divcol::cli::parse_config(overrides)
                                : divcol::cli::parse_config(config_path, overrides);
        divcol::cli::run(cfg);
    } catch (const divcol::InvalidInput& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const divcol::UnsupportedDegree& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const divcol::MalformedData& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const divcol::SolveFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const divcol::SingularSystem& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const divcol::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
