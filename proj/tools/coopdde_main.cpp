#include <CLI11.hpp>

#include <cstdint>
#include <string>

#include "coopdde/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Cooperative delayed population systems: analysis, simulation, verification"};
    app.require_subcommand(1);

    std::string scenarioPath;
    std::string outDir;
    std::uint64_t seed = 0;
    double hstep = 0.0;
    double tEnd = 0.0;
    bool seedSet = false, hstepSet = false, tEndSet = false;

    const auto addCommon = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenarioPath, "scenario JSON file")->required();
        cmd->add_option("--out", outDir, "output directory (default: <scenario>_out)");
        cmd->add_option("--seed", seed, "override the simulation seed")
            ->each([&](const std::string&) { seedSet = true; });
        cmd->add_option("--hstep", hstep, "override the integration step")
            ->each([&](const std::string&) { hstepSet = true; });
        cmd->add_option("--t-end", tEnd, "override the simulation horizon")
            ->each([&](const std::string&) { tEndSet = true; });
    };

    CLI::App* analyze = app.add_subcommand("analyze", "hypothesis checks and classification");
    CLI::App* simulate = app.add_subcommand("simulate", "integrate the plan's random histories");
    CLI::App* verify = app.add_subcommand("verify", "confront the stored verdict with simulations");
    CLI::App* sweep = app.add_subcommand("sweep", "sweep one constant coefficient");
    addCommon(analyze);
    addCommon(simulate);
    addCommon(verify);
    addCommon(sweep);

    coopdde::SweepRequest request;
    sweep->add_option("--param", request.parameter, "coefficient to sweep, e.g. beta[0][0]")
        ->required();
    sweep->add_option("--from", request.from, "range start")->required();
    sweep->add_option("--to", request.to, "range end")->required();
    sweep->add_option("--step", request.step, "range step")->required();

    CLI11_PARSE(app, argc, argv);

    coopdde::CommandOverrides overrides;
    if (!outDir.empty()) overrides.out_dir = outDir;
    if (seedSet) overrides.seed = seed;
    if (hstepSet) overrides.hstep = hstep;
    if (tEndSet) overrides.t_end = tEnd;

    if (analyze->parsed()) return coopdde::cmd_analyze(scenarioPath, overrides);
    if (simulate->parsed()) return coopdde::cmd_simulate(scenarioPath, overrides);
    if (verify->parsed()) return coopdde::cmd_verify(scenarioPath, overrides);
    if (sweep->parsed()) return coopdde::cmd_sweep(scenarioPath, request, overrides);
    return 1;
}
