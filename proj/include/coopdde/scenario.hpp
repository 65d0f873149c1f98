#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "coopdde/classifier.hpp"

namespace coopdde {

/// A scenario file bundles the system with analysis options and a
/// simulation plan.  The seed fully determines the random histories; all
/// paths are resolved relative to the scenario file.
struct Scenario {
    int schema_version = 1;
    std::string name;
    SystemSpec system;
    GridPlan grid;
    ClassifierTolerances tolerances;
    SimulationPlan simulation;

    static Scenario load(const std::filesystem::path& file);
    nlohmann::json to_json_doc() const;
};

struct CommandOverrides {
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> hstep;
    std::optional<double> t_end;
};

/// Exit codes across all commands: 0 success/consistent, 1
/// failure/inconsistent, 2 undetermined.
int cmd_analyze(const std::filesystem::path& scenarioPath, const CommandOverrides& o = {});
int cmd_simulate(const std::filesystem::path& scenarioPath, const CommandOverrides& o = {});
int cmd_verify(const std::filesystem::path& scenarioPath, const CommandOverrides& o = {});

struct SweepRequest {
    std::string parameter;  // "d[i]", "a[i][j]", "beta[i][k]", "c[i][k]"
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
};

int cmd_sweep(const std::filesystem::path& scenarioPath, const SweepRequest& request,
              const CommandOverrides& o = {});

/// Verdict reconstruction for the verify path (which never recomputes).
Verdict verdict_from_json(const nlohmann::json& j);
std::optional<PersistenceFloor> floor_from_json(const nlohmann::json& verdictDoc);

/// Resolved output directory for a scenario (its stem + "_out" next to the
/// file unless overridden).
std::filesystem::path resolve_out_dir(const std::filesystem::path& scenarioPath,
                                      const CommandOverrides& o);

}  // namespace coopdde
