#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopdde/model.hpp"
#include "coopdde/solver.hpp"

namespace coopdde {

enum class VerdictKind { ExtinctGas, Permanent, Mixed, Undetermined };

/// The decision rule behind a verdict, named by what it checks.  Exactly
/// one rule backs every decisive verdict.
enum class DecisionRule {
    SpectralGas,                    // constant coefficients: s(M) <= 0 forces extinction
    SourceBlockThreshold,           // constant coefficients: source blocks with s > 0 force permanence
    IrreducibleThreshold,           // constant coefficients, irreducible M: sign of s(M) decides
    BlockSplit,                     // constant coefficients, reducible M: per-block outcome
    CertificateGas,                 // time-varying: v >> 0 with M(t) v <= 0 plus a tail condition
    CertificatePermanence,          // time-varying: v >> 0 with M(t) v >= eta >> 0
    ConstantCertificateGas,         // constant coefficients: certificate form M v <= 0
    ConstantCertificatePermanence,  // constant coefficients: certificate form M v >> 0
};

std::string to_string(VerdictKind kind);
std::string to_string(DecisionRule rule);

struct BlockOutcome {
    std::vector<int> indices;  // original patch indices
    enum class Status { Extinct, Persistent };
    Status status = Status::Extinct;
    double spectral_bound = 0.0;
    bool fed_by_persistent = false;  // raised through the derived propagation rule
};

struct Certificate {
    std::optional<Vec> vector_v;
    std::optional<Vec> eta;            // per-component slack (M(t) v)_i / v_i lower bounds
    std::optional<SpectralReport> spectral;
    std::optional<Vec> ratio_lower;    // tail liminf proxies of the birth/loss ratio
    std::optional<Vec> ratio_upper;    // tail limsup proxies
    std::vector<std::string> notes;
};

struct Verdict {
    VerdictKind kind = VerdictKind::Undetermined;
    std::optional<DecisionRule> rule;
    bool boundary = false;        // a decisive quantity sat within tolerance of its threshold
    bool grid_certified = false;  // certified on a finite grid, not for all t
    std::string reason;           // for Undetermined
    Certificate certificate;
    std::vector<BlockOutcome> blocks;  // Mixed only
};

struct ClassifierTolerances {
    double spectral = 1e-10;  // sign band for s(M) decisions
    double ratio = 1e-3;      // band around 1 for the birth/loss ratio criterion
};

/// Sharp classification for constant coefficients (delays may still vary):
/// verdicts from the block structure of the community matrix.  Requires
/// the loss-minus-migration matrix to be a non-singular M-matrix.
Verdict classify_autonomous(const SystemSpec& spec, const ClassifierTolerances& tol = {});

/// Grid-certified classification for time-varying coefficients: searches
/// positive-vector certificates for either extinction or permanence over
/// the sampled community matrices, falling back to tail bounds of the
/// birth/loss ratio.
Verdict classify_nonautonomous(const SystemSpec& spec, const GridPlan& plan,
                               const ClassifierTolerances& tol = {});

/// The constructive uniform lower bound of the permanence argument, built
/// in the coordinates rescaled by the certificate vector v (so v = 1).
struct PersistenceFloor {
    double floor_scaled = 0.0;    // recurrence target m in scaled coordinates
    Vec per_component_floor;      // m * v_i, original coordinates
    double m = 0.0;               // min over components: the uniform bound
    Vec alphas;                   // chosen inside (1, 1 + eta_i / sup d_i)
    Vec trace;                    // s_0 < s_1 < ... <= floor_scaled
    Vec scaling;                  // the v used
    double tail_bound_scaled = 0.0;  // dissipativity bound of the scaled system
};

/// Slacks eta_i are taken as grid minima of (M(t) v)_i / v_i over the
/// plan's times (exact for constant coefficients).
PersistenceFloor persistence_floor(const SystemSpec& spec, const Vec& v, const GridPlan& plan,
                                   const std::optional<Vec>& alphas = std::nullopt);

/// Ultimate bound K L / alpha from the exponential decay of the undelayed
/// linear part and the sup of the delayed perturbation.
struct DissipativityBound {
    double perturbation_sup = 0.0;  // L
    double amplitude = 1.0;         // K
    double rate = 0.0;              // alpha
    double bound = 0.0;             // K L / alpha
    bool analytic_rate = false;     // alpha from the spectral bound (constant coefficients)
};

DissipativityBound dissipativity_bound(const SystemSpec& spec);

/// Simulation plan for confronting verdicts with trajectories.
struct SimulationPlan {
    int runs = 20;
    double t_end = 0.0;   // 0: defaults to 100 max(1, delay horizon)
    double hstep = 0.0;   // 0: defaults to min(0.05, horizon / 8) or 0.01 without delays
    std::uint64_t seed = 1;
    double extinct_threshold = 1e-4;
    double persist_threshold = 1e-6;
};

struct RunOutcome {
    std::uint64_t seed = 0;
    TailStats tails;
    bool pass = false;
    std::string note;
};

struct ConsistencyReport {
    bool consistent = false;
    std::vector<RunOutcome> runs;
    std::string summary;
};

/// Runs the plan's random positive histories and checks the tails against
/// the verdict.  Finite-horizon simulation gives evidence, never proof:
/// the report says consistent/inconsistent, nothing stronger.
ConsistencyReport verify_verdict(const SystemSpec& spec, const Verdict& verdict,
                                 const SimulationPlan& plan,
                                 const std::optional<PersistenceFloor>& floor = std::nullopt);

void to_json(nlohmann::json& j, const Verdict& v);
void to_json(nlohmann::json& j, const PersistenceFloor& f);
void to_json(nlohmann::json& j, const DissipativityBound& b);
void to_json(nlohmann::json& j, const ConsistencyReport& r);
void to_json(nlohmann::json& j, const TailStats& t);

}  // namespace coopdde
