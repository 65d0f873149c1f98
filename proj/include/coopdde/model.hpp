#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopdde/coopmatrix.hpp"
#include "coopdde/nonlinearity.hpp"
#include "coopdde/timefn.hpp"

namespace coopdde {

/// Read access to past states x(s).  Implementations must reject queries
/// outside their horizon with a hard error.
class PastState {
public:
    virtual ~PastState() = default;
    virtual Vec at(double s) const = 0;
};

/// Wraps a callable; horizon enforcement is up to the callable.
class FnPast : public PastState {
public:
    explicit FnPast(std::function<Vec(double)> fn) : fn_(std::move(fn)) {}
    Vec at(double s) const override { return fn_(s); }

private:
    std::function<Vec(double)> fn_;
};

/// A patch-structured delayed population system
///
///   x_i' = -loss_i(t) x_i + sum_{j != i} migration_ij(t) x_j
///          + sum_k birth_ik(t) shape_ik(t, x_i(t - delay_ik(t)))
///
/// All coefficients are nonnegative bounded functions; shapes have unit
/// slope at zero so the linearization replaces them by the identity.
struct SystemSpec {
    int patches = 0;                                // n
    int terms = 0;                                  // delayed birth terms per patch (m)
    std::vector<TimeFn> loss;                       // d_i
    std::vector<std::vector<TimeFn>> migration;     // a_ij, zero diagonal
    std::vector<std::vector<TimeFn>> birth;         // beta_ik
    std::vector<std::vector<TimeFn>> delay;         // tau_ik, values within [0, delay_horizon]
    std::vector<std::vector<Nonlinearity>> shape;   // h_ik
    double delay_horizon = 0.0;                     // tau_max
    bool autonomous_coefficients = false;

    static SystemSpec create(std::vector<TimeFn> loss,
                             std::vector<std::vector<TimeFn>> migration,
                             std::vector<std::vector<TimeFn>> birth,
                             std::vector<std::vector<TimeFn>> delay,
                             std::vector<std::vector<Nonlinearity>> shape,
                             double delayHorizon);

    double birth_total(int patch, double t) const;  // beta_i(t)
};

/// Nicholson system: Ricker shapes h_ik(t, x) = x e^{-c_ik(t) x}.
/// The delay horizon is the exact supremum of the delay functions.
SystemSpec build_nicholson(const std::vector<TimeFn>& loss,
                           const std::vector<std::vector<TimeFn>>& migration,
                           const std::vector<std::vector<TimeFn>>& birth,
                           const std::vector<std::vector<TimeFn>>& crowding,
                           const std::vector<std::vector<TimeFn>>& delay);

Vec rhs(const SystemSpec& spec, double t, const PastState& past);
Vec rhs_linearized(const SystemSpec& spec, double t, const PastState& past);

/// Community matrix M(t) = B(t) + A(t) - D(t); cooperative by construction.
CoopMatrix community_matrix(const SystemSpec& spec, double t);

/// Sampling plan for grid-certified hypothesis checks.
struct GridPlan {
    double t_end = 100.0;
    int t_samples = 10'000;
    double x_max = 0.0;  // 0 = derive from a rough ultimate-bound estimate
    int x_samples = 200;

    static GridPlan defaults(const SystemSpec& spec);
    std::vector<double> times() const;
};

struct HypothesisWitness {
    std::string constraint;
    double t = 0.0;
    double x = 0.0;  // NaN when the witness is time-only
    int component = -1;
    double value = 0.0;
};

struct HypothesisStatus {
    enum class State { Holds, Boundary, Fails };
    State state = State::Holds;
    std::string detail;
    std::vector<HypothesisWitness> witnesses;
};

/// Grid-certified checks of the standing assumptions: every status is a
/// statement about the sampling grid (plus exact bounds where the
/// coefficient shapes allow them), never a proof for all t.
struct HypothesisReport {
    HypothesisStatus coefficients;   // loss positive, migration nonnegative, regular
    HypothesisStatus dominance;      // v >> 0 with (D(t)-A(t)) v >= 0, strict on the tail
    HypothesisStatus births;         // birth/delay nonnegative, total birth positive
    HypothesisStatus brackets;       // bracket sandwich and positivity of shapes
    std::optional<Vec> dominance_vector;
    bool asymptotically_unverifiable = false;  // tail strictness undecidable from finite data
    double state_grid_max = 0.0;               // x_max actually used

    bool all_hold() const;
};

HypothesisReport validate_hypotheses(const SystemSpec& spec, const GridPlan& plan);

/// Rough ultimate-bound estimate used to size state grids when no
/// classifier bound is supplied: max_i sum_k sup(beta_ik) sup(h_ik^+)
/// divided by the weakest loss rate.
double rough_state_bound(const SystemSpec& spec);

void to_json(nlohmann::json& j, const SystemSpec& spec);
void from_json(const nlohmann::json& j, SystemSpec& spec);
void to_json(nlohmann::json& j, const HypothesisStatus& s);
void to_json(nlohmann::json& j, const HypothesisReport& r);

}  // namespace coopdde
