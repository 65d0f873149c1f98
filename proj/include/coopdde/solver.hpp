#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coopdde/model.hpp"

namespace coopdde {

/// Initial data on [-horizon, 0], one bounded function per component.
/// Cone tags follow the admissible sets of initial conditions: NonNegative
/// keeps every component >= 0; PositiveAtZero additionally requires a
/// strictly positive right endpoint.  Tags are validated on a dense grid
/// plus the endpoint at construction.
class InitialHistory {
public:
    enum class Cone { NonNegative, PositiveAtZero };

    static InitialHistory constant(const Vec& value, double horizon, Cone cone);
    static InitialHistory from_functions(std::vector<TimeFn> components, double horizon,
                                         Cone cone);
    /// Piecewise-linear over 8 equispaced knots, values uniform on
    /// [0.1, 2]; fully determined by the seed.
    static InitialHistory random_positive(int dimension, double horizon, std::uint64_t seed);

    Vec at(double offset) const;  // offset in [-horizon, 0]
    int dimension() const { return static_cast<int>(components_.size()); }
    double horizon() const { return horizon_; }
    Cone cone() const { return cone_; }

private:
    std::vector<TimeFn> components_;
    double horizon_ = 0.0;
    Cone cone_ = Cone::NonNegative;
};

struct IntegrationConfig {
    double hstep = 0.01;
    double t_end = 100.0;
    double start_time = 0.0;
    enum class RightHandSide {
        Full,             // the nonlinear system
        Linearized,       // shapes replaced by the identity
        LinearUndelayed,  // birth terms dropped: x' = (A(t) - D(t)) x
    };
    RightHandSide rhs_kind = RightHandSide::Full;
};

/// Dense numerical solution: fixed-step nodes with state and derivative
/// values, cubic Hermite interpolation between nodes, and the originating
/// history for access before the start time.  Interpolation reproduces
/// node values exactly.
class Trajectory {
public:
    double start_time() const { return t0_; }
    double step() const { return h_; }
    double end_time() const { return node_time(node_count() - 1); }
    int node_count() const { return static_cast<int>(states_.size()); }
    int dimension() const { return dim_; }
    double node_time(int j) const { return t0_ + j * h_; }
    const Vec& state(int j) const { return states_[j]; }
    const Vec& deriv(int j) const { return derivs_[j]; }

    /// Dense access on [start_time - history horizon, end_time].
    Vec at(double s) const;

    std::optional<double> blowup_time() const { return blowup_; }
    long extrapolation_warnings() const { return extrapolation_warnings_; }
    IntegrationConfig::RightHandSide rhs_kind() const { return rhs_kind_; }
    const InitialHistory& history() const { return history_; }

private:
    friend Trajectory integrate(const SystemSpec&, const InitialHistory&,
                                const IntegrationConfig&);
    Trajectory(InitialHistory history, double t0, double h, int dim)
        : history_(std::move(history)), t0_(t0), h_(h), dim_(dim) {}

    Vec hermite(int segment, double s) const;

    InitialHistory history_;
    double t0_ = 0.0;
    double h_ = 0.0;
    int dim_ = 0;
    std::vector<Vec> states_;
    std::vector<Vec> derivs_;
    std::optional<double> blowup_ = std::nullopt;
    long extrapolation_warnings_ = 0;
    IntegrationConfig::RightHandSide rhs_kind_ = IntegrationConfig::RightHandSide::Full;
};

/// Method of steps: classical RK4 with delayed arguments served by the
/// cubic Hermite dense output of completed steps.  Delayed arguments that
/// land inside the step being computed (delays shorter than the step) are
/// extrapolated from the previous accepted segment and counted in the
/// trajectory's extrapolation warnings.  States are never clipped to the
/// nonnegative cone; a non-finite state stops integration and records the
/// blow-up time.
Trajectory integrate(const SystemSpec& spec, const InitialHistory& history,
                     const IntegrationConfig& config);

struct TailStats {
    Vec tail_min;
    Vec tail_max;
    double window = 0.0;
    double extinct_threshold = 1e-4;
    double persist_threshold = 1e-6;
};

/// Componentwise min/max over node values in [end - window, end];
/// empirical stand-ins for the asymptotic lower/upper bounds.
TailStats tail_statistics(const Trajectory& traj, double window);

struct DiagnosticCheck {
    bool precondition_ok = true;
    bool ok = false;
    double max_violation = 0.0;
    std::optional<double> first_failure_time;
};

/// max_i v_i^{-1} |x_i(t)| must be non-increasing along nodes when the
/// undelayed linear part satisfies (A(t) - D(t)) v <= 0 on the node grid.
/// Requires a LinearUndelayed trajectory; slack 1e-9 (1 + |x|).
DiagnosticCheck check_weighted_norm_monotone(const SystemSpec& spec, const Trajectory& traj,
                                             const Vec& weights);

/// Every node state stays in [lower, upper], slack 1e-9 relative to the
/// box size; the history must start inside the box.
DiagnosticCheck check_box_invariance(const Trajectory& traj, const Vec& lower, const Vec& upper);

/// Integrates both histories under the same configuration and verifies
/// componentwise ordering at all nodes within slack 1e-8.  Meaningful for
/// cooperative right-hand sides (the linearization always is; the full
/// system generally is not, in which case violations are reported, not
/// asserted).
DiagnosticCheck check_order_preservation(const SystemSpec& spec, const InitialHistory& lower,
                                         const InitialHistory& upper,
                                         const IntegrationConfig& config);

struct DecayFit {
    double rate = 0.0;       // alpha in |x(t)| <~ K e^{-alpha (t - t0)} |x(t0)|
    double amplitude = 1.0;  // K
};

/// Least-squares fit of log |x(t)| over the second half of the nodes,
/// skipping underflowed tails.
DecayFit fit_decay_rate(const Trajectory& traj);

}  // namespace coopdde
