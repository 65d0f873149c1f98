#include "coopdde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "coopdde/errors.hpp"

namespace coopdde {

namespace {

double canonical_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void hermite_basis(double theta, double& h00, double& h10, double& h01, double& h11) {
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    h10 = t3 - 2.0 * t2 + theta;
    h01 = -2.0 * t3 + 3.0 * t2;
    h11 = t3 - t2;
}

bool finite_vec(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vec rhs_linear_undelayed(const SystemSpec& spec, double t, const Vec& x) {
    Vec f(spec.patches, 0.0);
    for (int i = 0; i < spec.patches; ++i) {
        double acc = -spec.loss[i](t) * x[i];
        for (int j = 0; j < spec.patches; ++j) {
            if (j != i) acc += spec.migration[i][j](t) * x[j];
        }
        f[i] = acc;
    }
    return f;
}

// Dense-output lookup over the completed prefix of the trajectory being
// built.  Queries past the frontier node fall into the step in progress
// and are served by Hermite extrapolation of the previous accepted
// segment (counted), or linearly off the start point when no segment has
// been accepted yet.
class BuildLookup : public PastState {
public:
    BuildLookup(const InitialHistory& history, const std::vector<Vec>& states,
                const std::vector<Vec>& derivs, double t0, double h, long& warnings)
        : history_(history), states_(states), derivs_(derivs), t0_(t0), h_(h),
          warnings_(warnings) {}

    Vec at(double s) const override {
        if (s <= t0_) {
            return history_.at(s - t0_);
        }
        const int frontier = static_cast<int>(states_.size()) - 1;
        const long node = std::lround((s - t0_) / h_);
        if (node <= frontier && s == t0_ + node * h_) {
            return states_[node];
        }
        if (s <= t0_ + frontier * h_) {
            int segment = static_cast<int>((s - t0_) / h_);
            segment = std::clamp(segment, 0, frontier - 1);
            return hermite(segment, s);
        }
        ++warnings_;
        if (frontier >= 1) {
            return hermite(frontier - 1, s);  // extrapolates past the segment end
        }
        Vec v = states_[0];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += (s - t0_) * derivs_[0][i];
        return v;
    }

private:
    Vec hermite(int segment, double s) const {
        const double theta = (s - (t0_ + segment * h_)) / h_;
        double h00, h10, h01, h11;
        hermite_basis(theta, h00, h10, h01, h11);
        const Vec& x0 = states_[segment];
        const Vec& x1 = states_[segment + 1];
        const Vec& f0 = derivs_[segment];
        const Vec& f1 = derivs_[segment + 1];
        Vec v(x0.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = h00 * x0[i] + h_ * h10 * f0[i] + h01 * x1[i] + h_ * h11 * f1[i];
        }
        return v;
    }

    const InitialHistory& history_;
    const std::vector<Vec>& states_;
    const std::vector<Vec>& derivs_;
    double t0_, h_;
    long& warnings_;
};

// Serves the Runge-Kutta stage vector at the stage time, the dense
// output for anything earlier.
class StageLookup : public PastState {
public:
    StageLookup(const PastState& base, double stageTime, const Vec& stageState)
        : base_(base), stage_time_(stageTime), stage_state_(stageState) {}

    Vec at(double s) const override {
        if (s == stage_time_) return stage_state_;
        return base_.at(s);
    }

private:
    const PastState& base_;
    double stage_time_;
    const Vec& stage_state_;
};

}  // namespace

InitialHistory InitialHistory::from_functions(std::vector<TimeFn> components, double horizon,
                                              Cone cone) {
    if (components.empty()) throw StructuralError("InitialHistory: no components");
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw StructuralError("InitialHistory: horizon must be finite and nonnegative");
    }
    InitialHistory h;
    h.components_ = std::move(components);
    h.horizon_ = horizon;
    h.cone_ = cone;

    // Cone tag validation: dense grid plus the right endpoint.
    const int samples = 512;
    for (std::size_t i = 0; i < h.components_.size(); ++i) {
        for (int q = 0; q <= samples; ++q) {
            const double offset = horizon == 0.0 ? 0.0 : -horizon + horizon * q / samples;
            if (h.components_[i](offset) < 0.0) {
                throw StructuralError("InitialHistory: component dips below zero on the grid");
            }
        }
        if (cone == Cone::PositiveAtZero && !(h.components_[i](0.0) > 0.0)) {
            throw StructuralError("InitialHistory: endpoint must be strictly positive");
        }
    }
    return h;
}

InitialHistory InitialHistory::constant(const Vec& value, double horizon, Cone cone) {
    std::vector<TimeFn> comps;
    comps.reserve(value.size());
    for (double v : value) comps.push_back(TimeFn::constant(v));
    return from_functions(std::move(comps), horizon, cone);
}

InitialHistory InitialHistory::random_positive(int dimension, double horizon,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TimeFn> comps;
    comps.reserve(dimension);
    for (int i = 0; i < dimension; ++i) {
        if (horizon == 0.0) {
            comps.push_back(TimeFn::constant(0.1 + 1.9 * canonical_unit(rng)));
            continue;
        }
        const int knots = 8;
        std::vector<double> times(knots), values(knots);
        for (int k = 0; k < knots; ++k) {
            times[k] = -horizon + horizon * k / double(knots - 1);
            values[k] = 0.1 + 1.9 * canonical_unit(rng);
        }
        comps.push_back(TimeFn::table(std::move(times), std::move(values)));
    }
    return from_functions(std::move(comps), horizon, Cone::PositiveAtZero);
}

Vec InitialHistory::at(double offset) const {
    if (offset < -horizon_ - 1e-9 * (1.0 + horizon_) || offset > 1e-12) {
        throw NumericalError("InitialHistory: query outside [-horizon, 0]");
    }
    Vec v(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i) v[i] = components_[i](offset);
    return v;
}

Vec Trajectory::hermite(int segment, double s) const {
    const double theta = (s - node_time(segment)) / h_;
    double h00, h10, h01, h11;
    hermite_basis(theta, h00, h10, h01, h11);
    Vec v(dim_);
    for (int i = 0; i < dim_; ++i) {
        v[i] = h00 * states_[segment][i] + h_ * h10 * derivs_[segment][i] +
               h01 * states_[segment + 1][i] + h_ * h11 * derivs_[segment + 1][i];
    }
    return v;
}

Vec Trajectory::at(double s) const {
    if (s <= t0_) {
        return history_.at(s - t0_);
    }
    if (s > end_time() + 1e-9 * (1.0 + std::abs(end_time()))) {
        throw NumericalError("Trajectory: query past the end of the integration");
    }
    const long node = std::lround((s - t0_) / h_);
    if (node < node_count() && s == t0_ + node * h_) return states_[node];
    int segment = static_cast<int>((s - t0_) / h_);
    segment = std::clamp(segment, 0, node_count() - 2);
    return hermite(segment, s);
}

Trajectory integrate(const SystemSpec& spec, const InitialHistory& history,
                     const IntegrationConfig& config) {
    if (!(config.hstep > 0.0)) throw StructuralError("integrate: hstep must be positive");
    if (spec.delay_horizon > 0.0 && config.hstep > spec.delay_horizon / 4.0 + 1e-15) {
        throw StructuralError("integrate: hstep must not exceed a quarter of the delay horizon");
    }
    if (!(config.t_end > config.start_time)) {
        throw StructuralError("integrate: t_end must exceed the start time");
    }
    if (history.dimension() != spec.patches) {
        throw StructuralError("integrate: history dimension mismatch");
    }
    if (history.horizon() + 1e-12 < spec.delay_horizon) {
        throw StructuralError("integrate: history shorter than the delay horizon");
    }

    const double t0 = config.start_time;
    const double h = config.hstep;
    const long steps = std::lround((config.t_end - t0) / h);
    if (steps < 1) throw StructuralError("integrate: no steps to take");

    Trajectory traj(history, t0, h, spec.patches);
    traj.rhs_kind_ = config.rhs_kind;
    traj.states_.reserve(steps + 1);
    traj.derivs_.reserve(steps + 1);

    const auto eval = [&](double t, const PastState& past) -> Vec {
        switch (config.rhs_kind) {
            case IntegrationConfig::RightHandSide::Full:
                return rhs(spec, t, past);
            case IntegrationConfig::RightHandSide::Linearized:
                return rhs_linearized(spec, t, past);
            case IntegrationConfig::RightHandSide::LinearUndelayed:
                return rhs_linear_undelayed(spec, t, past.at(t));
        }
        return Vec(spec.patches, 0.0);
    };

    BuildLookup lookup(traj.history_, traj.states_, traj.derivs_, t0, h,
                       traj.extrapolation_warnings_);
    traj.states_.push_back(history.at(0.0));
    {
        StageLookup stage(lookup, t0, traj.states_[0]);
        traj.derivs_.push_back(eval(t0, stage));
    }

    Vec y2(spec.patches), y3(spec.patches), y4(spec.patches), next(spec.patches);
    for (long j = 0; j < steps; ++j) {
        const double t = t0 + j * h;
        const double tHalf = t + 0.5 * h;
        const double tNext = t0 + (j + 1) * h;
        const Vec& x = traj.states_.back();
        const Vec& k1 = traj.derivs_.back();

        for (int i = 0; i < spec.patches; ++i) y2[i] = x[i] + 0.5 * h * k1[i];
        const Vec k2 = eval(tHalf, StageLookup(lookup, tHalf, y2));
        for (int i = 0; i < spec.patches; ++i) y3[i] = x[i] + 0.5 * h * k2[i];
        const Vec k3 = eval(tHalf, StageLookup(lookup, tHalf, y3));
        for (int i = 0; i < spec.patches; ++i) y4[i] = x[i] + h * k3[i];
        const Vec k4 = eval(tNext, StageLookup(lookup, tNext, y4));

        for (int i = 0; i < spec.patches; ++i) {
            next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!finite_vec(next)) {
            traj.blowup_ = tNext;
            break;
        }
        const Vec fNext = eval(tNext, StageLookup(lookup, tNext, next));
        traj.states_.push_back(next);
        traj.derivs_.push_back(fNext);
    }
    return traj;
}

TailStats tail_statistics(const Trajectory& traj, double window) {
    const double span = traj.end_time() - traj.start_time();
    if (!(window > 0.0) || window > span + 1e-12) {
        throw StructuralError("tail_statistics: window must fit inside the trajectory");
    }
    const double from = traj.end_time() - window;
    TailStats stats;
    stats.window = window;
    stats.tail_min.assign(traj.dimension(), std::numeric_limits<double>::infinity());
    stats.tail_max.assign(traj.dimension(), -std::numeric_limits<double>::infinity());
    for (int j = 0; j < traj.node_count(); ++j) {
        if (traj.node_time(j) < from - 1e-12) continue;
        for (int i = 0; i < traj.dimension(); ++i) {
            stats.tail_min[i] = std::min(stats.tail_min[i], traj.state(j)[i]);
            stats.tail_max[i] = std::max(stats.tail_max[i], traj.state(j)[i]);
        }
    }
    return stats;
}

DiagnosticCheck check_weighted_norm_monotone(const SystemSpec& spec, const Trajectory& traj,
                                             const Vec& weights) {
    DiagnosticCheck check;
    if (traj.rhs_kind() != IntegrationConfig::RightHandSide::LinearUndelayed) {
        check.precondition_ok = false;
        return check;
    }
    for (double w : weights) {
        if (!(w > 0.0)) {
            check.precondition_ok = false;
            return check;
        }
    }
    for (int j = 0; j < traj.node_count(); ++j) {
        const double t = traj.node_time(j);
        for (int i = 0; i < spec.patches; ++i) {
            double row = -spec.loss[i](t) * weights[i];
            for (int q = 0; q < spec.patches; ++q) {
                if (q != i) row += spec.migration[i][q](t) * weights[q];
            }
            if (row > 1e-12) {
                check.precondition_ok = false;  // (A(t) - D(t)) v <= 0 fails on the grid
                return check;
            }
        }
    }

    check.ok = true;
    double prev = 0.0;
    for (int j = 0; j < traj.node_count(); ++j) {
        double norm = 0.0;
        for (int i = 0; i < traj.dimension(); ++i) {
            norm = std::max(norm, std::abs(traj.state(j)[i]) / weights[i]);
        }
        if (j > 0) {
            const double violation = norm - prev - 1e-9 * (1.0 + prev);
            if (violation > check.max_violation) check.max_violation = violation;
            if (violation > 0.0 && check.ok) {
                check.ok = false;
                check.first_failure_time = traj.node_time(j);
            }
        }
        prev = norm;
    }
    return check;
}

DiagnosticCheck check_box_invariance(const Trajectory& traj, const Vec& lower, const Vec& upper) {
    DiagnosticCheck check;
    double scale = 1.0;
    for (int i = 0; i < traj.dimension(); ++i) scale = std::max(scale, std::abs(upper[i]));
    const double slack = 1e-9 * scale;

    const auto& hist = traj.history();
    const int probes = 129;
    for (int q = 0; q <= probes; ++q) {
        const double offset =
            hist.horizon() == 0.0 ? 0.0 : -hist.horizon() + hist.horizon() * q / probes;
        const Vec v = hist.at(offset);
        for (int i = 0; i < traj.dimension(); ++i) {
            if (v[i] < lower[i] - slack || v[i] > upper[i] + slack) {
                check.precondition_ok = false;
                return check;
            }
        }
    }

    check.ok = true;
    for (int j = 0; j < traj.node_count(); ++j) {
        for (int i = 0; i < traj.dimension(); ++i) {
            const double x = traj.state(j)[i];
            const double violation = std::max(lower[i] - x, x - upper[i]) - slack;
            if (violation > check.max_violation) check.max_violation = violation;
            if (violation > 0.0 && check.ok) {
                check.ok = false;
                check.first_failure_time = traj.node_time(j);
            }
        }
    }
    return check;
}

DiagnosticCheck check_order_preservation(const SystemSpec& spec, const InitialHistory& lower,
                                         const InitialHistory& upper,
                                         const IntegrationConfig& config) {
    DiagnosticCheck check;
    const int probes = 257;
    const double horizon = std::max(lower.horizon(), upper.horizon());
    for (int q = 0; q <= probes; ++q) {
        const double offset = horizon == 0.0 ? 0.0 : -horizon + horizon * q / probes;
        const Vec lo = lower.at(std::max(offset, -lower.horizon()));
        const Vec hi = upper.at(std::max(offset, -upper.horizon()));
        for (int i = 0; i < spec.patches; ++i) {
            if (lo[i] > hi[i] + 1e-12) {
                check.precondition_ok = false;  // histories not ordered
                return check;
            }
        }
    }

    const Trajectory below = integrate(spec, lower, config);
    const Trajectory above = integrate(spec, upper, config);
    check.ok = true;
    const int nodes = std::min(below.node_count(), above.node_count());
    for (int j = 0; j < nodes; ++j) {
        for (int i = 0; i < spec.patches; ++i) {
            const double violation = below.state(j)[i] - above.state(j)[i] - 1e-8;
            if (violation > check.max_violation) check.max_violation = violation;
            if (violation > 0.0 && check.ok) {
                check.ok = false;
                check.first_failure_time = below.node_time(j);
            }
        }
    }
    return check;
}

DecayFit fit_decay_rate(const Trajectory& traj) {
    const int nodes = traj.node_count();
    std::vector<double> ts, logs;
    for (int j = nodes / 2; j < nodes; ++j) {
        double norm = 0.0;
        for (int i = 0; i < traj.dimension(); ++i) {
            norm = std::max(norm, std::abs(traj.state(j)[i]));
        }
        if (norm < 1e-280) break;  // underflowed tail: fit on the prefix
        ts.push_back(traj.node_time(j));
        logs.push_back(std::log(norm));
    }
    if (ts.size() < 2) {
        // Degenerate second half; fall back to the non-underflowed prefix.
        ts.clear();
        logs.clear();
        for (int j = 0; j < nodes; ++j) {
            double norm = 0.0;
            for (int i = 0; i < traj.dimension(); ++i) {
                norm = std::max(norm, std::abs(traj.state(j)[i]));
            }
            if (norm < 1e-280) break;
            ts.push_back(traj.node_time(j));
            logs.push_back(std::log(norm));
        }
    }
    DecayFit fit;
    if (ts.size() < 2) return fit;

    double meanT = 0.0, meanL = 0.0;
    for (std::size_t q = 0; q < ts.size(); ++q) {
        meanT += ts[q];
        meanL += logs[q];
    }
    meanT /= ts.size();
    meanL /= ts.size();
    double cov = 0.0, var = 0.0;
    for (std::size_t q = 0; q < ts.size(); ++q) {
        cov += (ts[q] - meanT) * (logs[q] - meanL);
        var += (ts[q] - meanT) * (ts[q] - meanT);
    }
    fit.rate = var > 0.0 ? -cov / var : 0.0;

    double norm0 = 0.0;
    for (int i = 0; i < traj.dimension(); ++i) {
        norm0 = std::max(norm0, std::abs(traj.state(0)[i]));
    }
    if (norm0 > 0.0) {
        double k = 0.0;
        for (int j = 0; j < nodes; ++j) {
            double norm = 0.0;
            for (int i = 0; i < traj.dimension(); ++i) {
                norm = std::max(norm, std::abs(traj.state(j)[i]));
            }
            const double growth = std::exp(fit.rate * (traj.node_time(j) - traj.start_time()));
            if (std::isfinite(growth)) k = std::max(k, norm * growth / norm0);
        }
        fit.amplitude = std::max(k, 1.0);
    }
    return fit;
}

}  // namespace coopdde
