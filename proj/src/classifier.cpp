#include "coopdde/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coopdde/errors.hpp"
#include "coopdde/parallel.hpp"
#include "coopdde/simplex.hpp"

namespace coopdde {

namespace {

constexpr double kPosTol = 1e-12;
// Growth thresholds are backed off from the exact equality point so the
// floor recurrence has a strictly positive margin and terminates.
constexpr double kThresholdBackoff = 1.0 - 1e-6;

std::string describe(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

/// Exact conservative bounds of (M(t) v)_i over all t >= 0:
/// inf(f + g) >= inf f + inf g per coefficient function.
struct MvBounds {
    Vec lower;
    Vec upper;
};

MvBounds conservative_mv_bounds(const SystemSpec& spec, const Vec& v) {
    MvBounds b;
    b.lower.assign(spec.patches, 0.0);
    b.upper.assign(spec.patches, 0.0);
    for (int i = 0; i < spec.patches; ++i) {
        double lo = -spec.loss[i].upper_bound(0.0) * v[i];
        double hi = -spec.loss[i].lower_bound(0.0) * v[i];
        for (int k = 0; k < spec.terms; ++k) {
            lo += spec.birth[i][k].lower_bound(0.0) * v[i];
            hi += spec.birth[i][k].upper_bound(0.0) * v[i];
        }
        for (int j = 0; j < spec.patches; ++j) {
            if (j == i) continue;
            lo += spec.migration[i][j].lower_bound(0.0) * v[j];
            hi += spec.migration[i][j].upper_bound(0.0) * v[j];
        }
        b.lower[i] = lo;
        b.upper[i] = hi;
    }
    return b;
}

std::vector<Matrix> sample_community(const SystemSpec& spec, const std::vector<double>& times) {
    std::vector<Matrix> family;
    family.reserve(times.size());
    for (double t : times) family.push_back(community_matrix(spec, t).entries());
    return family;
}

Matrix loss_minus_migration(const SystemSpec& spec, double t) {
    Matrix n(spec.patches);
    for (int i = 0; i < spec.patches; ++i) {
        n(i, i) = spec.loss[i](t);
        for (int j = 0; j < spec.patches; ++j) {
            if (j != i) n(i, j) = -spec.migration[i][j](t);
        }
    }
    return n;
}

double default_hstep(const SystemSpec& spec) {
    return spec.delay_horizon > 0.0 ? std::min(0.05, spec.delay_horizon / 8.0) : 0.01;
}

}  // namespace

std::string to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::ExtinctGas: return "extinct_gas";
        case VerdictKind::Permanent: return "permanent";
        case VerdictKind::Mixed: return "mixed";
        case VerdictKind::Undetermined: return "undetermined";
    }
    return "unknown";
}

std::string to_string(DecisionRule rule) {
    switch (rule) {
        case DecisionRule::SpectralGas: return "spectral_gas";
        case DecisionRule::SourceBlockThreshold: return "source_block_threshold";
        case DecisionRule::IrreducibleThreshold: return "irreducible_threshold";
        case DecisionRule::BlockSplit: return "block_split";
        case DecisionRule::CertificateGas: return "certificate_gas";
        case DecisionRule::CertificatePermanence: return "certificate_permanence";
        case DecisionRule::ConstantCertificateGas: return "constant_certificate_gas";
        case DecisionRule::ConstantCertificatePermanence:
            return "constant_certificate_permanence";
    }
    return "unknown";
}

Verdict classify_autonomous(const SystemSpec& spec, const ClassifierTolerances& tol) {
    if (!spec.autonomous_coefficients) {
        throw StructuralError("classify_autonomous: coefficients must be constant");
    }
    Verdict verdict;
    verdict.grid_certified = false;

    const MMatrixReport dom = is_nonsingular_M_matrix(loss_minus_migration(spec, 0.0));
    if (!dom.nonsingular_m_matrix) {
        verdict.kind = VerdictKind::Undetermined;
        verdict.reason = "loss-minus-migration matrix is not a non-singular M-matrix (" +
                         dom.reason + ")";
        verdict.boundary = dom.reason == "boundary";
        return verdict;
    }
    verdict.certificate.notes.push_back("loss-minus-migration certificate u = (" + [&] {
        std::string s;
        for (std::size_t i = 0; i < dom.certificate->size(); ++i) {
            if (i) s += ", ";
            s += describe((*dom.certificate)[i]);
        }
        return s;
    }() + ")");

    const CoopMatrix community = community_matrix(spec, 0.0);
    const SpectralReport spectral = spectral_bound(community);
    verdict.certificate.spectral = spectral;
    const bool irreducible = spectral.structure.block_count() == 1;

    if (spectral.s <= -tol.spectral) {
        verdict.kind = VerdictKind::ExtinctGas;
        verdict.rule = irreducible ? DecisionRule::IrreducibleThreshold : DecisionRule::SpectralGas;
        if (auto v = find_positive_vector(community, PositiveVectorQuery::leq_zero())) {
            verdict.certificate.vector_v = std::move(*v);
            verdict.certificate.notes.push_back(
                "constant certificate M v <= 0 also available");
        }
        return verdict;
    }
    if (std::abs(spectral.s) <= tol.spectral) {
        verdict.kind = VerdictKind::Undetermined;
        verdict.boundary = true;
        verdict.reason = "spectral bound within tolerance of zero";
        return verdict;
    }

    // s(M) > 0.  Source blocks decide permanence; otherwise split by block.
    const FrobeniusForm& form = spectral.structure;
    const int k = form.block_count();
    bool sourcesBoundary = false, allSourcesPositive = true;
    for (int b = 0; b < k; ++b) {
        if (!form.is_source(b)) continue;
        if (std::abs(spectral.block_bounds[b]) <= tol.spectral) sourcesBoundary = true;
        if (spectral.block_bounds[b] <= tol.spectral) allSourcesPositive = false;
    }
    if (sourcesBoundary) {
        verdict.kind = VerdictKind::Undetermined;
        verdict.boundary = true;
        verdict.reason = "a source block's spectral bound lies within tolerance of zero";
        return verdict;
    }
    if (allSourcesPositive) {
        verdict.kind = VerdictKind::Permanent;
        verdict.rule =
            irreducible ? DecisionRule::IrreducibleThreshold : DecisionRule::SourceBlockThreshold;
        if (auto v = find_positive_vector(community, PositiveVectorQuery::strictly_positive())) {
            verdict.certificate.vector_v = *v;
            const Vec mv = community.entries().multiply(*v);
            Vec eta(spec.patches);
            for (int i = 0; i < spec.patches; ++i) eta[i] = mv[i] / (*v)[i];
            verdict.certificate.eta = std::move(eta);
            verdict.certificate.notes.push_back(
                "constant certificate M v >> 0 also available");
        }
        return verdict;
    }

    // Per-block outcomes.  Feeding by a persistent block raises a block
    // regardless of its own bound; blocks whose feeders all die follow
    // their own bound (derived propagation rule).
    std::vector<std::optional<BlockOutcome::Status>> status(k);
    for (int b = 0; b < k; ++b) {
        bool fedByPersistent = false, fedByUnresolved = false;
        for (const auto& [to, from] : form.block_edges) {
            if (to != b) continue;
            if (!status[from].has_value()) {
                fedByUnresolved = true;
            } else if (*status[from] == BlockOutcome::Status::Persistent) {
                fedByPersistent = true;
            }
        }
        if (fedByPersistent) {
            status[b] = BlockOutcome::Status::Persistent;
            continue;
        }
        if (fedByUnresolved) continue;  // propagated indeterminacy
        const double sb = spectral.block_bounds[b];
        if (sb > tol.spectral) {
            status[b] = BlockOutcome::Status::Persistent;
        } else if (sb < -tol.spectral) {
            status[b] = BlockOutcome::Status::Extinct;
        }
        // |sb| within tolerance: left unresolved.
    }
    if (std::any_of(status.begin(), status.end(), [](const auto& s) { return !s.has_value(); })) {
        verdict.kind = VerdictKind::Undetermined;
        verdict.boundary = true;
        verdict.reason = "a block's spectral bound lies within tolerance of zero";
        return verdict;
    }

    verdict.kind = VerdictKind::Mixed;
    verdict.rule = DecisionRule::BlockSplit;
    verdict.certificate.notes.push_back(
        "non-source blocks classified by the derived propagation rule");
    for (int b = 0; b < k; ++b) {
        BlockOutcome outcome;
        outcome.indices = form.blocks[b];
        outcome.status = *status[b];
        outcome.spectral_bound = spectral.block_bounds[b];
        for (const auto& [to, from] : form.block_edges) {
            if (to == b && *status[from] == BlockOutcome::Status::Persistent) {
                outcome.fed_by_persistent = true;
            }
        }
        verdict.blocks.push_back(std::move(outcome));
    }
    return verdict;
}

namespace {

struct RatioTail {
    Vec lower;  // per-component tail minimum of the birth/loss ratio
    Vec upper;  // tail maximum
    bool valid = false;
};

RatioTail ratio_tail(const SystemSpec& spec, const Vec& v, const std::vector<double>& tailTimes) {
    RatioTail tail;
    tail.lower.assign(spec.patches, std::numeric_limits<double>::infinity());
    tail.upper.assign(spec.patches, -std::numeric_limits<double>::infinity());
    for (double t : tailTimes) {
        for (int i = 0; i < spec.patches; ++i) {
            double denom = spec.loss[i](t) * v[i];
            for (int j = 0; j < spec.patches; ++j) {
                if (j != i) denom -= spec.migration[i][j](t) * v[j];
            }
            if (!(denom > 0.0)) return tail;  // candidate unusable
            const double ratio = spec.birth_total(i, t) * v[i] / denom;
            tail.lower[i] = std::min(tail.lower[i], ratio);
            tail.upper[i] = std::max(tail.upper[i], ratio);
        }
    }
    tail.valid = true;
    return tail;
}

}  // namespace

Verdict classify_nonautonomous(const SystemSpec& spec, const GridPlan& plan,
                               const ClassifierTolerances& tol) {
    Verdict verdict;
    verdict.grid_certified = true;

    const HypothesisReport hyp = validate_hypotheses(spec, plan);
    const auto gate = [&](const HypothesisStatus& st, const char* name) -> bool {
        if (st.state == HypothesisStatus::State::Holds) return true;
        verdict.kind = VerdictKind::Undetermined;
        verdict.boundary = st.state == HypothesisStatus::State::Boundary;
        verdict.reason = std::string(name) + " hypothesis not grid-certified";
        return false;
    };
    if (!gate(hyp.coefficients, "coefficient") || !gate(hyp.births, "birth") ||
        !gate(hyp.brackets, "bracket")) {
        return verdict;
    }

    const std::vector<double> times = plan.times();
    const std::vector<Matrix> family = sample_community(spec, times);
    std::vector<double> tailTimes(times.begin() + 3 * times.size() / 4, times.end());
    bool boundarySeen = false;

    // Extinction certificate: v >> 0 with M(t) v <= 0, plus the tail
    // condition (positive tail births, or strictly negative tail slack).
    const bool sublinear = [&spec] {
        for (const auto& row : spec.shape) {
            for (const auto& h : row) {
                if (!h.sublinear()) return false;
            }
        }
        return true;
    }();
    if (sublinear) {
        if (auto v = find_common_positive_vector(family, PositiveVectorQuery::leq_zero())) {
            const MvBounds bounds = conservative_mv_bounds(spec, *v);
            bool boundCertified = true, tailCondition = true;
            for (int i = 0; i < spec.patches; ++i) {
                if (bounds.upper[i] > 0.0) boundCertified = false;
                double tailBirthMin = std::numeric_limits<double>::infinity();
                double tailMvMax = -std::numeric_limits<double>::infinity();
                for (double t : tailTimes) {
                    tailBirthMin = std::min(tailBirthMin, spec.birth_total(i, t));
                    const Vec mv = community_matrix(spec, t).entries().multiply(*v);
                    tailMvMax = std::max(tailMvMax, mv[i]);
                }
                if (!(tailBirthMin > kPosTol || tailMvMax < 0.0)) tailCondition = false;
            }
            if (boundCertified && tailCondition) {
                verdict.kind = VerdictKind::ExtinctGas;
                verdict.rule = DecisionRule::CertificateGas;
                verdict.certificate.vector_v = std::move(*v);
                verdict.certificate.notes.push_back(
                    "decay certified through exact coefficient bounds");
                return verdict;
            }
            boundarySeen = true;  // grid found a certificate the exact bounds cannot confirm
        }
    }

    // Permanence certificate: v >> 0 with M(t) v >= eta >> 0.
    if (auto v = find_common_positive_vector(family, PositiveVectorQuery::strictly_positive())) {
        const MvBounds bounds = conservative_mv_bounds(spec, *v);
        const bool certified = std::all_of(bounds.lower.begin(), bounds.lower.end(),
                                           [](double lo) { return lo > kPosTol; });
        if (certified) {
            Vec eta(spec.patches);
            for (int i = 0; i < spec.patches; ++i) eta[i] = bounds.lower[i] / (*v)[i];
            verdict.kind = VerdictKind::Permanent;
            verdict.rule = DecisionRule::CertificatePermanence;
            verdict.certificate.vector_v = std::move(*v);
            verdict.certificate.eta = std::move(eta);
            verdict.certificate.notes.push_back(
                "uniform slack certified through exact coefficient bounds");
            return verdict;
        }
        boundarySeen = true;
    }

    // Tail bounds of the birth/loss ratio for candidate weights.
    std::vector<Vec> candidates;
    candidates.emplace_back(spec.patches, 1.0);
    if (hyp.dominance_vector) candidates.push_back(*hyp.dominance_vector);
    {
        std::vector<Vec> rows;
        const std::size_t stride = std::max<std::size_t>(1, family.size() / 256);
        for (std::size_t g = 0; g < family.size(); g += stride) {
            for (int i = 0; i < spec.patches; ++i) {
                Vec row(spec.patches);
                for (int j = 0; j < spec.patches; ++j) row[j] = family[g](i, j);
                rows.push_back(std::move(row));
            }
        }
        if (auto bestEffort = maximize_min_slack(rows, 1.0, 1e6)) {
            Vec v = bestEffort->v;
            const double lo = *std::min_element(v.begin(), v.end());
            for (double& c : v) c /= lo;
            candidates.push_back(std::move(v));
        }
    }

    for (const Vec& v : candidates) {
        const RatioTail tail = ratio_tail(spec, v, tailTimes);
        if (!tail.valid) continue;

        const bool allAboveOne = std::all_of(tail.lower.begin(), tail.lower.end(),
                                             [&](double l) { return l > 1.0 + tol.ratio; });
        const bool allNearOrAboveOne = std::all_of(tail.lower.begin(), tail.lower.end(),
                                                   [&](double l) { return l > 1.0 - tol.ratio; });
        const bool allBelowOne =
            std::all_of(tail.upper.begin(), tail.upper.end(),
                        [&](double u) { return u < 1.0 - tol.ratio; }) &&
            std::all_of(tail.lower.begin(), tail.lower.end(), [](double l) { return l > 0.0; });
        const bool allNearOrBelowOne = std::all_of(tail.upper.begin(), tail.upper.end(),
                                                   [&](double u) { return u < 1.0 + tol.ratio; });

        if (allAboveOne) {
            verdict.kind = VerdictKind::Permanent;
            verdict.rule = DecisionRule::CertificatePermanence;
            verdict.certificate.vector_v = v;
            verdict.certificate.ratio_lower = tail.lower;
            verdict.certificate.ratio_upper = tail.upper;
            verdict.certificate.notes.push_back(
                "tail lower bound of the birth/loss ratio exceeds 1");
            return verdict;
        }
        if (allBelowOne && sublinear) {
            verdict.kind = VerdictKind::ExtinctGas;
            verdict.rule = DecisionRule::CertificateGas;
            verdict.certificate.vector_v = v;
            verdict.certificate.ratio_lower = tail.lower;
            verdict.certificate.ratio_upper = tail.upper;
            verdict.certificate.notes.push_back(
                "tail upper bound of the birth/loss ratio stays below 1");
            return verdict;
        }
        if (allNearOrAboveOne || allNearOrBelowOne) {
            boundarySeen = true;
            if (!verdict.certificate.ratio_lower) {
                verdict.certificate.vector_v = v;
                verdict.certificate.ratio_lower = tail.lower;
                verdict.certificate.ratio_upper = tail.upper;
            }
        }
    }

    verdict.kind = VerdictKind::Undetermined;
    verdict.boundary = boundarySeen;
    verdict.reason = boundarySeen ? "decisive quantities within tolerance of their thresholds"
                                  : "no applicable certificate found on the grid";
    return verdict;
}

DissipativityBound dissipativity_bound(const SystemSpec& spec) {
    DissipativityBound result;

    double sup = 0.0;
    for (int i = 0; i < spec.patches; ++i) {
        double feed = 0.0;
        for (int k = 0; k < spec.terms; ++k) {
            feed += spec.birth[i][k].upper_bound(0.0) * spec.shape[i][k].bracket_sup();
        }
        sup = std::max(sup, feed);
    }
    result.perturbation_sup = sup;

    double horizonForRuns = std::max(spec.delay_horizon, 1e-12);
    IntegrationConfig config;
    config.rhs_kind = IntegrationConfig::RightHandSide::LinearUndelayed;
    config.hstep = spec.delay_horizon > 0.0 ? std::min(0.02, spec.delay_horizon / 4.0) : 0.02;

    if (spec.autonomous_coefficients) {
        const Matrix linear = -loss_minus_migration(spec, 0.0);  // A - D
        result.rate = -spectral_bound(CoopMatrix(linear)).s;
        result.analytic_rate = true;
        if (!(result.rate > 1e-12)) {
            throw NumericalError("dissipativity_bound: linear part not certified stable");
        }
        config.t_end = std::clamp(12.0 / result.rate, 20.0, 200.0);
    } else {
        config.t_end = 50.0;
    }
    const long maxSteps = 200000;
    if (config.t_end / config.hstep > maxSteps) config.hstep = config.t_end / maxSteps;

    double amplitude = 1.0;
    double fittedRate = std::numeric_limits<double>::infinity();
    for (int basis = 0; basis < spec.patches; ++basis) {
        Vec e(spec.patches, 0.0);
        e[basis] = 1.0;
        const InitialHistory history =
            InitialHistory::constant(e, horizonForRuns, InitialHistory::Cone::NonNegative);
        const Trajectory traj = integrate(spec, history, config);
        if (traj.blowup_time()) {
            throw NumericalError("dissipativity_bound: linear part blew up");
        }
        const DecayFit fit = fit_decay_rate(traj);
        fittedRate = std::min(fittedRate, fit.rate);

        const double alpha = result.analytic_rate ? result.rate : fit.rate;
        for (int j = 0; j < traj.node_count(); ++j) {
            const double growth =
                std::exp(alpha * (traj.node_time(j) - traj.start_time()));
            if (!std::isfinite(growth)) break;
            amplitude = std::max(amplitude, max_norm(traj.state(j)) * growth);
        }
    }
    if (!result.analytic_rate) {
        result.rate = fittedRate;
        if (!(result.rate > 1e-12)) {
            throw NumericalError("dissipativity_bound: linear part not certified stable");
        }
        // Amplitudes were accumulated with per-run fitted rates; redo with
        // the common (slowest) rate for a coherent K.
        amplitude = 1.0;
        for (int basis = 0; basis < spec.patches; ++basis) {
            Vec e(spec.patches, 0.0);
            e[basis] = 1.0;
            const InitialHistory history =
                InitialHistory::constant(e, horizonForRuns, InitialHistory::Cone::NonNegative);
            const Trajectory traj = integrate(spec, history, config);
            for (int j = 0; j < traj.node_count(); ++j) {
                const double growth =
                    std::exp(result.rate * (traj.node_time(j) - traj.start_time()));
                if (!std::isfinite(growth)) break;
                amplitude = std::max(amplitude, max_norm(traj.state(j)) * growth);
            }
        }
    }
    result.amplitude = amplitude;
    result.bound = result.amplitude * result.perturbation_sup / result.rate;
    return result;
}

PersistenceFloor persistence_floor(const SystemSpec& spec, const Vec& v, const GridPlan& plan,
                                   const std::optional<Vec>& alphasIn) {
    if (static_cast<int>(v.size()) != spec.patches) {
        throw StructuralError("persistence_floor: scaling vector dimension mismatch");
    }
    for (double c : v) {
        if (!(c > 0.0)) throw StructuralError("persistence_floor: scaling vector must be >> 0");
    }

    PersistenceFloor floor;
    floor.scaling = v;

    // Slacks of the scaled system, eta_i = min_t (M(t) v)_i / v_i.
    const std::vector<double> times = plan.times();
    Vec eta(spec.patches, std::numeric_limits<double>::infinity());
    for (double t : times) {
        const Vec mv = community_matrix(spec, t).entries().multiply(v);
        for (int i = 0; i < spec.patches; ++i) eta[i] = std::min(eta[i], mv[i] / v[i]);
    }
    for (double e : eta) {
        if (!(e > 0.0)) {
            throw StructuralError(
                "persistence_floor: certificate slack not positive; permanence certificate "
                "required");
        }
    }

    Vec alphas(spec.patches);
    for (int i = 0; i < spec.patches; ++i) {
        const double dBar = spec.loss[i].upper_bound(0.0);
        const double limit = 1.0 + eta[i] / dBar;
        alphas[i] = alphasIn ? (*alphasIn)[i] : 1.0 + eta[i] / (2.0 * dBar);
        if (!(alphas[i] > 1.0) || !(alphas[i] < limit)) {
            throw StructuralError("persistence_floor: alpha outside (1, 1 + eta/sup d)");
        }
    }
    floor.alphas = alphas;

    // Scaled system: shapes absorb the per-component scaling.
    std::vector<std::vector<TimeFn>> scaledMigration = spec.migration;
    for (int i = 0; i < spec.patches; ++i) {
        for (int j = 0; j < spec.patches; ++j) {
            if (i != j) scaledMigration[i][j] = spec.migration[i][j].scaled(v[j] / v[i]);
        }
    }
    std::vector<std::vector<Nonlinearity>> scaledShape = spec.shape;
    for (int i = 0; i < spec.patches; ++i) {
        for (int k = 0; k < spec.terms; ++k) {
            scaledShape[i][k] = spec.shape[i][k].rescaled(v[i]);
        }
    }
    const SystemSpec scaled = SystemSpec::create(spec.loss, std::move(scaledMigration), spec.birth,
                                                 spec.delay, std::move(scaledShape),
                                                 spec.delay_horizon);

    floor.tail_bound_scaled = dissipativity_bound(scaled).bound;
    const double tailBound = floor.tail_bound_scaled;

    double m = tailBound;
    for (int i = 0; i < spec.patches; ++i) {
        for (int k = 0; k < spec.terms; ++k) {
            const Nonlinearity& h = scaled.shape[i][k];
            m = std::min(m, h.growth_threshold(alphas[i]) * kThresholdBackoff);
            if (tailBound > h.lower_bracket_peak()) {
                m = std::min(m, h.equal_value_below_peak(tailBound));
            }
        }
    }
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw NumericalError("persistence_floor: floor construction failed");
    }
    floor.floor_scaled = m;

    // Recurrence s_{k+1} = min(m, min_j alpha_j H_j(s_k)); the construction
    // of m guarantees strict increase and finite termination.
    const auto lowestBracket = [&scaled](int i, double x) {
        double b = std::numeric_limits<double>::infinity();
        for (const Nonlinearity& h : scaled.shape[i]) b = std::min(b, h.lower_bracket(x));
        return b;
    };
    double s = m * 1e-3;
    floor.trace.push_back(s);
    const int cap = 10'000;
    for (int it = 0; it < cap && s < m; ++it) {
        double lifted = std::numeric_limits<double>::infinity();
        for (int i = 0; i < spec.patches; ++i) {
            lifted = std::min(lifted, alphas[i] * lowestBracket(i, std::min(s, m)));
        }
        const double next = std::min(m, lifted);
        if (!(next > s)) {
            throw NumericalError("persistence_floor: floor construction failed (stalled)");
        }
        s = next;
        floor.trace.push_back(s);
    }
    if (s < m) {
        throw NumericalError("persistence_floor: floor construction failed (no finite ascent)");
    }

    floor.per_component_floor.assign(spec.patches, 0.0);
    double uniform = std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec.patches; ++i) {
        floor.per_component_floor[i] = m * v[i];
        uniform = std::min(uniform, floor.per_component_floor[i]);
    }
    floor.m = uniform;
    return floor;
}

ConsistencyReport verify_verdict(const SystemSpec& spec, const Verdict& verdict,
                                 const SimulationPlan& plan,
                                 const std::optional<PersistenceFloor>& floor) {
    if (verdict.kind == VerdictKind::Undetermined) {
        throw StructuralError("verify_verdict: nothing to verify for an undetermined verdict");
    }

    SimulationPlan p = plan;
    if (p.t_end <= 0.0) p.t_end = 100.0 * std::max(1.0, spec.delay_horizon);
    if (p.hstep <= 0.0) p.hstep = default_hstep(spec);

    ConsistencyReport report;
    report.runs.resize(p.runs);
    parallel_for(static_cast<std::size_t>(p.runs), [&](std::size_t run) {
        RunOutcome& outcome = report.runs[run];
        outcome.seed = p.seed + run;
        const InitialHistory history =
            InitialHistory::random_positive(spec.patches, spec.delay_horizon, outcome.seed);
        IntegrationConfig config;
        config.hstep = p.hstep;
        config.t_end = p.t_end;
        const Trajectory traj = integrate(spec, history, config);
        if (traj.blowup_time()) {
            outcome.pass = false;
            outcome.note = "integration blow-up at t = " + describe(*traj.blowup_time());
            return;
        }
        outcome.tails = tail_statistics(traj, p.t_end / 4.0);
        outcome.tails.extinct_threshold = p.extinct_threshold;
        outcome.tails.persist_threshold = p.persist_threshold;

        bool pass = true;
        std::string note;
        switch (verdict.kind) {
            case VerdictKind::ExtinctGas:
                for (int i = 0; i < spec.patches; ++i) {
                    if (!(outcome.tails.tail_max[i] < p.extinct_threshold)) {
                        pass = false;
                        note = "component " + std::to_string(i) + " tail max " +
                               describe(outcome.tails.tail_max[i]) + " not below threshold";
                        break;
                    }
                }
                break;
            case VerdictKind::Permanent:
                for (int i = 0; i < spec.patches; ++i) {
                    if (!(outcome.tails.tail_min[i] > p.persist_threshold)) {
                        pass = false;
                        note = "component " + std::to_string(i) + " tail min " +
                               describe(outcome.tails.tail_min[i]) + " not above threshold";
                        break;
                    }
                    if (floor &&
                        outcome.tails.tail_min[i] < 0.95 * floor->per_component_floor[i]) {
                        pass = false;
                        note = "component " + std::to_string(i) + " tail min below 95% of floor";
                        break;
                    }
                }
                break;
            case VerdictKind::Mixed:
                for (const BlockOutcome& block : verdict.blocks) {
                    for (int i : block.indices) {
                        if (block.status == BlockOutcome::Status::Persistent) {
                            if (!(outcome.tails.tail_min[i] > p.persist_threshold)) {
                                pass = false;
                                note = "persistent block component " + std::to_string(i) +
                                       " tail min too small";
                            }
                        } else if (!(outcome.tails.tail_max[i] < p.extinct_threshold)) {
                            pass = false;
                            note = "extinct block component " + std::to_string(i) +
                                   " tail max too large";
                        }
                    }
                }
                break;
            case VerdictKind::Undetermined:
                break;
        }
        outcome.pass = pass;
        outcome.note = std::move(note);
    });

    int passes = 0;
    for (const RunOutcome& r : report.runs) passes += r.pass ? 1 : 0;
    report.consistent = passes == p.runs;
    report.summary = std::to_string(passes) + "/" + std::to_string(p.runs) +
                     " runs consistent with verdict " + to_string(verdict.kind);
    return report;
}

void to_json(nlohmann::json& j, const TailStats& t) {
    j = nlohmann::json{{"tail_min", t.tail_min},
                       {"tail_max", t.tail_max},
                       {"window", t.window},
                       {"extinct_threshold", t.extinct_threshold},
                       {"persist_threshold", t.persist_threshold}};
}

void to_json(nlohmann::json& j, const Verdict& v) {
    nlohmann::json certificate = nlohmann::json::object();
    if (v.certificate.vector_v) certificate["v"] = *v.certificate.vector_v;
    if (v.certificate.eta) certificate["eta"] = *v.certificate.eta;
    if (v.certificate.ratio_lower) certificate["ratio_lower"] = *v.certificate.ratio_lower;
    if (v.certificate.ratio_upper) certificate["ratio_upper"] = *v.certificate.ratio_upper;
    if (v.certificate.spectral) {
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& idx : v.certificate.spectral->structure.blocks) blocks.push_back(idx);
        certificate["spectral"] = {{"s", v.certificate.spectral->s},
                                   {"block_bounds", v.certificate.spectral->block_bounds},
                                   {"blocks", std::move(blocks)}};
    }
    if (!v.certificate.notes.empty()) certificate["notes"] = v.certificate.notes;

    nlohmann::json blocks = nlohmann::json::array();
    for (const BlockOutcome& b : v.blocks) {
        blocks.push_back(nlohmann::json{
            {"indices", b.indices},
            {"status", b.status == BlockOutcome::Status::Persistent ? "persistent" : "extinct"},
            {"spectral_bound", b.spectral_bound},
            {"fed_by_persistent", b.fed_by_persistent}});
    }

    j = nlohmann::json{{"kind", to_string(v.kind)},
                       {"theorem", v.rule ? to_string(*v.rule) : ""},
                       {"boundary", v.boundary},
                       {"grid_certified", v.grid_certified},
                       {"reason", v.reason},
                       {"certificate", std::move(certificate)},
                       {"blocks", std::move(blocks)}};
}

void to_json(nlohmann::json& j, const PersistenceFloor& f) {
    j = nlohmann::json{{"m", f.m},
                       {"floor_scaled", f.floor_scaled},
                       {"per_component_floor", f.per_component_floor},
                       {"alphas", f.alphas},
                       {"trace", f.trace},
                       {"scaling", f.scaling},
                       {"tail_bound_scaled", f.tail_bound_scaled}};
}

void to_json(nlohmann::json& j, const DissipativityBound& b) {
    j = nlohmann::json{{"perturbation_sup", b.perturbation_sup},
                       {"amplitude", b.amplitude},
                       {"rate", b.rate},
                       {"bound", b.bound},
                       {"rate_kind", b.analytic_rate ? "analytic" : "empirical"}};
}

void to_json(nlohmann::json& j, const ConsistencyReport& r) {
    nlohmann::json runs = nlohmann::json::array();
    for (const RunOutcome& run : r.runs) {
        runs.push_back(nlohmann::json{
            {"seed", run.seed}, {"pass", run.pass}, {"note", run.note}, {"tails", run.tails}});
    }
    j = nlohmann::json{
        {"consistent", r.consistent}, {"summary", r.summary}, {"runs", std::move(runs)}};
}

}  // namespace coopdde
