#include "coopdde/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coopdde/errors.hpp"
#include "coopdde/simplex.hpp"

namespace coopdde {

namespace {

constexpr double kPosTol = 1e-12;
constexpr double kFeasTol = 1e-9;

bool is_zero_fn(const TimeFn& f) { return f.is_constant() && f(0.0) == 0.0; }

void require(bool ok, const std::string& message) {
    if (!ok) throw StructuralError(message);
}

HypothesisWitness time_witness(std::string constraint, double t, int component, double value) {
    HypothesisWitness w;
    w.constraint = std::move(constraint);
    w.t = t;
    w.x = std::numeric_limits<double>::quiet_NaN();
    w.component = component;
    w.value = value;
    return w;
}

// Grid argmin of a scalar time function; returns (t, value).
std::pair<double, double> grid_min(const std::function<double(double)>& f,
                                   const std::vector<double>& times) {
    double bestT = times.front(), bestV = f(times.front());
    for (double t : times) {
        const double v = f(t);
        if (v < bestV) {
            bestV = v;
            bestT = t;
        }
    }
    return {bestT, bestV};
}

bool uses_sinusoid(const TimeFn& f) {
    return std::holds_alternative<TimeFn::Sinusoid>(f.shape());
}

}  // namespace

SystemSpec SystemSpec::create(std::vector<TimeFn> loss,
                              std::vector<std::vector<TimeFn>> migration,
                              std::vector<std::vector<TimeFn>> birth,
                              std::vector<std::vector<TimeFn>> delay,
                              std::vector<std::vector<Nonlinearity>> shape,
                              double delayHorizon) {
    const int n = static_cast<int>(loss.size());
    require(n >= 1, "SystemSpec: at least one patch required");
    require(static_cast<int>(migration.size()) == n, "SystemSpec: migration must be n x n");
    for (const auto& row : migration) {
        require(static_cast<int>(row.size()) == n, "SystemSpec: migration must be n x n");
    }
    require(!birth.empty() && static_cast<int>(birth.size()) == n,
            "SystemSpec: birth must be n x m");
    const int m = static_cast<int>(birth.front().size());
    require(m >= 1, "SystemSpec: at least one birth term required");
    auto checkRect = [&](const auto& mat, const char* name) {
        require(static_cast<int>(mat.size()) == n, std::string("SystemSpec: ") + name + " rows");
        for (const auto& row : mat) {
            require(static_cast<int>(row.size()) == m,
                    std::string("SystemSpec: ") + name + " columns");
        }
    };
    checkRect(birth, "birth");
    checkRect(delay, "delay");
    checkRect(shape, "shape");
    require(delayHorizon >= 0.0 && std::isfinite(delayHorizon),
            "SystemSpec: delay horizon must be finite and nonnegative");

    for (int i = 0; i < n; ++i) {
        require(loss[i].lower_bound(0.0) >= 0.0, "SystemSpec: negative loss rate");
        require(is_zero_fn(migration[i][i]), "SystemSpec: migration diagonal must be zero");
        for (int j = 0; j < n; ++j) {
            require(migration[i][j].lower_bound(0.0) >= 0.0,
                    "SystemSpec: negative migration rate");
        }
        double birthSup = 0.0;
        for (int k = 0; k < m; ++k) {
            require(birth[i][k].lower_bound(0.0) >= 0.0, "SystemSpec: negative birth coefficient");
            birthSup += birth[i][k].upper_bound(0.0);
            require(delay[i][k].lower_bound(0.0) >= 0.0, "SystemSpec: negative delay");
            require(delay[i][k].upper_bound(0.0) <= delayHorizon + 1e-12,
                    "SystemSpec: delay exceeds declared horizon");
        }
        require(birthSup > 0.0, "SystemSpec: total birth rate identically zero in a patch");
    }

    SystemSpec spec;
    spec.patches = n;
    spec.terms = m;
    spec.loss = std::move(loss);
    spec.migration = std::move(migration);
    spec.birth = std::move(birth);
    spec.delay = std::move(delay);
    spec.shape = std::move(shape);
    spec.delay_horizon = delayHorizon;

    bool autonomous = true;
    for (int i = 0; i < n && autonomous; ++i) {
        autonomous = spec.loss[i].is_constant();
        for (int j = 0; j < n && autonomous; ++j) autonomous = spec.migration[i][j].is_constant();
        for (int k = 0; k < m && autonomous; ++k) {
            autonomous = spec.birth[i][k].is_constant() && spec.shape[i][k].crowding().is_constant();
        }
    }
    spec.autonomous_coefficients = autonomous;
    return spec;
}

double SystemSpec::birth_total(int patch, double t) const {
    double sum = 0.0;
    for (int k = 0; k < terms; ++k) sum += birth[patch][k](t);
    return sum;
}

SystemSpec build_nicholson(const std::vector<TimeFn>& loss,
                           const std::vector<std::vector<TimeFn>>& migration,
                           const std::vector<std::vector<TimeFn>>& birth,
                           const std::vector<std::vector<TimeFn>>& crowding,
                           const std::vector<std::vector<TimeFn>>& delay) {
    require(crowding.size() == birth.size(), "build_nicholson: crowding must be n x m");
    std::vector<std::vector<Nonlinearity>> shape;
    shape.reserve(crowding.size());
    double horizon = 0.0;
    for (const auto& row : delay) {
        for (const auto& tau : row) horizon = std::max(horizon, tau.upper_bound(0.0));
    }
    for (const auto& row : crowding) {
        std::vector<Nonlinearity> shapeRow;
        shapeRow.reserve(row.size());
        for (const auto& c : row) shapeRow.push_back(Nonlinearity::ricker(c));
        shape.push_back(std::move(shapeRow));
    }
    return SystemSpec::create(loss, migration, birth, delay, std::move(shape), horizon);
}

Vec rhs(const SystemSpec& spec, double t, const PastState& past) {
    const Vec now = past.at(t);
    Vec f(spec.patches, 0.0);
    for (int i = 0; i < spec.patches; ++i) {
        double acc = -spec.loss[i](t) * now[i];
        for (int j = 0; j < spec.patches; ++j) {
            if (j != i) acc += spec.migration[i][j](t) * now[j];
        }
        for (int k = 0; k < spec.terms; ++k) {
            const double lag = spec.delay[i][k](t);
            const double xLag = past.at(t - lag)[i];
            acc += spec.birth[i][k](t) * spec.shape[i][k].value(t, xLag);
        }
        f[i] = acc;
    }
    return f;
}

Vec rhs_linearized(const SystemSpec& spec, double t, const PastState& past) {
    const Vec now = past.at(t);
    Vec f(spec.patches, 0.0);
    for (int i = 0; i < spec.patches; ++i) {
        double acc = -spec.loss[i](t) * now[i];
        for (int j = 0; j < spec.patches; ++j) {
            if (j != i) acc += spec.migration[i][j](t) * now[j];
        }
        for (int k = 0; k < spec.terms; ++k) {
            const double lag = spec.delay[i][k](t);
            acc += spec.birth[i][k](t) * past.at(t - lag)[i];
        }
        f[i] = acc;
    }
    return f;
}

CoopMatrix community_matrix(const SystemSpec& spec, double t) {
    Matrix m(spec.patches);
    for (int i = 0; i < spec.patches; ++i) {
        m(i, i) = spec.birth_total(i, t) - spec.loss[i](t);
        for (int j = 0; j < spec.patches; ++j) {
            if (j != i) m(i, j) = spec.migration[i][j](t);
        }
    }
    return CoopMatrix(std::move(m));
}

GridPlan GridPlan::defaults(const SystemSpec& spec) {
    GridPlan plan;
    plan.t_end = std::max(100.0, 20.0 * spec.delay_horizon);
    plan.t_samples = 10'000;
    plan.x_max = 0.0;
    plan.x_samples = 200;
    return plan;
}

std::vector<double> GridPlan::times() const {
    std::vector<double> ts(t_samples);
    for (int i = 0; i < t_samples; ++i) ts[i] = t_end * i / double(t_samples - 1);
    return ts;
}

double rough_state_bound(const SystemSpec& spec) {
    double worst = 0.0;
    double weakestLoss = std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec.patches; ++i) {
        double feed = 0.0;
        for (int k = 0; k < spec.terms; ++k) {
            feed += spec.birth[i][k].upper_bound(0.0) * spec.shape[i][k].bracket_sup();
        }
        worst = std::max(worst, feed);
        weakestLoss = std::min(weakestLoss, spec.loss[i].lower_bound(0.0));
    }
    return worst / std::max(weakestLoss, 1e-6);
}

bool HypothesisReport::all_hold() const {
    const auto ok = [](const HypothesisStatus& s) {
        return s.state == HypothesisStatus::State::Holds;
    };
    return ok(coefficients) && ok(dominance) && ok(births) && ok(brackets);
}

namespace {

HypothesisStatus check_coefficients(const SystemSpec& spec, const std::vector<double>& times) {
    HypothesisStatus st;
    st.detail = "loss positive, migration nonnegative; regularity structural for all shapes";
    for (int i = 0; i < spec.patches; ++i) {
        const double lb = spec.loss[i].lower_bound(0.0);
        if (lb > kPosTol) continue;
        const auto [tw, vw] = grid_min([&](double t) { return spec.loss[i](t); }, times);
        if (lb < -kPosTol || vw < -kPosTol) {
            st.state = HypothesisStatus::State::Fails;
            st.witnesses.push_back(time_witness("loss rate must stay positive", tw, i, vw));
        } else if (st.state == HypothesisStatus::State::Holds) {
            st.state = HypothesisStatus::State::Boundary;
            st.witnesses.push_back(time_witness("loss rate touches zero", tw, i, vw));
        }
    }
    return st;
}

HypothesisStatus check_births(const SystemSpec& spec,
                              const std::vector<double>& times) {
    HypothesisStatus st;
    st.detail = "birth and delay functions nonnegative; total birth rate positive per patch";
    for (int i = 0; i < spec.patches; ++i) {
        double sumLower = 0.0;
        for (int k = 0; k < spec.terms; ++k) sumLower += spec.birth[i][k].lower_bound(0.0);
        if (sumLower > kPosTol) continue;
        const auto [tw, vw] =
            grid_min([&](double t) { return spec.birth_total(i, t); }, times);
        if (vw < -kPosTol) {
            st.state = HypothesisStatus::State::Fails;
            st.witnesses.push_back(time_witness("total birth rate negative", tw, i, vw));
        } else if (vw <= kPosTol) {
            if (st.state == HypothesisStatus::State::Holds) {
                st.state = HypothesisStatus::State::Boundary;
            }
            st.witnesses.push_back(time_witness("total birth rate touches zero", tw, i, vw));
        }
        // Grid minimum clearly positive: exact lower bound was merely
        // conservative (out-of-phase terms); grid certification stands.
    }
    return st;
}

struct DominanceOutcome {
    HypothesisStatus status;
    std::optional<Vec> vector;
};

DominanceOutcome check_dominance(const SystemSpec& spec, const std::vector<double>& times) {
    DominanceOutcome out;
    out.status.detail = "searching v >> 0 with (D(t)-A(t)) v >= 0 on the grid, strict on the tail";

    std::vector<Matrix> family;
    const std::size_t stride = std::max<std::size_t>(1, times.size() / 1024);
    std::vector<double> sampleTimes;
    for (std::size_t g = 0; g < times.size(); g += stride) sampleTimes.push_back(times[g]);
    if (sampleTimes.back() != times.back()) sampleTimes.push_back(times.back());
    auto lossMinusMigration = [&spec](double t) {
        Matrix n(spec.patches);
        for (int i = 0; i < spec.patches; ++i) {
            n(i, i) = spec.loss[i](t);
            for (int j = 0; j < spec.patches; ++j) {
                if (j != i) n(i, j) = -spec.migration[i][j](t);
            }
        }
        return n;
    };
    for (double t : sampleTimes) family.push_back(lossMinusMigration(t));

    std::vector<Vec> rows;
    for (const Matrix& mat : family) {
        for (int i = 0; i < spec.patches; ++i) {
            Vec row(spec.patches);
            for (int j = 0; j < spec.patches; ++j) row[j] = mat(i, j);
            rows.push_back(std::move(row));
        }
    }

    auto best = maximize_min_slack(rows, 1.0, 1e6);
    auto fullWorst = [&](const Vec& v, double* argT, int* argI) {
        double worst = std::numeric_limits<double>::infinity();
        for (double t : times) {
            const Vec nv = lossMinusMigration(t).multiply(v);
            for (int i = 0; i < spec.patches; ++i) {
                if (nv[i] < worst) {
                    worst = nv[i];
                    if (argT) *argT = t;
                    if (argI) *argI = i;
                }
            }
        }
        return worst;
    };

    double tw = 0.0;
    int iw = -1;
    const double worst = best ? fullWorst(best->v, &tw, &iw) : -1.0;
    if (best && worst >= kFeasTol) {
        out.status.state = HypothesisStatus::State::Holds;
        out.vector = best->v;
        return out;
    }
    if (best && worst >= -kPosTol) {
        // Nonnegative on the grid; try to recover strictness on the tail only.
        std::vector<Vec> tailRows;
        Vec tailRhs, hardRhs(rows.size(), 0.0);
        const std::size_t tailStart = sampleTimes.size() * 3 / 4;
        for (std::size_t g = tailStart; g < sampleTimes.size(); ++g) {
            const Matrix mat = lossMinusMigration(sampleTimes[g]);
            for (int i = 0; i < spec.patches; ++i) {
                Vec row(spec.patches);
                for (int j = 0; j < spec.patches; ++j) row[j] = mat(i, j);
                tailRows.push_back(std::move(row));
                tailRhs.push_back(0.0);
            }
        }
        auto tail = maximize_min_slack(tailRows, tailRhs, rows, hardRhs, 1.0, 1e6);
        if (tail && tail->slack >= kFeasTol && fullWorst(tail->v, nullptr, nullptr) >= -kPosTol) {
            out.status.state = HypothesisStatus::State::Holds;
            out.status.detail += "; strictness certified on the grid tail only";
            out.vector = tail->v;
            return out;
        }
        out.status.state = HypothesisStatus::State::Boundary;
        out.status.witnesses.push_back(
            time_witness("dominance slack not strictly positive", tw, iw, worst));
        out.vector = best->v;
        return out;
    }
    out.status.state = HypothesisStatus::State::Fails;
    if (best) {
        out.status.witnesses.push_back(time_witness(
            "(D(t)-A(t)) v >= 0 infeasible over the box; most violated row shown", tw, iw, worst));
    }
    return out;
}

HypothesisStatus check_brackets(const SystemSpec& spec,
                                const std::vector<double>& times,
                                double xMax,
                                int xSamples) {
    HypothesisStatus st;
    st.detail = "bracket sandwich and lower-bracket positivity on the (t, x) grid";
    const std::size_t stride = std::max<std::size_t>(1, times.size() / 256);
    for (int i = 0; i < spec.patches && st.state != HypothesisStatus::State::Fails; ++i) {
        for (int k = 0; k < spec.terms; ++k) {
            const Nonlinearity& h = spec.shape[i][k];
            for (std::size_t g = 0; g < times.size(); g += stride) {
                const double t = times[g];
                if (h.value(t, 0.0) != 0.0) {
                    st.state = HypothesisStatus::State::Fails;
                    HypothesisWitness w = time_witness("shape must vanish at x = 0", t, i,
                                                       h.value(t, 0.0));
                    w.x = 0.0;
                    st.witnesses.push_back(w);
                    break;
                }
                for (int q = 1; q <= xSamples; ++q) {
                    const double x = xMax * q / xSamples;
                    const double v = h.value(t, x);
                    const bool sandwich =
                        h.lower_bracket(x) <= v + 1e-12 && v <= h.upper_bracket(x) + 1e-12;
                    const bool positive = h.lower_bracket(x) > 0.0;
                    if (!sandwich || !positive) {
                        st.state = HypothesisStatus::State::Fails;
                        HypothesisWitness w = time_witness(
                            sandwich ? "lower bracket not positive" : "bracket sandwich violated",
                            t, i, v);
                        w.x = x;
                        st.witnesses.push_back(w);
                        break;
                    }
                }
                if (st.state == HypothesisStatus::State::Fails) break;
            }
        }
    }
    return st;
}

}  // namespace

HypothesisReport validate_hypotheses(const SystemSpec& spec, const GridPlan& plan) {
    require(plan.t_samples >= 2, "validate_hypotheses: grid needs at least two samples");
    require(plan.t_end >= 10.0 * spec.delay_horizon,
            "validate_hypotheses: grid must cover at least ten delay horizons");
    const std::vector<double> times = plan.times();

    HypothesisReport report;
    report.coefficients = check_coefficients(spec, times);
    report.births = check_births(spec, times);

    DominanceOutcome dom = check_dominance(spec, times);
    report.dominance = std::move(dom.status);
    report.dominance_vector = std::move(dom.vector);

    report.state_grid_max = plan.x_max > 0.0 ? plan.x_max
                                             : 10.0 * std::max(rough_state_bound(spec), 0.1);
    report.brackets = check_brackets(spec, times, report.state_grid_max, plan.x_samples);

    for (int i = 0; i < spec.patches && !report.asymptotically_unverifiable; ++i) {
        report.asymptotically_unverifiable = uses_sinusoid(spec.loss[i]);
        for (int j = 0; j < spec.patches && !report.asymptotically_unverifiable; ++j) {
            report.asymptotically_unverifiable = uses_sinusoid(spec.migration[i][j]);
        }
    }
    return report;
}

void to_json(nlohmann::json& j, const SystemSpec& spec) {
    j = nlohmann::json{{"n", spec.patches},    {"m", spec.terms},   {"d", spec.loss},
                       {"a", spec.migration},  {"beta", spec.birth}, {"tau", spec.delay},
                       {"h", spec.shape},      {"tau_max", spec.delay_horizon}};
}

void from_json(const nlohmann::json& j, SystemSpec& spec) {
    auto loss = j.at("d").get<std::vector<TimeFn>>();
    auto migration = j.at("a").get<std::vector<std::vector<TimeFn>>>();
    auto birth = j.at("beta").get<std::vector<std::vector<TimeFn>>>();
    auto delay = j.at("tau").get<std::vector<std::vector<TimeFn>>>();
    auto shape = j.at("h").get<std::vector<std::vector<Nonlinearity>>>();
    spec = SystemSpec::create(std::move(loss), std::move(migration), std::move(birth),
                              std::move(delay), std::move(shape), j.at("tau_max").get<double>());
    if (j.contains("n")) require(j.at("n").get<int>() == spec.patches, "SystemSpec: n mismatch");
    if (j.contains("m")) require(j.at("m").get<int>() == spec.terms, "SystemSpec: m mismatch");
}

namespace {

const char* state_name(HypothesisStatus::State s) {
    switch (s) {
        case HypothesisStatus::State::Holds: return "holds";
        case HypothesisStatus::State::Boundary: return "boundary";
        case HypothesisStatus::State::Fails: return "fails";
    }
    return "unknown";
}

}  // namespace

void to_json(nlohmann::json& j, const HypothesisStatus& s) {
    nlohmann::json witnesses = nlohmann::json::array();
    for (const auto& w : s.witnesses) {
        nlohmann::json jw{{"constraint", w.constraint},
                          {"t", w.t},
                          {"component", w.component},
                          {"value", w.value}};
        if (!std::isnan(w.x)) jw["x"] = w.x;
        witnesses.push_back(std::move(jw));
    }
    j = nlohmann::json{{"state", state_name(s.state)},
                       {"detail", s.detail},
                       {"witnesses", std::move(witnesses)}};
}

void to_json(nlohmann::json& j, const HypothesisReport& r) {
    j = nlohmann::json{{"coefficients", r.coefficients},
                       {"dominance", r.dominance},
                       {"births", r.births},
                       {"brackets", r.brackets},
                       {"grid_certified", true},
                       {"asymptotically_unverifiable", r.asymptotically_unverifiable},
                       {"state_grid_max", r.state_grid_max}};
    if (r.dominance_vector) j["dominance_vector"] = *r.dominance_vector;
}

}  // namespace coopdde
