#include "coopdde/timefn.hpp"

#include <algorithm>
#include <cmath>

#include "coopdde/errors.hpp"

namespace coopdde {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Extremum of a + b sin(omega t + phase) over [from, inf).  For omega != 0
// the full range [a-|b|, a+|b|] is attained on every period; omega == 0
// degenerates to a constant.
std::pair<double, double> sinusoid_range(const TimeFn::Sinusoid& s) {
    if (s.omega == 0.0) {
        const double v = s.base + s.amplitude * std::sin(s.phase);
        return {v, v};
    }
    return {s.base - std::abs(s.amplitude), s.base + std::abs(s.amplitude)};
}

double table_eval(const TimeFn::Table& tab, double t) {
    const auto& ts = tab.times;
    const auto& vs = tab.values;
    if (t <= ts.front()) return vs.front();
    if (t >= ts.back()) return vs.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return vs[lo] + w * (vs[hi] - vs[lo]);
}

std::pair<double, double> table_range(const TimeFn::Table& tab, double from) {
    // Piecewise-linear functions attain extremes at knots or at the clamp
    // value; restrict to knots at or after `from`, plus the value at `from`.
    double lo = table_eval(tab, from);
    double hi = lo;
    for (std::size_t i = 0; i < tab.times.size(); ++i) {
        if (tab.times[i] >= from) {
            lo = std::min(lo, tab.values[i]);
            hi = std::max(hi, tab.values[i]);
        }
    }
    lo = std::min(lo, tab.values.back());
    hi = std::max(hi, tab.values.back());
    return {lo, hi};
}

}  // namespace

TimeFn TimeFn::constant(double value) {
    if (!std::isfinite(value)) throw StructuralError("TimeFn: non-finite constant");
    TimeFn f;
    f.shape_ = Constant{value};
    return f;
}

TimeFn TimeFn::sinusoid(double base, double amplitude, double omega, double phase) {
    if (!std::isfinite(base) || !std::isfinite(amplitude) || !std::isfinite(omega) ||
        !std::isfinite(phase)) {
        throw StructuralError("TimeFn: non-finite sinusoid parameter");
    }
    TimeFn f;
    f.shape_ = Sinusoid{base, amplitude, omega, phase};
    return f;
}

TimeFn TimeFn::table(std::vector<double> times, std::vector<double> values) {
    if (times.empty() || times.size() != values.size()) {
        throw StructuralError("TimeFn: table needs matching, nonempty knot vectors");
    }
    if (!all_finite(times) || !all_finite(values)) {
        throw StructuralError("TimeFn: non-finite table knot");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1]) {
            throw StructuralError("TimeFn: table times must be strictly increasing");
        }
    }
    TimeFn f;
    f.shape_ = Table{std::move(times), std::move(values)};
    return f;
}

double TimeFn::operator()(double t) const {
    return std::visit(
        [t](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Constant>) {
                return s.value;
            } else if constexpr (std::is_same_v<S, Sinusoid>) {
                return s.base + s.amplitude * std::sin(s.omega * t + s.phase);
            } else {
                return table_eval(s, t);
            }
        },
        shape_);
}

double TimeFn::lower_bound(double from) const {
    return std::visit(
        [from](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Constant>) {
                return s.value;
            } else if constexpr (std::is_same_v<S, Sinusoid>) {
                return sinusoid_range(s).first;
            } else {
                return table_range(s, from).first;
            }
        },
        shape_);
}

double TimeFn::upper_bound(double from) const {
    return std::visit(
        [from](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Constant>) {
                return s.value;
            } else if constexpr (std::is_same_v<S, Sinusoid>) {
                return sinusoid_range(s).second;
            } else {
                return table_range(s, from).second;
            }
        },
        shape_);
}

TimeFn TimeFn::scaled(double factor) const {
    return std::visit(
        [factor](const auto& s) -> TimeFn {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Constant>) {
                return TimeFn::constant(s.value * factor);
            } else if constexpr (std::is_same_v<S, Sinusoid>) {
                return TimeFn::sinusoid(s.base * factor, s.amplitude * factor, s.omega, s.phase);
            } else {
                std::vector<double> values = s.values;
                for (double& v : values) v *= factor;
                return TimeFn::table(s.times, std::move(values));
            }
        },
        shape_);
}

void to_json(nlohmann::json& j, const TimeFn& f) {
    std::visit(
        [&j](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, TimeFn::Constant>) {
                j = {{"kind", "const"}, {"value", s.value}};
            } else if constexpr (std::is_same_v<S, TimeFn::Sinusoid>) {
                j = {{"kind", "sin"},
                     {"base", s.base},
                     {"amplitude", s.amplitude},
                     {"omega", s.omega},
                     {"phase", s.phase}};
            } else {
                j = {{"kind", "table"}, {"t", s.times}, {"v", s.values}};
            }
        },
        f.shape());
}

void from_json(const nlohmann::json& j, TimeFn& f) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "const") {
        f = TimeFn::constant(j.at("value").get<double>());
    } else if (kind == "sin") {
        f = TimeFn::sinusoid(j.at("base").get<double>(), j.at("amplitude").get<double>(),
                             j.at("omega").get<double>(),
                             j.value("phase", 0.0));
    } else if (kind == "table") {
        f = TimeFn::table(j.at("t").get<std::vector<double>>(),
                          j.at("v").get<std::vector<double>>());
    } else {
        throw StructuralError("TimeFn: unknown kind '" + kind + "'");
    }
}

}  // namespace coopdde
