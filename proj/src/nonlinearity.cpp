#include "coopdde/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "coopdde/errors.hpp"

namespace coopdde {

namespace {

constexpr double kSlopeProbe = 1e-8;
constexpr double kSlopeTol = 1e-5;

// Golden-section refinement of a unimodal maximum located on a coarse
// logarithmic grid.
double grid_search_max(const std::function<double(double)>& f) {
    double bestX = 1.0, bestV = -std::numeric_limits<double>::infinity();
    for (int k = -64; k <= 64; ++k) {
        const double x = std::pow(10.0, k / 4.0);
        const double v = f(x);
        if (v > bestV) {
            bestV = v;
            bestX = x;
        }
    }
    double lo = bestX / std::pow(10.0, 0.25);
    double hi = bestX * std::pow(10.0, 0.25);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    return std::max(f(0.5 * (lo + hi)), bestV);
}

}  // namespace

Nonlinearity::Nonlinearity(Family family, TimeFn crowding, double exponent, bool validate)
    : family_(family),
      crowding_(std::move(crowding)),
      exponent_(exponent),
      crowding_lo_(crowding_.lower_bound(0.0)),
      crowding_hi_(crowding_.upper_bound(0.0)) {
    if (!validate) return;

    if (!(exponent_ > 0.0)) throw StructuralError("Nonlinearity: exponent must be positive");
    if (family_ == Family::MackeyGlass && exponent_ < 1.0) {
        throw StructuralError("Nonlinearity: Mackey-Glass exponent must be >= 1");
    }
    if (!(crowding_lo_ > 0.0)) {
        throw StructuralError("Nonlinearity: crowding coefficient must be bounded away from zero");
    }

    // Unit slope at the origin, finite-difference probe on a small t grid.
    for (int i = 0; i <= 16; ++i) {
        const double t = 100.0 * i / 16.0;
        const double slope = value(t, kSlopeProbe) / kSlopeProbe;
        if (std::abs(slope - 1.0) > kSlopeTol) {
            throw StructuralError("Nonlinearity: slope at 0 deviates from 1 beyond tolerance");
        }
    }
    // Bracket sandwich on a coarse (t, x) grid.
    for (int i = 0; i <= 16; ++i) {
        const double t = 100.0 * i / 16.0;
        for (int q = 1; q <= 32; ++q) {
            const double x = 10.0 * q / 32.0;
            const double h = value(t, x);
            if (!(lower_bracket(x) <= h + 1e-12 && h <= upper_bracket(x) + 1e-12)) {
                throw StructuralError("Nonlinearity: bracket inequality failed on validation grid");
            }
        }
    }
}

Nonlinearity Nonlinearity::ricker(TimeFn crowding) {
    return Nonlinearity(Family::Ricker, std::move(crowding), 1.0, true);
}

Nonlinearity Nonlinearity::generalized_ricker(TimeFn crowding, double exponent) {
    return Nonlinearity(Family::GeneralizedRicker, std::move(crowding), exponent, true);
}

Nonlinearity Nonlinearity::mackey_glass(TimeFn crowding, double exponent) {
    return Nonlinearity(Family::MackeyGlass, std::move(crowding), exponent, true);
}

double Nonlinearity::eval_with_c(double c, double x) const {
    switch (family_) {
        case Family::Ricker:
            return x * std::exp(-c * x);
        case Family::GeneralizedRicker:
            return x * std::exp(-c * std::pow(x, exponent_));
        case Family::MackeyGlass:
            return x / (1.0 + c * std::pow(x, exponent_));
    }
    return 0.0;
}

double Nonlinearity::value(double t, double x) const { return eval_with_c(crowding_(t), x); }

double Nonlinearity::lower_bracket(double x) const { return eval_with_c(crowding_hi_, x); }

double Nonlinearity::upper_bracket(double x) const { return eval_with_c(crowding_lo_, x); }

double Nonlinearity::bracket_sup() const {
    if (family_ == Family::Ricker) {
        return 1.0 / (crowding_lo_ * std::exp(1.0));
    }
    if (family_ == Family::MackeyGlass && exponent_ == 1.0) {
        return 1.0 / crowding_lo_;
    }
    return grid_search_max([this](double x) { return upper_bracket(x); });
}

double Nonlinearity::lower_bracket_peak() const {
    switch (family_) {
        case Family::Ricker:
            return 1.0 / crowding_hi_;
        case Family::GeneralizedRicker:
            return std::pow(exponent_ * crowding_hi_, -1.0 / exponent_);
        case Family::MackeyGlass:
            if (exponent_ == 1.0) return std::numeric_limits<double>::infinity();
            return std::pow(crowding_hi_ * (exponent_ - 1.0), -1.0 / exponent_);
    }
    return 0.0;
}

double Nonlinearity::growth_threshold(double alpha) const {
    if (!(alpha > 1.0)) throw StructuralError("growth_threshold: alpha must exceed 1");
    const auto excess = [this, alpha](double x) { return lower_bracket(x) - x / alpha; };

    double hi = 1e-6;
    while (excess(hi) > 0.0 && hi < 1e12) hi *= 2.0;
    if (hi >= 1e12) return std::numeric_limits<double>::infinity();
    double lo = hi / 2.0;
    if (excess(lo) <= 0.0) {
        // The inequality already fails below the first probe.
        lo = 0.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
}

double Nonlinearity::equal_value_below_peak(double reference) const {
    const double peak = lower_bracket_peak();
    if (!(reference > peak)) {
        throw StructuralError("equal_value_below_peak: reference must lie past the peak");
    }
    const double target = lower_bracket(reference);
    double lo = 0.0, hi = peak;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (lower_bracket(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Nonlinearity Nonlinearity::rescaled(double factor) const {
    if (!(factor > 0.0)) throw StructuralError("Nonlinearity: rescale factor must be positive");
    const double cFactor = std::pow(factor, exponent_);
    // Skip revalidation: the slope probe is calibrated for desk-scale
    // crowding and rescaling can push c far outside that range.
    return Nonlinearity(family_, crowding_.scaled(cFactor), exponent_, false);
}

void to_json(nlohmann::json& j, const Nonlinearity& h) {
    switch (h.family()) {
        case Nonlinearity::Family::Ricker:
            j = {{"kind", "ricker"}, {"c", h.crowding()}};
            break;
        case Nonlinearity::Family::GeneralizedRicker:
            j = {{"kind", "gen_ricker"}, {"c", h.crowding()}, {"alpha", h.exponent()}};
            break;
        case Nonlinearity::Family::MackeyGlass:
            j = {{"kind", "mackey_glass"}, {"c", h.crowding()}, {"alpha", h.exponent()}};
            break;
    }
}

void from_json(const nlohmann::json& j, Nonlinearity& h) {
    const std::string kind = j.at("kind").get<std::string>();
    TimeFn c = j.at("c").get<TimeFn>();
    if (kind == "ricker") {
        h = Nonlinearity::ricker(std::move(c));
    } else if (kind == "gen_ricker") {
        h = Nonlinearity::generalized_ricker(std::move(c), j.at("alpha").get<double>());
    } else if (kind == "mackey_glass") {
        h = Nonlinearity::mackey_glass(std::move(c), j.at("alpha").get<double>());
    } else {
        throw StructuralError("Nonlinearity: unknown kind '" + kind + "'");
    }
}

}  // namespace coopdde
