#pragma once

#include <json.hpp>

#include "coopdde/timefn.hpp"

namespace coopdde {

/// Birth-rate shape h(t, x) with h(t, 0) = 0 and unit slope at 0.
/// Three families:
///   Ricker             x e^{-c(t) x}
///   GeneralizedRicker  x e^{-c(t) x^p}          (p > 0)
///   MackeyGlass        x / (1 + c(t) x^p)       (p >= 1)
/// The crowding coefficient c(t) must stay bounded away from zero, which
/// keeps every family bounded and strictly below the identity.
///
/// Bracketing: with cLo <= c(t) <= cHi for all t,
///   lower_bracket(x) = h(x; cHi) <= h(t, x) <= h(x; cLo) = upper_bracket(x).
class Nonlinearity {
public:
    enum class Family { Ricker, GeneralizedRicker, MackeyGlass };

    Nonlinearity() : Nonlinearity(Family::Ricker, TimeFn::constant(1.0), 1.0, false) {}

    static Nonlinearity ricker(TimeFn crowding);
    static Nonlinearity generalized_ricker(TimeFn crowding, double exponent);
    static Nonlinearity mackey_glass(TimeFn crowding, double exponent);

    double value(double t, double x) const;
    double lower_bracket(double x) const;
    double upper_bracket(double x) const;

    /// sup over x >= 0 of the upper bracket.  Closed form for Ricker and
    /// Mackey-Glass with exponent 1; grid search with golden-section
    /// refinement for the generalized forms.
    double bracket_sup() const;

    /// True when the upper bracket lies strictly below the identity for
    /// x > 0, i.e. the crowding coefficient is bounded away from zero.
    bool sublinear() const { return crowding_lo_ > 0.0; }

    double crowding_lo() const { return crowding_lo_; }
    double crowding_hi() const { return crowding_hi_; }
    Family family() const { return family_; }
    double exponent() const { return exponent_; }
    const TimeFn& crowding() const { return crowding_; }

    /// Argmax of the lower bracket (+inf when it is nondecreasing).
    double lower_bracket_peak() const;

    /// Largest x such that y / alpha < lower_bracket(y) on (0, x],
    /// located by bisection (alpha > 1).
    double growth_threshold(double alpha) const;

    /// The point on the increasing branch of the lower bracket whose value
    /// equals lower_bracket(reference); requires reference > peak.
    double equal_value_below_peak(double reference) const;

    /// Shape of the variable-rescaled system: h(v x) / v.  Stays within the
    /// same family with the crowding coefficient multiplied by v^p.
    Nonlinearity rescaled(double factor) const;

private:
    Nonlinearity(Family family, TimeFn crowding, double exponent, bool validate);
    double eval_with_c(double c, double x) const;

    Family family_ = Family::Ricker;
    TimeFn crowding_;
    double exponent_ = 1.0;
    double crowding_lo_ = 0.0;
    double crowding_hi_ = 0.0;
};

void to_json(nlohmann::json& j, const Nonlinearity& h);
void from_json(const nlohmann::json& j, Nonlinearity& h);

}  // namespace coopdde
