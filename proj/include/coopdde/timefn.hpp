#pragma once

#include <variant>
#include <vector>

#include <json.hpp>

namespace coopdde {

/// Scalar function of time.  Three shapes cover the coefficient classes
/// the library accepts: constants, sinusoids a + b sin(omega t + phase),
/// and piecewise-linear tables clamped to constants beyond their knots.
/// All three are bounded and uniformly continuous by construction.
class TimeFn {
public:
    struct Constant {
        double value = 0.0;
    };
    struct Sinusoid {
        double base = 0.0;
        double amplitude = 0.0;
        double omega = 0.0;
        double phase = 0.0;
    };
    struct Table {
        std::vector<double> times;   // strictly increasing
        std::vector<double> values;  // same length, >= 1
    };

    TimeFn() : shape_(Constant{0.0}) {}

    static TimeFn constant(double value);
    static TimeFn sinusoid(double base, double amplitude, double omega, double phase = 0.0);
    static TimeFn table(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;

    /// Exact infimum / supremum over t in [from, +inf).
    double lower_bound(double from = 0.0) const;
    double upper_bound(double from = 0.0) const;

    bool is_constant() const { return std::holds_alternative<Constant>(shape_); }

    /// The function multiplied by a positive constant.
    TimeFn scaled(double factor) const;

    const std::variant<Constant, Sinusoid, Table>& shape() const { return shape_; }

private:
    std::variant<Constant, Sinusoid, Table> shape_;
};

void to_json(nlohmann::json& j, const TimeFn& f);
void from_json(const nlohmann::json& j, TimeFn& f);

}  // namespace coopdde
