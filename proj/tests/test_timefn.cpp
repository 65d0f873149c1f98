#include <doctest.h>

#include <cmath>

#include "coopdde/errors.hpp"
#include "coopdde/nonlinearity.hpp"
#include "coopdde/timefn.hpp"

using namespace coopdde;

TEST_CASE("time function evaluation and bounds") {
    const TimeFn c = TimeFn::constant(2.5);
    CHECK(c(0.0) == 2.5);
    CHECK(c(100.0) == 2.5);
    CHECK(c.lower_bound() == 2.5);
    CHECK(c.upper_bound() == 2.5);
    CHECK(c.is_constant());

    const TimeFn s = TimeFn::sinusoid(2.0, 0.5, 1.0);
    CHECK(s(0.0) == doctest::Approx(2.0));
    CHECK(s(M_PI / 2.0) == doctest::Approx(2.5));
    CHECK(s.lower_bound() == doctest::Approx(1.5));
    CHECK(s.upper_bound() == doctest::Approx(2.5));
    CHECK(!s.is_constant());

    const TimeFn frozen = TimeFn::sinusoid(2.0, 0.5, 0.0, M_PI / 2.0);
    CHECK(frozen.lower_bound() == doctest::Approx(2.5));
    CHECK(frozen.upper_bound() == doctest::Approx(2.5));

    const TimeFn t = TimeFn::table({0.0, 1.0, 3.0}, {1.0, 3.0, 0.0});
    CHECK(t(-5.0) == 1.0);   // clamped before the first knot
    CHECK(t(0.5) == doctest::Approx(2.0));
    CHECK(t(10.0) == 0.0);   // clamped beyond the last knot
    CHECK(t.lower_bound(0.0) == 0.0);
    CHECK(t.upper_bound(0.0) == 3.0);
    CHECK(t.lower_bound(4.0) == 0.0);
    CHECK(t.upper_bound(4.0) == 0.0);  // only the clamp tail remains

    CHECK_THROWS_AS(TimeFn::table({1.0, 1.0}, {0.0, 0.0}), StructuralError);
    CHECK_THROWS_AS(TimeFn::table({}, {}), StructuralError);
}

TEST_CASE("time function scaling") {
    const TimeFn s = TimeFn::sinusoid(2.0, 0.5, 3.0).scaled(2.0);
    CHECK(s(0.7) == doctest::Approx(2.0 * (2.0 + 0.5 * std::sin(3.0 * 0.7))));
    const TimeFn t = TimeFn::table({0.0, 1.0}, {1.0, 2.0}).scaled(3.0);
    CHECK(t(1.0) == doctest::Approx(6.0));
}

TEST_CASE("time function JSON round-trip") {
    const auto roundTrip = [](const TimeFn& f) {
        nlohmann::json j = f;
        const TimeFn back = j.get<TimeFn>();
        nlohmann::json j2 = back;
        CHECK(j.dump() == j2.dump());
        for (double t : {0.0, 0.3, 2.7, 50.0}) CHECK(back(t) == doctest::Approx(f(t)));
    };
    roundTrip(TimeFn::constant(1.25));
    roundTrip(TimeFn::sinusoid(2.0, 0.5, 1.5, 0.3));
    roundTrip(TimeFn::table({-1.0, 0.0, 2.0}, {0.5, 1.0, 0.25}));
}

TEST_CASE("nonlinearity families and brackets") {
    const Nonlinearity ricker = Nonlinearity::ricker(TimeFn::constant(1.0));
    CHECK(ricker.value(0.0, 0.0) == 0.0);
    CHECK(ricker.value(0.0, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(ricker.bracket_sup() == doctest::Approx(1.0 / std::exp(1.0)));
    CHECK(ricker.sublinear());

    const Nonlinearity mg = Nonlinearity::mackey_glass(TimeFn::constant(2.0), 1.0);
    CHECK(mg.value(0.0, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(mg.bracket_sup() == doctest::Approx(0.5));

    const Nonlinearity varying =
        Nonlinearity::mackey_glass(TimeFn::sinusoid(1.5, 0.5, 1.0), 2.0);
    CHECK(varying.crowding_lo() == doctest::Approx(1.0));
    CHECK(varying.crowding_hi() == doctest::Approx(2.0));
    for (double t : {0.0, 0.8, 4.4, 19.0}) {
        for (double x : {0.1, 0.5, 1.0, 3.0, 8.0}) {
            const double h = varying.value(t, x);
            CHECK(varying.lower_bracket(x) <= h + 1e-12);
            CHECK(h <= varying.upper_bracket(x) + 1e-12);
            CHECK(varying.lower_bracket(x) > 0.0);
            CHECK(varying.upper_bracket(x) < x);
        }
    }

    CHECK_THROWS_AS(Nonlinearity::ricker(TimeFn::constant(0.0)), StructuralError);
    CHECK_THROWS_AS(Nonlinearity::mackey_glass(TimeFn::constant(1.0), 0.5), StructuralError);
}

TEST_CASE("slope at zero is one for all families") {
    const double probe = 1e-8;
    for (const Nonlinearity& h :
         {Nonlinearity::ricker(TimeFn::constant(2.0)),
          Nonlinearity::generalized_ricker(TimeFn::constant(1.5), 2.0),
          Nonlinearity::mackey_glass(TimeFn::sinusoid(1.5, 0.5, 0.7), 1.0)}) {
        for (double t : {0.0, 1.0, 10.0}) {
            CHECK(h.value(t, probe) / probe == doctest::Approx(1.0).epsilon(1e-5));
        }
    }
}

TEST_CASE("generalized bracket suprema agree with a fine grid search") {
    const Nonlinearity gen = Nonlinearity::generalized_ricker(TimeFn::constant(0.8), 2.0);
    double gridBest = 0.0;
    for (int q = 1; q <= 200000; ++q) {
        gridBest = std::max(gridBest, gen.upper_bracket(q * 1e-4));
    }
    CHECK(gen.bracket_sup() == doctest::Approx(gridBest).epsilon(1e-6));

    // Closed form for the peak of x e^{-c x^p}: x* = (c p)^(-1/p), value x* e^(-1/p).
    const double xStar = std::pow(0.8 * 2.0, -0.5);
    CHECK(gen.bracket_sup() == doctest::Approx(xStar * std::exp(-0.5)).epsilon(1e-9));
}

TEST_CASE("floor-support helpers on the lower bracket") {
    const Nonlinearity ricker = Nonlinearity::ricker(TimeFn::constant(1.0));
    // y/alpha < y e^{-y} holds exactly for y < ln(alpha).
    CHECK(ricker.growth_threshold(1.5) == doctest::Approx(std::log(1.5)).epsilon(1e-10));
    CHECK(ricker.lower_bracket_peak() == doctest::Approx(1.0));
    // Point on the rising branch matching the value at x = 3 (past the peak).
    const double xEq = ricker.equal_value_below_peak(3.0);
    CHECK(ricker.lower_bracket(xEq) == doctest::Approx(ricker.lower_bracket(3.0)).epsilon(1e-10));
    CHECK(xEq < 1.0);

    const Nonlinearity mg = Nonlinearity::mackey_glass(TimeFn::constant(2.0), 1.0);
    // y/alpha < y/(1 + c y) holds exactly for y < (alpha - 1)/c.
    CHECK(mg.growth_threshold(1.5) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(std::isinf(mg.lower_bracket_peak()));
}

TEST_CASE("rescaling keeps the family and scales the crowding coefficient") {
    const Nonlinearity ricker = Nonlinearity::ricker(TimeFn::constant(1.0));
    const Nonlinearity scaled = ricker.rescaled(3.0);
    for (double x : {0.1, 0.7, 2.0}) {
        CHECK(scaled.value(0.0, x) == doctest::Approx(ricker.value(0.0, 3.0 * x) / 3.0));
    }
    const Nonlinearity mg = Nonlinearity::mackey_glass(TimeFn::constant(0.5), 2.0);
    const Nonlinearity mgScaled = mg.rescaled(2.0);
    for (double x : {0.1, 0.7, 2.0}) {
        CHECK(mgScaled.value(0.0, x) == doctest::Approx(mg.value(0.0, 2.0 * x) / 2.0));
    }
}

TEST_CASE("nonlinearity JSON round-trip") {
    const auto roundTrip = [](const Nonlinearity& h) {
        nlohmann::json j = h;
        const Nonlinearity back = j.get<Nonlinearity>();
        nlohmann::json j2 = back;
        CHECK(j.dump() == j2.dump());
        CHECK(back.value(1.0, 0.5) == doctest::Approx(h.value(1.0, 0.5)));
    };
    roundTrip(Nonlinearity::ricker(TimeFn::constant(1.0)));
    roundTrip(Nonlinearity::generalized_ricker(TimeFn::sinusoid(2.0, 0.5, 1.0), 1.5));
    roundTrip(Nonlinearity::mackey_glass(TimeFn::constant(2.0), 1.0));
}
