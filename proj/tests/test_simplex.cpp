#include <doctest.h>

#include "coopdde/simplex.hpp"

using namespace coopdde;

TEST_CASE("simplex_maximize on a textbook program") {
    // max x + y  s.t.  x <= 2, y <= 3, x + y <= 4, x, y >= 0
    const std::vector<Vec> a = {{1, 0}, {0, 1}, {1, 1}};
    const Vec b = {2, 3, 4};
    const LpOutcome out = simplex_maximize(a, b, {1, 1});
    REQUIRE(out.status == LpOutcome::Status::Optimal);
    CHECK(out.objective == doctest::Approx(4.0));
    CHECK(out.x[0] + out.x[1] == doctest::Approx(4.0));
}

TEST_CASE("simplex_maximize detects infeasibility and unboundedness") {
    const LpOutcome infeasible = simplex_maximize({{1.0}}, {-1.0}, {1.0});
    CHECK(infeasible.status == LpOutcome::Status::Infeasible);

    const LpOutcome unbounded = simplex_maximize({{-1.0}}, {1.0}, {1.0});
    CHECK(unbounded.status == LpOutcome::Status::Unbounded);
}

TEST_CASE("maximize_min_slack finds boxed certificates") {
    SUBCASE("identity rows push to the upper box corner") {
        const auto cert = maximize_min_slack({{1.0, 0.0}, {0.0, 1.0}}, 1.0, 1e6);
        REQUIRE(cert.has_value());
        CHECK(cert->slack == doctest::Approx(1e6));
    }
    SUBCASE("triangular cooperative rows admit a positive slack") {
        const auto cert = maximize_min_slack({{0.5, 0.0}, {1.0, -0.3}}, 1.0, 1e6);
        REQUIRE(cert.has_value());
        CHECK(cert->slack > 1.0);
        CHECK(0.5 * cert->v[0] >= cert->slack);
        CHECK(cert->v[0] - 0.3 * cert->v[1] >= cert->slack);
    }
    SUBCASE("mutual dominance rows are infeasible inside the box") {
        // v1 >= 2 v2 and v2 >= 2 v1 cannot hold for positive v.
        const auto cert = maximize_min_slack({{1.0, -2.0}, {-2.0, 1.0}}, 1.0, 1e6);
        REQUIRE(cert.has_value());
        CHECK(cert->slack < 0.0);
    }
    SUBCASE("hard constraints can make the program infeasible") {
        const std::vector<Vec> slackRows = {{1.0}};
        const std::vector<Vec> hardRows = {{-1.0}};  // -v >= 0 contradicts v >= 1
        const auto cert = maximize_min_slack(slackRows, {0.0}, hardRows, {0.0}, 1.0, 1e6);
        CHECK(!cert.has_value());
    }
    SUBCASE("recomputed slack matches the constraints") {
        const std::vector<Vec> rows = {{2.0, -1.0}, {-1.0, 3.0}};
        const auto cert = maximize_min_slack(rows, 1.0, 10.0);
        REQUIRE(cert.has_value());
        double worst = 1e300;
        for (const Vec& r : rows) {
            worst = std::min(worst, r[0] * cert->v[0] + r[1] * cert->v[1]);
        }
        CHECK(cert->slack == doctest::Approx(worst));
    }
}
