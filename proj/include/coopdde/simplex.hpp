#pragma once

#include <optional>
#include <vector>

#include "coopdde/matrix.hpp"

namespace coopdde {

/// Dense two-phase simplex for  max c·x  s.t.  A x <= b,  x >= 0.
/// Tableau formulation with lexicographic tie-breaking (anti-cycling).
struct LpOutcome {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    double objective = 0.0;
    Vec x;
};

LpOutcome simplex_maximize(const std::vector<Vec>& a, const Vec& b, const Vec& c);

/// Max-min-slack feasibility program over a box:
///
///   maximize t
///   s.t.  slackRows[r] . v >= slackRhs[r] + t   (slack constraints)
///         hardRows[r]  . v >= hardRhs[r]        (hard constraints)
///         lo <= v_i <= hi
///
/// The box makes the program bounded; it is infeasible only through the
/// hard constraints.  On success the reported slack is recomputed from the
/// returned v (not read off the tableau).
struct SlackCertificate {
    Vec v;
    double slack;
};

std::optional<SlackCertificate> maximize_min_slack(const std::vector<Vec>& slackRows,
                                                   const Vec& slackRhs,
                                                   const std::vector<Vec>& hardRows,
                                                   const Vec& hardRhs,
                                                   double lo,
                                                   double hi);

/// Convenience overload: no hard constraints, homogeneous right-hand side.
std::optional<SlackCertificate> maximize_min_slack(const std::vector<Vec>& slackRows,
                                                   double lo,
                                                   double hi);

}  // namespace coopdde
