#include "coopdde/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "coopdde/errors.hpp"

namespace coopdde {

namespace {

constexpr double kEps = 1e-9;

// Classic codebook-style dense simplex (KACTL lineage): max c.x, Ax <= b, x >= 0.
class Tableau {
public:
    Tableau(const std::vector<Vec>& a, const Vec& b, const Vec& c)
        : m_(static_cast<int>(b.size())),
          n_(static_cast<int>(c.size())),
          nonbasic_(n_ + 1),
          basic_(m_),
          d_(m_ + 2, Vec(n_ + 2, 0.0)) {
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) d_[i][j] = a[i][j];
            basic_[i] = n_ + i;
            d_[i][n_] = -1.0;
            d_[i][n_ + 1] = b[i];
        }
        for (int j = 0; j < n_; ++j) {
            nonbasic_[j] = j;
            d_[m_][j] = -c[j];
        }
        nonbasic_[n_] = -1;
        d_[m_ + 1][n_] = 1.0;
    }

    LpOutcome solve() {
        LpOutcome out;
        int r = 0;
        for (int i = 1; i < m_; ++i) {
            if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
        }
        if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
            pivot(r, n_);
            if (!run_phase(2) || d_[m_ + 1][n_ + 1] < -kEps) {
                out.status = LpOutcome::Status::Infeasible;
                return out;
            }
            for (int i = 0; i < m_; ++i) {
                if (basic_[i] != -1) continue;
                int s = 0;
                for (int j = 1; j <= n_; ++j) {
                    if (better_column(i, j, s)) s = j;
                }
                pivot(i, s);
            }
        }
        const bool bounded = run_phase(1);
        out.x.assign(n_, 0.0);
        for (int i = 0; i < m_; ++i) {
            if (basic_[i] < n_) out.x[basic_[i]] = d_[i][n_ + 1];
        }
        out.objective = d_[m_][n_ + 1];
        out.status = bounded ? LpOutcome::Status::Optimal : LpOutcome::Status::Unbounded;
        return out;
    }

private:
    bool better_column(int row, int j, int s) const {
        return std::make_pair(d_[row][j], nonbasic_[j]) < std::make_pair(d_[row][s], nonbasic_[s]);
    }

    void pivot(int r, int s) {
        Vec& pr = d_[r];
        const double inv = 1.0 / pr[s];
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == r || std::abs(d_[i][s]) <= kEps) continue;
            Vec& row = d_[i];
            const double factor = row[s] * inv;
            for (int j = 0; j < n_ + 2; ++j) row[j] -= pr[j] * factor;
            row[s] = pr[s] * factor;
        }
        for (int j = 0; j < n_ + 2; ++j) {
            if (j != s) pr[j] *= inv;
        }
        for (int i = 0; i < m_ + 2; ++i) {
            if (i != r) d_[i][s] *= -inv;
        }
        pr[s] = inv;
        std::swap(basic_[r], nonbasic_[s]);
    }

    bool run_phase(int phase) {
        const int objRow = m_ + phase - 1;
        for (;;) {
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (nonbasic_[j] == -phase) continue;
                if (s == -1 || better_column(objRow, j, s)) s = j;
            }
            if (d_[objRow][s] >= -kEps) return true;
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                if (d_[i][s] <= kEps) continue;
                if (r == -1 ||
                    std::make_pair(d_[i][n_ + 1] / d_[i][s], basic_[i]) <
                        std::make_pair(d_[r][n_ + 1] / d_[r][s], basic_[r])) {
                    r = i;
                }
            }
            if (r == -1) return false;
            pivot(r, s);
        }
    }

    int m_, n_;
    std::vector<int> nonbasic_, basic_;
    std::vector<Vec> d_;
};

}  // namespace

LpOutcome simplex_maximize(const std::vector<Vec>& a, const Vec& b, const Vec& c) {
    return Tableau(a, b, c).solve();
}

std::optional<SlackCertificate> maximize_min_slack(const std::vector<Vec>& slackRows,
                                                   const Vec& slackRhs,
                                                   const std::vector<Vec>& hardRows,
                                                   const Vec& hardRhs,
                                                   double lo,
                                                   double hi) {
    if (slackRows.empty()) throw StructuralError("maximize_min_slack: no slack constraints");
    const int n = static_cast<int>(slackRows.front().size());

    // Variables: u_j = v_j - lo >= 0 (j < n), then t+ and t-.
    const int vars = n + 2;
    std::vector<Vec> a;
    Vec b;
    auto addGeqRow = [&](const Vec& row, double rhs, bool withSlack) {
        // row.v >= rhs (+ t)  becomes  -row.u (+ t+ - t-) <= row.(lo 1) - rhs
        Vec lhs(vars, 0.0);
        double shifted = -rhs;
        for (int j = 0; j < n; ++j) {
            lhs[j] = -row[j];
            shifted += row[j] * lo;
        }
        if (withSlack) {
            lhs[n] = 1.0;
            lhs[n + 1] = -1.0;
        }
        a.push_back(std::move(lhs));
        b.push_back(shifted);
    };
    for (std::size_t r = 0; r < slackRows.size(); ++r) addGeqRow(slackRows[r], slackRhs[r], true);
    for (std::size_t r = 0; r < hardRows.size(); ++r) addGeqRow(hardRows[r], hardRhs[r], false);
    for (int j = 0; j < n; ++j) {
        Vec lhs(vars, 0.0);
        lhs[j] = 1.0;
        a.push_back(std::move(lhs));
        b.push_back(hi - lo);
    }
    Vec c(vars, 0.0);
    c[n] = 1.0;
    c[n + 1] = -1.0;

    const LpOutcome lp = simplex_maximize(a, b, c);
    if (lp.status == LpOutcome::Status::Infeasible) return std::nullopt;
    if (lp.status == LpOutcome::Status::Unbounded) {
        throw NumericalError("maximize_min_slack: unbounded program on a boxed domain");
    }

    SlackCertificate cert;
    cert.v.assign(n, 0.0);
    for (int j = 0; j < n; ++j) cert.v[j] = std::clamp(lp.x[j] + lo, lo, hi);

    // The reported slack is recomputed from v; the tableau value is advisory.
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < slackRows.size(); ++r) {
        double dot = -slackRhs[r];
        for (int j = 0; j < n; ++j) dot += slackRows[r][j] * cert.v[j];
        worst = std::min(worst, dot);
    }
    cert.slack = worst;
    return cert;
}

std::optional<SlackCertificate> maximize_min_slack(const std::vector<Vec>& slackRows,
                                                   double lo,
                                                   double hi) {
    return maximize_min_slack(slackRows, Vec(slackRows.size(), 0.0), {}, {}, lo, hi);
}

}  // namespace coopdde
