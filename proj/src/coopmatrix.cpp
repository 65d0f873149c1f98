#include "coopdde/coopmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "coopdde/eigen.hpp"
#include "coopdde/errors.hpp"
#include "coopdde/simplex.hpp"

namespace coopdde {

namespace {

constexpr double kBoxLo = 1.0;
constexpr double kBoxHi = 1e6;

std::vector<std::vector<int>> sparsity_successors(const Matrix& m) {
    // Edge j -> i whenever m(i, j) != 0: column j feeds row i.
    const int n = m.order();
    std::vector<std::vector<int>> succ(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i != j && m(i, j) != 0.0) succ[j].push_back(i);
        }
    }
    return succ;
}

void tarjan_scc(int v,
                const std::vector<std::vector<int>>& succ,
                std::vector<int>& index,
                std::vector<int>& low,
                std::vector<int>& onStack,
                std::vector<int>& stack,
                int& counter,
                std::vector<std::vector<int>>& components) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    onStack[v] = 1;
    for (int w : succ[v]) {
        if (index[w] < 0) {
            tarjan_scc(w, succ, index, low, onStack, stack, counter, components);
            low[v] = std::min(low[v], low[w]);
        } else if (onStack[w]) {
            low[v] = std::min(low[v], index[w]);
        }
    }
    if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
            w = stack.back();
            stack.pop_back();
            onStack[w] = 0;
            comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
}

struct PerronPair {
    double rho = 0.0;  // Perron root of the shifted nonnegative block
    Vec vector;        // strictly positive, max-norm 1
};

// Power iteration on shifted = block + cI (nonnegative, positive diagonal,
// irreducible, hence primitive).  Convergence: successive Rayleigh
// quotients within the relative tolerance; Collatz-Wielandt bracket kept
// as a secondary quality gate.
PerronPair shifted_power_iteration(const Matrix& block, double shift, double rayleighRelTol) {
    const int n = block.order();
    Matrix s = block;
    for (int i = 0; i < n; ++i) s(i, i) += shift;

    Vec x(n, 1.0 / n);
    double rayleigh = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    const long cap = 2'000'000;
    for (long it = 0; it < cap; ++it) {
        Vec y = s.multiply(x);
        double dot = 0.0, nrm2 = 0.0;
        double cwLo = std::numeric_limits<double>::infinity(), cwHi = 0.0;
        for (int i = 0; i < n; ++i) {
            dot += x[i] * y[i];
            nrm2 += x[i] * x[i];
            const double ratio = y[i] / x[i];
            cwLo = std::min(cwLo, ratio);
            cwHi = std::max(cwHi, ratio);
        }
        rayleigh = dot / nrm2;
        const double scale = std::max(1.0, std::abs(rayleigh));
        const bool rayleighDone = std::abs(rayleigh - prev) < rayleighRelTol * scale;
        const bool bracketDone =
            (cwHi - cwLo) < std::max(1e-12 * scale, 64.0 * 2.220446049250313e-16 * scale);
        double ymax = max_norm(y);
        for (int i = 0; i < n; ++i) x[i] = y[i] / ymax;
        if (rayleighDone && bracketDone) break;
        prev = rayleigh;
    }
    return {rayleigh, x};
}

// One or two inverse-iteration steps to polish the Perron vector of a
// cooperative irreducible block near its known eigenvalue.
Vec polish_eigenvector(const Matrix& block, double eigenvalue, Vec x) {
    const int n = block.order();
    for (int pass = 0; pass < 2; ++pass) {
        Matrix shifted = block;
        const double mu = eigenvalue + 1e-11 * std::max(1.0, std::abs(eigenvalue)) * (pass + 1);
        for (int i = 0; i < n; ++i) shifted(i, i) -= mu;
        auto y = solve_linear(shifted, x);
        if (!y) continue;
        double nrm = max_norm(*y);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) continue;
        for (int i = 0; i < n; ++i) x[i] = std::abs((*y)[i]) / nrm;
    }
    return x;
}

Vec normalized_by_min(Vec v) {
    double lo = *std::min_element(v.begin(), v.end());
    for (double& c : v) c /= lo;
    return v;
}

double min_component(const Vec& v) { return *std::min_element(v.begin(), v.end()); }
double max_component(const Vec& v) { return *std::max_element(v.begin(), v.end()); }

std::vector<Vec> relation_rows(const Matrix& m, PositiveVectorQuery::Relation rel) {
    const int n = m.order();
    std::vector<Vec> rows;
    rows.reserve(n);
    const double sign = (rel == PositiveVectorQuery::Relation::LeqZero) ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) {
        Vec row(n);
        for (int j = 0; j < n; ++j) row[j] = sign * m(i, j);
        rows.push_back(std::move(row));
    }
    return rows;
}

// Worst signed slack of the relation over the whole family for a fixed v.
double family_worst_slack(std::span<const Matrix> family,
                          const Vec& v,
                          const PositiveVectorQuery& query,
                          std::size_t* argWorst = nullptr) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < family.size(); ++g) {
        const Vec mv = family[g].multiply(v);
        for (double comp : mv) {
            double slack = 0.0;
            switch (query.relation) {
                case PositiveVectorQuery::Relation::LeqZero: slack = -comp; break;
                case PositiveVectorQuery::Relation::StrictlyPositive: slack = comp; break;
                case PositiveVectorQuery::Relation::AtLeastEta: slack = comp - query.eta; break;
            }
            if (slack < worst) {
                worst = slack;
                if (argWorst) *argWorst = g;
            }
        }
    }
    return worst;
}

}  // namespace

CoopMatrix::CoopMatrix(Matrix m) : m_(std::move(m)) {
    if (!m_.all_finite()) throw StructuralError("CoopMatrix: non-finite entries");
    if (m_.order() < 1) throw StructuralError("CoopMatrix: order must be >= 1");
    for (int i = 0; i < m_.order(); ++i) {
        for (int j = 0; j < m_.order(); ++j) {
            if (i != j && m_(i, j) < 0.0) {
                throw StructuralError("CoopMatrix: negative off-diagonal entry at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

bool FrobeniusForm::is_source(int blockIndex) const {
    for (const auto& [to, from] : block_edges) {
        if (to == blockIndex) return false;
    }
    return true;
}

Matrix FrobeniusForm::permute(const Matrix& original) const {
    const int n = original.order();
    Matrix p(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) p(i, j) = original(permutation[i], permutation[j]);
    }
    return p;
}

Matrix FrobeniusForm::unpermute(const Matrix& permuted) const {
    const int n = permuted.order();
    Matrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(permutation[i], permutation[j]) = permuted(i, j);
    }
    return m;
}

bool is_irreducible(const Matrix& m) {
    const int n = m.order();
    if (n < 1) throw StructuralError("is_irreducible: empty matrix");
    if (n == 1) return true;

    // Strong connectivity: everything reachable from node 0 along edges
    // and along reversed edges.
    auto reaches_all = [n, &m](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<int> todo = {0};
        seen[0] = 1;
        int count = 1;
        while (!todo.empty()) {
            const int v = todo.back();
            todo.pop_back();
            for (int w = 0; w < n; ++w) {
                if (seen[w] || w == v) continue;
                const double entry = transpose ? m(v, w) : m(w, v);
                if (entry != 0.0) {
                    seen[w] = 1;
                    ++count;
                    todo.push_back(w);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

FrobeniusForm frobenius_normal_form(const Matrix& m) {
    const int n = m.order();
    if (n < 1) throw StructuralError("frobenius_normal_form: empty matrix");

    const auto succ = sparsity_successors(m);
    std::vector<int> index(n, -1), low(n, 0), onStack(n, 0), stack;
    std::vector<std::vector<int>> components;
    int counter = 0;
    for (int v = 0; v < n; ++v) {
        if (index[v] < 0) tarjan_scc(v, succ, index, low, onStack, stack, counter, components);
    }

    const int k = static_cast<int>(components.size());
    std::vector<int> componentOf(n, -1);
    for (int c = 0; c < k; ++c) {
        for (int v : components[c]) componentOf[v] = c;
    }

    // Condensation: edge q -> p when block p is fed by block q.
    std::vector<std::vector<char>> fedBy(k, std::vector<char>(k, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (m(i, j) != 0.0 && componentOf[i] != componentOf[j]) {
                fedBy[componentOf[i]][componentOf[j]] = 1;
            }
        }
    }

    // Kahn topological sort, feeders first; ties broken by the lowest
    // original index contained in the block.
    std::vector<int> indegree(k, 0);
    for (int p = 0; p < k; ++p) {
        for (int q = 0; q < k; ++q) indegree[p] += fedBy[p][q];
    }
    auto blockKey = [&components](int c) { return components[c].front(); };
    std::priority_queue<std::pair<int, int>, std::vector<std::pair<int, int>>, std::greater<>> ready;
    for (int c = 0; c < k; ++c) {
        if (indegree[c] == 0) ready.emplace(blockKey(c), c);
    }
    std::vector<int> order;
    order.reserve(k);
    while (!ready.empty()) {
        const int c = ready.top().second;
        ready.pop();
        order.push_back(c);
        for (int p = 0; p < k; ++p) {
            if (fedBy[p][c] && --indegree[p] == 0) ready.emplace(blockKey(p), p);
        }
    }

    FrobeniusForm form;
    form.blocks.reserve(k);
    std::vector<int> positionOf(k, -1);
    for (int pos = 0; pos < k; ++pos) {
        positionOf[order[pos]] = pos;
        form.blocks.push_back(components[order[pos]]);
        for (int v : components[order[pos]]) form.permutation.push_back(v);
    }
    for (int p = 0; p < k; ++p) {
        for (int q = 0; q < k; ++q) {
            if (fedBy[p][q]) form.block_edges.emplace_back(positionOf[p], positionOf[q]);
        }
    }
    std::sort(form.block_edges.begin(), form.block_edges.end());
    return form;
}

SpectralReport spectral_bound(const CoopMatrix& m, const SpectralTolerances& tol) {
    SpectralReport report;
    report.structure = frobenius_normal_form(m.entries());
    report.s = -std::numeric_limits<double>::infinity();

    for (const auto& blockIdx : report.structure.blocks) {
        const Matrix block = m.entries().submatrix(blockIdx);
        double bound;
        Vec perron;
        if (block.order() == 1) {
            bound = block(0, 0);
            perron = {1.0};
        } else {
            const double shift = 1.0 + block.max_abs_diagonal();
            PerronPair pair = shifted_power_iteration(block, shift, tol.power_rayleigh_rel);
            bound = pair.rho - shift;
            perron = polish_eigenvector(block, bound, std::move(pair.vector));

            const double dense = max_real_part(dense_eigenvalues(block));
            if (std::abs(bound - dense) > tol.cross_check * std::max(1.0, block.max_abs())) {
                throw NumericalError("spectral_bound: power iteration (" + std::to_string(bound) +
                                     ") disagrees with dense eigensolver (" + std::to_string(dense) +
                                     ")");
            }
        }
        report.block_bounds.push_back(bound);
        report.perron_vectors.push_back(std::move(perron));
        report.s = std::max(report.s, bound);
    }
    return report;
}

MMatrixReport is_nonsingular_M_matrix(const Matrix& n, const SpectralTolerances& tol) {
    for (int i = 0; i < n.order(); ++i) {
        for (int j = 0; j < n.order(); ++j) {
            if (i != j && n(i, j) > 0.0) {
                throw StructuralError("is_nonsingular_M_matrix: positive off-diagonal entry");
            }
        }
    }

    MMatrixReport report;
    report.negated_spectral_bound = spectral_bound(CoopMatrix(-n), tol).s;

    if (std::abs(report.negated_spectral_bound) <= tol.boundary) {
        report.nonsingular_m_matrix = false;
        report.reason = "boundary";
        return report;
    }
    if (report.negated_spectral_bound > 0.0) {
        report.nonsingular_m_matrix = false;
        report.reason = "spectral bound of -N is positive";
        return report;
    }

    report.nonsingular_m_matrix = true;
    const int dim = n.order();
    Vec ones(dim, 1.0);
    auto u = solve_linear(n, ones);
    if (u) {
        const double floor = 1e-12 * std::max(1.0, max_norm(*u));
        if (min_component(*u) <= floor) {
            // Perturbed right-hand side; deterministic draw.
            std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            Vec rhs(dim);
            for (double& r : rhs) r = 1.0 + 1e-3 * unit(rng);
            u = solve_linear(n, rhs);
        }
    }
    bool certified = false;
    if (u) {
        const Vec nu = n.multiply(*u);
        certified = min_component(*u) > 0.0 && min_component(nu) > 0.0;
    }
    if (!certified) {
        throw NumericalError(
            "is_nonsingular_M_matrix: eigenvalue test and certificate disagree");
    }
    report.certificate = std::move(*u);
    return report;
}

std::optional<Vec> find_positive_vector(const CoopMatrix& m,
                                        const PositiveVectorQuery& query,
                                        const SpectralTolerances& tol) {
    const Matrix& entries = m.entries();
    const bool irreducible = is_irreducible(entries);

    if (irreducible && query.relation != PositiveVectorQuery::Relation::AtLeastEta) {
        const SpectralReport rep = spectral_bound(m, tol);
        Vec v = normalized_by_min(rep.perron_vectors.front());
        if (query.relation == PositiveVectorQuery::Relation::StrictlyPositive) {
            if (rep.s <= 0.0) return std::nullopt;  // no strict certificate exists
            if (min_component(entries.multiply(v)) > 0.0) return v;
        } else {
            if (rep.s > 0.0) return std::nullopt;  // M v <= 0 with v >> 0 forces s <= 0
            if (max_component(entries.multiply(v)) <= 1e-12 * max_norm(v)) return v;
        }
        // Perron residual unusable; fall through to the LP search.
    }

    const Matrix single[] = {entries};
    return find_common_positive_vector(std::span<const Matrix>(single, 1), query, tol);
}

std::optional<Vec> find_common_positive_vector(std::span<const Matrix> family,
                                               const PositiveVectorQuery& query,
                                               const SpectralTolerances& tol) {
    if (family.empty()) throw StructuralError("find_common_positive_vector: empty family");

    // Deterministic subsample, grown by worst violators when verification
    // on the full family fails.
    std::vector<std::size_t> selected;
    const std::size_t stride = std::max<std::size_t>(1, family.size() / 512);
    for (std::size_t g = 0; g < family.size(); g += stride) selected.push_back(g);
    if (selected.back() != family.size() - 1) selected.push_back(family.size() - 1);

    for (int round = 0; round < 8; ++round) {
        std::vector<Vec> rows;
        Vec rhs;
        for (std::size_t g : selected) {
            for (Vec& row : relation_rows(family[g], query.relation)) {
                rows.push_back(std::move(row));
                rhs.push_back(query.relation == PositiveVectorQuery::Relation::AtLeastEta
                                  ? query.eta
                                  : 0.0);
            }
        }
        auto cert = maximize_min_slack(rows, rhs, {}, {}, kBoxLo, kBoxHi);
        if (!cert || cert->slack < tol.feasibility) return std::nullopt;

        std::size_t worstIndex = 0;
        const double fullSlack = family_worst_slack(family, cert->v, query, &worstIndex);
        if (fullSlack >= tol.feasibility) {
            if (query.relation == PositiveVectorQuery::Relation::AtLeastEta) return cert->v;
            return normalized_by_min(cert->v);
        }
        // Grow the constraint set around the worst violator.
        std::vector<std::size_t> extra = {worstIndex};
        if (worstIndex > 0) extra.push_back(worstIndex - 1);
        if (worstIndex + 1 < family.size()) extra.push_back(worstIndex + 1);
        bool grew = false;
        for (std::size_t g : extra) {
            if (std::find(selected.begin(), selected.end(), g) == selected.end()) {
                selected.push_back(g);
                grew = true;
            }
        }
        if (!grew) return std::nullopt;  // violator already enforced: numerically stuck
    }
    return std::nullopt;
}

}  // namespace coopdde
