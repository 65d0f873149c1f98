#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coopdde/matrix.hpp"

namespace coopdde {

/// Square matrix tagged as cooperative: off-diagonal entries >= 0.
/// Construction validates the tag and finiteness.
class CoopMatrix {
public:
    explicit CoopMatrix(Matrix m);
    const Matrix& entries() const { return m_; }
    int order() const { return m_.order(); }

private:
    Matrix m_;
};

/// Permutation to block lower triangular form with irreducible diagonal
/// blocks (strongly-connected-component condensation of the sparsity
/// digraph).  Blocks are listed in the order they appear along the
/// diagonal; `blocks[j]` holds the original row indices of block j.
/// An edge (i, j) with i > j means block i has a nonzero sub-block in
/// block column j, i.e. block i is fed by the earlier block j.
struct FrobeniusForm {
    std::vector<int> permutation;               // permutation[new_index] = original_index
    std::vector<std::vector<int>> blocks;       // original indices per diagonal block
    std::vector<std::pair<int, int>> block_edges;

    int block_count() const { return static_cast<int>(blocks.size()); }
    bool is_source(int blockIndex) const;       // no incoming feed from other blocks

    /// The matrix in permuted coordinates (block lower triangular).
    Matrix permute(const Matrix& original) const;
    /// Inverse of permute(); permute() followed by unpermute() is exact.
    Matrix unpermute(const Matrix& permuted) const;
};

struct SpectralReport {
    double s = 0.0;                              // max over block bounds
    std::vector<double> block_bounds;            // s(M_jj) per block
    std::vector<Vec> perron_vectors;             // strictly positive, per block
    FrobeniusForm structure;
};

struct MMatrixReport {
    bool nonsingular_m_matrix = false;
    std::optional<Vec> certificate;              // u >> 0 with N u >> 0, when true
    std::string reason;                          // "boundary" when singular within tolerance
    double negated_spectral_bound = 0.0;         // s(-N)
};

struct PositiveVectorQuery {
    enum class Relation { LeqZero, StrictlyPositive, AtLeastEta };
    Relation relation = Relation::StrictlyPositive;
    double eta = 0.0;                            // used by AtLeastEta

    static PositiveVectorQuery leq_zero() { return {Relation::LeqZero, 0.0}; }
    static PositiveVectorQuery strictly_positive() { return {Relation::StrictlyPositive, 0.0}; }
    static PositiveVectorQuery at_least(double eta) { return {Relation::AtLeastEta, eta}; }
};

/// Numerical policy shared by the spectral routines.
struct SpectralTolerances {
    double power_rayleigh_rel = 1e-12;   // successive Rayleigh quotient stop
    double cross_check = 1e-9;           // power iteration vs dense eigensolver
    double feasibility = 1e-9;           // LP slack acceptance
    double boundary = 1e-12;             // M-matrix singularity band
};

/// True iff the sparsity digraph (edge j -> i whenever m[i][j] != 0,
/// exact zero pattern) is strongly connected.  1x1 matrices count as
/// irreducible.
bool is_irreducible(const Matrix& m);

FrobeniusForm frobenius_normal_form(const Matrix& m);

/// Spectral bound s(m) = max real part of the spectrum, computed per
/// irreducible Frobenius block by shifted power iteration and
/// cross-checked against the dense eigensolver.
SpectralReport spectral_bound(const CoopMatrix& m, const SpectralTolerances& tol = {});

/// Non-singular M-matrix test for a matrix with nonpositive off-diagonal
/// entries, with a positive-vector certificate u = N^{-1} 1.
MMatrixReport is_nonsingular_M_matrix(const Matrix& n, const SpectralTolerances& tol = {});

/// Searches for v >> 0 with M v in the requested relation.  Absence
/// (nullopt) is a valid answer.  Box 1 <= v_i <= 1e6 for the LP path.
std::optional<Vec> find_positive_vector(const CoopMatrix& m,
                                        const PositiveVectorQuery& query,
                                        const SpectralTolerances& tol = {});

/// Shared-vector variant: one v >> 0 satisfying the relation for every
/// matrix in the family (sampled time-varying constraints).  Solved by
/// LP on a deterministic subsample followed by verification on the full
/// family, growing the constraint set if verification fails.
std::optional<Vec> find_common_positive_vector(std::span<const Matrix> family,
                                               const PositiveVectorQuery& query,
                                               const SpectralTolerances& tol = {});

}  // namespace coopdde
