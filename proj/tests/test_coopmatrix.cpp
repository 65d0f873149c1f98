#include <doctest.h>

#include <random>

#include "coopdde/coopmatrix.hpp"
#include "coopdde/eigen.hpp"
#include "coopdde/errors.hpp"

using namespace coopdde;

namespace {

Matrix random_cooperative(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> offdiag(0.0, 2.0);
    std::uniform_real_distribution<double> diag(-3.0, 3.0);
    Matrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                m(i, j) = diag(rng);
            } else if (rng() % 2 == 0) {  // sparse: exercises reducible structures
                m(i, j) = offdiag(rng);
            }
        }
    }
    return m;
}

}  // namespace

TEST_CASE("cooperative tag is validated on construction") {
    CHECK_NOTHROW(CoopMatrix(Matrix(2, {-5.0, 0.0, 3.0, 1.0})));
    CHECK_THROWS_AS(CoopMatrix(Matrix(2, {1.0, -0.1, 0.0, 1.0})), StructuralError);
}

TEST_CASE("irreducibility from the exact zero pattern") {
    CHECK(is_irreducible(Matrix(2, {0, 1, 1, 0})));
    CHECK(!is_irreducible(Matrix(2, {1, 0, 1, 1})));
    CHECK(!is_irreducible(Matrix::identity(3)));
    CHECK(is_irreducible(Matrix(1, {0.0})));
}

TEST_CASE("frobenius normal form block structure") {
    SUBCASE("irreducible matrix is a single block") {
        const FrobeniusForm form = frobenius_normal_form(Matrix(3, {0, 1, 0, 0, 0, 1, 1, 0, 0}));
        CHECK(form.block_count() == 1);
        CHECK(form.blocks[0] == std::vector<int>{0, 1, 2});
    }
    SUBCASE("diagonal matrix splits into singleton blocks without edges") {
        const FrobeniusForm form = frobenius_normal_form(Matrix(2, {1, 0, 0, 2}));
        CHECK(form.block_count() == 2);
        CHECK(form.blocks[0] == std::vector<int>{0});
        CHECK(form.blocks[1] == std::vector<int>{1});
        CHECK(form.block_edges.empty());
    }
    SUBCASE("a two-link chain condenses to three ordered blocks") {
        Matrix m(3);
        m(0, 0) = 1;
        m(1, 1) = 2;
        m(2, 2) = 3;
        m(1, 0) = 0.5;  // block 1 fed by block 0
        m(2, 1) = 0.5;  // block 2 fed by block 1
        const FrobeniusForm form = frobenius_normal_form(m);
        REQUIRE(form.block_count() == 3);
        CHECK(form.blocks[0] == std::vector<int>{0});
        CHECK(form.blocks[1] == std::vector<int>{1});
        CHECK(form.blocks[2] == std::vector<int>{2});
        CHECK(form.block_edges == std::vector<std::pair<int, int>>{{1, 0}, {2, 1}});
        CHECK(form.is_source(0));
        CHECK(!form.is_source(1));
    }
}

TEST_CASE("frobenius form permutation properties") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 7);
        const Matrix m = random_cooperative(rng, n);
        const FrobeniusForm form = frobenius_normal_form(m);

        const Matrix permuted = form.permute(m);
        CHECK(form.unpermute(permuted) == m);

        // Everything above the block diagonal must be exactly zero.
        int rowBlock = 0, rowOffset = 0;
        std::vector<int> blockOfRow(n);
        for (int r = 0; r < n; ++r) {
            blockOfRow[r] = rowBlock;
            if (++rowOffset == static_cast<int>(form.blocks[rowBlock].size())) {
                ++rowBlock;
                rowOffset = 0;
            }
        }
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                if (blockOfRow[c] > blockOfRow[r]) CHECK(permuted(r, c) == 0.0);
            }
        }
        for (const auto& blockIdx : form.blocks) {
            CHECK(is_irreducible(m.submatrix(blockIdx)));
        }
    }
}

TEST_CASE("spectral bound examples") {
    SUBCASE("diagonal") {
        const SpectralReport rep = spectral_bound(CoopMatrix(Matrix(2, {-1, 0, 0, -2})));
        CHECK(rep.s == doctest::Approx(-1.0));
    }
    SUBCASE("symmetric exchange, roots 0 and -2") {
        const SpectralReport rep = spectral_bound(CoopMatrix(Matrix(2, {-1, 1, 1, -1})));
        CHECK(rep.s == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("triangular blocks keep their own bounds") {
        const SpectralReport rep = spectral_bound(CoopMatrix(Matrix(2, {0.5, 0, 1, -0.3})));
        CHECK(rep.s == doctest::Approx(0.5));
        REQUIRE(rep.block_bounds.size() == 2);
        CHECK(rep.block_bounds[0] == doctest::Approx(0.5));
        CHECK(rep.block_bounds[1] == doctest::Approx(-0.3));
    }
}

TEST_CASE("spectral bound agrees with the dense eigensolver on random cooperative matrices") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const Matrix m = random_cooperative(rng, n);
        const SpectralReport rep = spectral_bound(CoopMatrix(m));

        const double dense = max_real_part(dense_eigenvalues(m));
        CHECK(std::abs(rep.s - dense) <= 1e-9);

        double blockMax = -1e300;
        for (double b : rep.block_bounds) blockMax = std::max(blockMax, b);
        CHECK(std::abs(rep.s - blockMax) <= 1e-12);

        // Perron pairs: residual within tolerance, vectors strictly positive.
        for (std::size_t b = 0; b < rep.structure.blocks.size(); ++b) {
            const Matrix block = m.submatrix(rep.structure.blocks[b]);
            const Vec& v = rep.perron_vectors[b];
            const Vec mv = block.multiply(v);
            double resid = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                resid = std::max(resid, std::abs(mv[i] - rep.block_bounds[b] * v[i]));
                scale = std::max(scale, std::abs(v[i]));
                CHECK(v[i] > 0.0);
            }
            CHECK(resid <= 1e-8 * (1.0 + std::abs(rep.block_bounds[b])) * scale);
        }
    }
}

TEST_CASE("spectral bound scales linearly") {
    std::mt19937_64 rng(515151);
    std::uniform_real_distribution<double> factor(0.1, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 5);
        const Matrix m = random_cooperative(rng, n);
        const double c = factor(rng);
        const double s1 = spectral_bound(CoopMatrix(m)).s;
        const double s2 = spectral_bound(CoopMatrix(c * m)).s;
        CHECK(std::abs(s2 - c * s1) <= 1e-10 * std::max(1.0, std::abs(c * s1)));
    }
}

TEST_CASE("non-singular M-matrix test with certificates") {
    SUBCASE("identity") {
        const MMatrixReport rep = is_nonsingular_M_matrix(Matrix::identity(3));
        CHECK(rep.nonsingular_m_matrix);
        REQUIRE(rep.certificate.has_value());
        for (double u : *rep.certificate) CHECK(u == doctest::Approx(1.0));
    }
    SUBCASE("upper triangular example, direct solve gives u = (3, 1)") {
        const MMatrixReport rep = is_nonsingular_M_matrix(Matrix(2, {1, -2, 0, 1}));
        CHECK(rep.nonsingular_m_matrix);
        REQUIRE(rep.certificate.has_value());
        CHECK((*rep.certificate)[0] == doctest::Approx(3.0));
        CHECK((*rep.certificate)[1] == doctest::Approx(1.0));
        const Vec nu = Matrix(2, {1, -2, 0, 1}).multiply(*rep.certificate);
        CHECK(nu[0] > 0.0);
        CHECK(nu[1] > 0.0);
    }
    SUBCASE("singular within tolerance reports boundary") {
        const MMatrixReport rep = is_nonsingular_M_matrix(Matrix(2, {1, -1, -1, 1}));
        CHECK(!rep.nonsingular_m_matrix);
        CHECK(rep.reason == "boundary");
    }
    SUBCASE("positive off-diagonal is a structural error") {
        CHECK_THROWS_AS(is_nonsingular_M_matrix(Matrix(2, {1, 0.5, 0, 1})), StructuralError);
    }
}

TEST_CASE("M-matrix test matches the spectral sign on random inputs") {
    std::mt19937_64 rng(990011);
    std::uniform_real_distribution<double> offdiag(-2.0, 0.0);
    std::uniform_real_distribution<double> diag(-1.0, 4.0);
    int tested = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 5);
        Matrix m(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) m(i, j) = i == j ? diag(rng) : offdiag(rng);
        }
        const double s = spectral_bound(CoopMatrix(-m)).s;
        if (std::abs(s) < 1e-10) continue;  // boundary band excluded
        ++tested;
        const MMatrixReport rep = is_nonsingular_M_matrix(m);
        CHECK(rep.nonsingular_m_matrix == (s < 0.0));
        if (rep.nonsingular_m_matrix) {
            REQUIRE(rep.certificate.has_value());
            const Vec nu = m.multiply(*rep.certificate);
            for (double x : nu) CHECK(x > 0.0);
            for (double u : *rep.certificate) CHECK(u > 0.0);
        }
    }
    CHECK(tested > 300);
}

TEST_CASE("positive-vector search examples") {
    SUBCASE("negative diagonal admits a nonincreasing certificate") {
        const auto v = find_positive_vector(CoopMatrix(Matrix(2, {-1, 0, 0, -1})),
                                            PositiveVectorQuery::leq_zero());
        REQUIRE(v.has_value());
        const Vec mv = Matrix(2, {-1, 0, 0, -1}).multiply(*v);
        for (double x : mv) CHECK(x <= 0.0);
    }
    SUBCASE("zero spectral bound has no strict growth certificate") {
        const auto v = find_positive_vector(CoopMatrix(Matrix(2, {-1, 1, 1, -1})),
                                            PositiveVectorQuery::strictly_positive());
        CHECK(!v.has_value());
    }
    SUBCASE("reducible source-fed chain still has a strict certificate") {
        const Matrix m(2, {0.5, 0, 1, -0.3});
        const auto v =
            find_positive_vector(CoopMatrix(m), PositiveVectorQuery::strictly_positive());
        REQUIRE(v.has_value());
        const Vec mv = m.multiply(*v);
        CHECK(mv[0] > 0.0);
        CHECK(mv[1] > 0.0);
    }
    SUBCASE("eta slack query returns an unnormalized certificate") {
        const Matrix m(1, {2.0});
        const auto v = find_positive_vector(CoopMatrix(m), PositiveVectorQuery::at_least(1.0));
        REQUIRE(v.has_value());
        CHECK(2.0 * (*v)[0] >= 1.0 + 1e-9);
    }
}

TEST_CASE("positive-vector search postconditions on random cooperative matrices") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 5);
        const Matrix m = random_cooperative(rng, n);
        const CoopMatrix coop(m);

        if (const auto v = find_positive_vector(coop, PositiveVectorQuery::strictly_positive())) {
            const Vec mv = m.multiply(*v);
            double lo = 1e300, scale = 0.0;
            for (std::size_t i = 0; i < mv.size(); ++i) {
                lo = std::min(lo, mv[i]);
                scale = std::max(scale, std::abs((*v)[i]));
            }
            CHECK(lo > 0.0);
            (void)scale;
        }
        if (const auto v = find_positive_vector(coop, PositiveVectorQuery::leq_zero())) {
            const Vec mv = m.multiply(*v);
            double hi = -1e300, scale = 0.0;
            for (std::size_t i = 0; i < mv.size(); ++i) {
                hi = std::max(hi, mv[i]);
                scale = std::max(scale, std::abs((*v)[i]));
            }
            CHECK(hi <= 1e-12 * scale);
        }
    }
}

TEST_CASE("common positive vector across a matrix family") {
    // Sampled community matrices of a seasonally forced scalar system:
    // beta(t) - d ranges over [0.4, 0.6]; one shared v must work for all.
    std::vector<Matrix> family;
    for (int g = 0; g <= 64; ++g) {
        family.push_back(Matrix(1, {0.5 + 0.1 * std::sin(g * 0.3)}));
    }
    const auto v = find_common_positive_vector(family, PositiveVectorQuery::strictly_positive());
    REQUIRE(v.has_value());
    for (const Matrix& m : family) CHECK(m.multiply(*v)[0] > 0.0);

    // Flip the sign: now only the nonincreasing certificate exists.
    std::vector<Matrix> negated;
    for (const Matrix& m : family) negated.push_back(-m);
    CHECK(!find_common_positive_vector(negated, PositiveVectorQuery::strictly_positive())
               .has_value());
    CHECK(find_common_positive_vector(negated, PositiveVectorQuery::leq_zero()).has_value());
}
