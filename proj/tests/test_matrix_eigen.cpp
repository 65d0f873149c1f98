#include <doctest.h>

#include <complex>
#include <random>

#include "coopdde/eigen.hpp"
#include "coopdde/errors.hpp"
#include "coopdde/matrix.hpp"

using namespace coopdde;

namespace {

// Test-only oracle: determinant of A - z I by complex Gaussian elimination.
std::complex<double> char_poly_at(const Matrix& a, std::complex<double> z) {
    const int n = a.order();
    std::vector<std::vector<std::complex<double>>> m(n, std::vector<std::complex<double>>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = a(i, j);
        m[i][i] -= z;
    }
    std::complex<double> det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        }
        if (std::abs(m[piv][col]) == 0.0) return 0.0;
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = -det;
        }
        det *= m[col][col];
        for (int r = col + 1; r < n; ++r) {
            const std::complex<double> f = m[r][col] / m[col][col];
            for (int j = col; j < n; ++j) m[r][j] -= f * m[col][j];
        }
    }
    return det;
}

double matrix_scale(const Matrix& a) { return std::max(1.0, a.max_abs()); }

}  // namespace

TEST_CASE("matrix basics") {
    Matrix m(2, {1.0, 2.0, 3.0, 4.0});
    CHECK(m.order() == 2);
    CHECK(m(0, 1) == 2.0);

    const Vec y = m.multiply({1.0, 1.0});
    CHECK(y[0] == doctest::Approx(3.0));
    CHECK(y[1] == doctest::Approx(7.0));

    const Matrix id = Matrix::identity(3);
    CHECK(id(2, 2) == 1.0);
    CHECK(id(0, 1) == 0.0);

    const Matrix sub = Matrix(3, {1, 2, 3, 4, 5, 6, 7, 8, 9}).submatrix({0, 2});
    CHECK(sub.order() == 2);
    CHECK(sub(0, 1) == 3.0);
    CHECK(sub(1, 0) == 7.0);

    CHECK_THROWS_AS(Matrix(2, {1.0}), StructuralError);
}

TEST_CASE("solve_linear") {
    const Matrix a(2, {2.0, 1.0, 1.0, 3.0});
    const auto x = solve_linear(a, {5.0, 10.0});
    REQUIRE(x.has_value());
    CHECK((*x)[0] == doctest::Approx(1.0));
    CHECK((*x)[1] == doctest::Approx(3.0));

    const Matrix singular(2, {1.0, 1.0, 1.0, 1.0});
    CHECK(!solve_linear(singular, {1.0, 2.0}).has_value());
}

TEST_CASE("dense eigenvalues on closed-form spectra") {
    SUBCASE("diagonal") {
        const auto ev = dense_eigenvalues(Matrix(3, {3, 0, 0, 0, -1, 0, 0, 0, 2}));
        CHECK(ev[0].real() == doctest::Approx(3.0));
        CHECK(ev[1].real() == doctest::Approx(2.0));
        CHECK(ev[2].real() == doctest::Approx(-1.0));
        for (const auto& z : ev) CHECK(z.imag() == doctest::Approx(0.0));
    }
    SUBCASE("symmetric 2x2, quadratic roots 0 and -2") {
        const auto ev = dense_eigenvalues(Matrix(2, {-1, 1, 1, -1}));
        CHECK(ev[0].real() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(ev[1].real() == doctest::Approx(-2.0));
    }
    SUBCASE("rotation gives a complex pair") {
        const auto ev = dense_eigenvalues(Matrix(2, {0, -1, 1, 0}));
        CHECK(ev[0].real() == doctest::Approx(0.0));
        CHECK(std::abs(ev[0].imag()) == doctest::Approx(1.0));
        CHECK(ev[1].imag() == doctest::Approx(-ev[0].imag()));
    }
    SUBCASE("companion matrix of (z-1)(z-2)(z-3)") {
        // z^3 - 6 z^2 + 11 z - 6
        const Matrix companion(3, {6, -11, 6, 1, 0, 0, 0, 1, 0});
        const auto ev = dense_eigenvalues(companion);
        CHECK(ev[0].real() == doctest::Approx(3.0));
        CHECK(ev[1].real() == doctest::Approx(2.0));
        CHECK(ev[2].real() == doctest::Approx(1.0));
    }
}

TEST_CASE("dense eigenvalues satisfy the characteristic polynomial on random matrices") {
    std::mt19937_64 rng(7001);
    std::uniform_real_distribution<double> entry(-3.0, 3.0);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        Matrix a(n);
        double trace = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = entry(rng);
            trace += a(i, i);
        }
        const auto ev = dense_eigenvalues(a);
        REQUIRE(static_cast<int>(ev.size()) == n);

        std::complex<double> sum = 0.0;
        for (const auto& z : ev) {
            sum += z;
            // Root residual against an independent complex-LU determinant.
            const double scale = std::pow(matrix_scale(a) + std::abs(z), n);
            CHECK(std::abs(char_poly_at(a, z)) <= 1e-7 * scale);
        }
        CHECK(sum.real() == doctest::Approx(trace).epsilon(1e-8));
        CHECK(std::abs(sum.imag()) <= 1e-8 * matrix_scale(a));
    }
}

TEST_CASE("max_real_part") {
    CHECK(max_real_part({{1.0, 5.0}, {2.0, -1.0}, {-3.0, 0.0}}) == doctest::Approx(2.0));
}
