#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

namespace coopdde {

using Vec = std::vector<double>;

/// Dense square matrix, row-major.  Sized for desk-scale problems
/// (patch models with a handful of components), not for sparse work.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int order) : n_(order), a_(static_cast<std::size_t>(order) * order, 0.0) {}
    Matrix(int order, std::initializer_list<double> rowMajor);

    static Matrix identity(int order);
    static Matrix diagonal(const Vec& d);

    int order() const { return n_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    Vec multiply(const Vec& x) const;

    /// Principal submatrix on the given index set (order preserved).
    Matrix submatrix(const std::vector<int>& idx) const;

    bool all_finite() const;
    double max_abs_diagonal() const;
    double max_abs() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double c);

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
    friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
    friend Matrix operator*(double c, Matrix m) { return m *= c; }
    friend Matrix operator-(Matrix m) { return m *= -1.0; }
    friend bool operator==(const Matrix& a, const Matrix& b) { return a.n_ == b.n_ && a.a_ == b.a_; }

private:
    int n_ = 0;
    std::vector<double> a_;
};

/// Solves A x = b by partial-pivot LU.  Returns nullopt when the pivot
/// drops below `pivotTol` (matrix singular to working precision).
std::optional<Vec> solve_linear(const Matrix& a, const Vec& b, double pivotTol = 1e-13);

double max_norm(const Vec& x);

}  // namespace coopdde
