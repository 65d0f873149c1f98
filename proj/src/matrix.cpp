#include "coopdde/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "coopdde/errors.hpp"

namespace coopdde {

Matrix::Matrix(int order, std::initializer_list<double> rowMajor) : Matrix(order) {
    if (rowMajor.size() != a_.size()) {
        throw StructuralError("Matrix: initializer size does not match order^2");
    }
    std::copy(rowMajor.begin(), rowMajor.end(), a_.begin());
}

Matrix Matrix::identity(int order) {
    Matrix m(order);
    for (int i = 0; i < order; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vec& d) {
    Matrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.order(); ++i) m(i, i) = d[i];
    return m;
}

Vec Matrix::multiply(const Vec& x) const {
    Vec y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n_; ++j) acc += (*this)(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

Matrix Matrix::submatrix(const std::vector<int>& idx) const {
    Matrix s(static_cast<int>(idx.size()));
    for (std::size_t p = 0; p < idx.size(); ++p) {
        for (std::size_t q = 0; q < idx.size(); ++q) {
            s(static_cast<int>(p), static_cast<int>(q)) = (*this)(idx[p], idx[q]);
        }
    }
    return s;
}

bool Matrix::all_finite() const {
    return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::max_abs_diagonal() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i) m = std::max(m, std::abs((*this)(i, i)));
    return m;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += rhs.a_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= rhs.a_[i];
    return *this;
}

Matrix& Matrix::operator*=(double c) {
    for (double& v : a_) v *= c;
    return *this;
}

std::optional<Vec> solve_linear(const Matrix& a, const Vec& b, double pivotTol) {
    const int n = a.order();
    Matrix lu = a;
    Vec x = b;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
        }
        if (std::abs(lu(piv, col)) <= pivotTol) return std::nullopt;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(lu(piv, j), lu(col, j));
            std::swap(x[piv], x[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = lu(r, col) / lu(col, col);
            lu(r, col) = 0.0;
            for (int j = col + 1; j < n; ++j) lu(r, j) -= f * lu(col, j);
            x[r] -= f * x[col];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = x[i];
        for (int j = i + 1; j < n; ++j) acc -= lu(i, j) * x[j];
        x[i] = acc / lu(i, i);
    }
    return x;
}

double max_norm(const Vec& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace coopdde
