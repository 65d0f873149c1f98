#include "coopdde/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coopdde/errors.hpp"

namespace coopdde {

namespace {

// Householder reduction of a general real matrix to upper Hessenberg form.
void reduce_to_hessenberg(Matrix& h) {
    const int n = h.order();
    std::vector<double> ort(n, 0.0);
    for (int m = 1; m <= n - 2; ++m) {
        double scale = 0.0;
        for (int i = m; i < n; ++i) scale += std::abs(h(i, m - 1));
        if (scale == 0.0) continue;

        double hsum = 0.0;
        for (int i = n - 1; i >= m; --i) {
            ort[i] = h(i, m - 1) / scale;
            hsum += ort[i] * ort[i];
        }
        double g = std::sqrt(hsum);
        if (ort[m] > 0) g = -g;
        hsum -= ort[m] * g;
        ort[m] -= g;

        // Apply Householder similarity transformation H <- (I - u u'/h) H (I - u u'/h).
        for (int j = m; j < n; ++j) {
            double f = 0.0;
            for (int i = n - 1; i >= m; --i) f += ort[i] * h(i, j);
            f /= hsum;
            for (int i = m; i < n; ++i) h(i, j) -= f * ort[i];
        }
        for (int i = 0; i < n; ++i) {
            double f = 0.0;
            for (int j = n - 1; j >= m; --j) f += ort[j] * h(i, j);
            f /= hsum;
            for (int j = m; j < n; ++j) h(i, j) -= f * ort[j];
        }
        h(m, m - 1) = scale * g;
        for (int i = m + 1; i < n; ++i) h(i, m - 1) = 0.0;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
void hessenberg_qr(Matrix& h, std::vector<double>& re, std::vector<double>& im) {
    const int nn = h.order();
    const double eps = std::ldexp(1.0, -52);
    int n = nn - 1;
    double exshift = 0.0;
    double p = 0, q = 0, r = 0, s = 0, z = 0, w = 0, x = 0, y = 0;

    double norm = 0.0;
    for (int i = 0; i < nn; ++i) {
        for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(h(i, j));
    }

    int iter = 0;
    long totalIter = 0;
    const long iterCap = 80L * std::max(nn, 1);
    while (n >= 0) {
        if (++totalIter > iterCap) {
            throw NumericalError("dense_eigenvalues: QR iteration did not converge");
        }

        // Look for a single small sub-diagonal element.
        int l = n;
        while (l > 0) {
            s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(h(l, l - 1)) < eps * s) break;
            --l;
        }

        if (l == n) {
            // One real root found.
            re[n] = h(n, n) + exshift;
            im[n] = 0.0;
            --n;
            iter = 0;
        } else if (l == n - 1) {
            // A pair of roots found.
            w = h(n, n - 1) * h(n - 1, n);
            p = (h(n - 1, n - 1) - h(n, n)) / 2.0;
            q = p * p + w;
            z = std::sqrt(std::abs(q));
            x = h(n, n) + exshift;
            if (q >= 0) {
                z = (p >= 0) ? p + z : p - z;
                re[n - 1] = x + z;
                re[n] = (z != 0.0) ? x - w / z : re[n - 1];
                im[n - 1] = 0.0;
                im[n] = 0.0;
            } else {
                re[n - 1] = x + p;
                re[n] = x + p;
                im[n - 1] = z;
                im[n] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // No convergence yet; perform a double QR sweep.
            x = h(n, n);
            y = 0.0;
            w = 0.0;
            if (l < n) {
                y = h(n - 1, n - 1);
                w = h(n, n - 1) * h(n - 1, n);
            }

            // Wilkinson's exceptional shift.
            if (iter == 10 || iter == 20) {
                exshift += x;
                for (int i = 0; i <= n; ++i) h(i, i) -= x;
                s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            // Second exceptional shift.
            if (iter == 30) {
                s = (y - x) / 2.0;
                s = s * s + w;
                if (s > 0) {
                    s = std::sqrt(s);
                    if (y < x) s = -s;
                    s = x - w / ((y - x) / 2.0 + s);
                    for (int i = 0; i <= n; ++i) h(i, i) -= s;
                    exshift += s;
                    x = y = w = 0.964;
                }
            }
            ++iter;

            // Look for two consecutive small sub-diagonal elements.
            int m = n - 2;
            while (m >= l) {
                z = h(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
                q = h(m + 1, m + 1) - z - r - s;
                r = h(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    eps * (std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) +
                                          std::abs(h(m + 1, m + 1))))) {
                    break;
                }
                --m;
            }
            for (int i = m + 2; i <= n; ++i) {
                h(i, i - 2) = 0.0;
                if (i > m + 2) h(i, i - 3) = 0.0;
            }

            // Double QR step on rows l..n and columns m..n.
            for (int k = m; k <= n - 1; ++k) {
                const bool notLast = (k != n - 1);
                if (k != m) {
                    p = h(k, k - 1);
                    q = h(k + 1, k - 1);
                    r = notLast ? h(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0) continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0) s = -s;
                if (s == 0.0) continue;
                if (k != m) {
                    h(k, k - 1) = -s * x;
                } else if (l != m) {
                    h(k, k - 1) = -h(k, k - 1);
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;

                for (int j = k; j < nn; ++j) {
                    p = h(k, j) + q * h(k + 1, j);
                    if (notLast) {
                        p += r * h(k + 2, j);
                        h(k + 2, j) -= p * z;
                    }
                    h(k, j) -= p * x;
                    h(k + 1, j) -= p * y;
                }
                for (int i = 0; i <= std::min(n, k + 3); ++i) {
                    p = x * h(i, k) + y * h(i, k + 1);
                    if (notLast) {
                        p += z * h(i, k + 2);
                        h(i, k + 2) -= p * r;
                    }
                    h(i, k) -= p;
                    h(i, k + 1) -= p * q;
                }
            }
        }
    }
}

}  // namespace

std::vector<std::complex<double>> dense_eigenvalues(const Matrix& a) {
    const int n = a.order();
    if (n == 0) return {};
    if (!a.all_finite()) {
        throw StructuralError("dense_eigenvalues: matrix has non-finite entries");
    }
    if (n == 1) return {std::complex<double>(a(0, 0), 0.0)};

    Matrix h = a;
    reduce_to_hessenberg(h);
    std::vector<double> re(n, 0.0), im(n, 0.0);
    hessenberg_qr(h, re, im);

    std::vector<std::complex<double>> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = {re[i], im[i]};
    std::sort(ev.begin(), ev.end(), [](const auto& u, const auto& v) {
        if (u.real() != v.real()) return u.real() > v.real();
        return u.imag() > v.imag();
    });
    return ev;
}

double max_real_part(const std::vector<std::complex<double>>& eigenvalues) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& ev : eigenvalues) m = std::max(m, ev.real());
    return m;
}

}  // namespace coopdde
