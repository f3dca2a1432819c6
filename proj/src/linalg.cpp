#include "dqm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dqm {

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    Matrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Real aik = (*this)(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
        }
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    Matrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j) - rhs(i, j);
    return out;
}

Vector Matrix::operator*(const Vector& v) const {
    Vector out(rows_, 0);
    for (int i = 0; i < rows_; ++i) {
        Real s = 0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Real Matrix::max_abs() const {
    Real m = 0;
    for (Real v : a_) m = std::max(m, std::fabs(v));
    return m;
}

Real Matrix::inf_norm() const {
    Real m = 0;
    for (int i = 0; i < rows_; ++i) {
        Real s = 0;
        for (int j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

namespace {

Real pythag(Real a, Real b) {
    const Real absa = std::fabs(a), absb = std::fabs(b);
    if (absa > absb) {
        const Real r = absb / absa;
        return absa * std::sqrt(1 + r * r);
    }
    if (absb == 0) return 0;
    const Real r = absa / absb;
    return absb * std::sqrt(1 + r * r);
}

void sort_eigensystem(Eigensystem& es) {
    const int n = static_cast<int>(es.values.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return es.values[a] < es.values[b]; });
    Eigensystem sorted;
    sorted.values.resize(n);
    if (!es.vectors.empty()) sorted.vectors.resize(n);
    for (int k = 0; k < n; ++k) {
        sorted.values[k] = es.values[idx[k]];
        if (!es.vectors.empty()) sorted.vectors[k] = std::move(es.vectors[idx[k]]);
    }
    es = std::move(sorted);
}

}  // namespace

Eigensystem tridiagonal_eigensystem(Vector d, Vector e, bool want_vectors) {
    const int n = static_cast<int>(d.size());
    e.resize(n, 0);  // e[n-1] used as workspace
    // z columns accumulate rotations; z(k,j) is component k of eigenvector j.
    Matrix z = want_vectors ? Matrix::identity(n) : Matrix();

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const Real dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) + dd == dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw ConvergenceFailure("tridiagonal QL failed", iter);
                Real g = (d[l + 1] - d[l]) / (2 * e[l]);
                Real r = pythag(g, 1);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                Real s = 1, c = 1, p = 0;
                for (int i = m - 1; i >= l; --i) {
                    Real f = s * e[i];
                    const Real b = c * e[i];
                    e[i + 1] = r = pythag(f, g);
                    if (r == 0) {
                        d[i + 1] -= p;
                        e[m] = 0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2 * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                    if (want_vectors)
                        for (int k = 0; k < n; ++k) {
                            f = z(k, i + 1);
                            z(k, i + 1) = s * z(k, i) + c * f;
                            z(k, i) = c * z(k, i) - s * f;
                        }
                }
                if (r == 0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0;
            }
        } while (m != l);
    }

    Eigensystem es;
    es.values = std::move(d);
    if (want_vectors) {
        es.vectors.resize(n);
        for (int j = 0; j < n; ++j) {
            es.vectors[j].resize(n);
            for (int k = 0; k < n; ++k) es.vectors[j][k] = z(k, j);
        }
    }
    sort_eigensystem(es);
    return es;
}

Eigensystem jacobi_eigensystem(Matrix a) {
    const int n = a.rows();
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        Real off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < std::numeric_limits<Real>::epsilon()) break;
        if (sweep == 99) throw ConvergenceFailure("Jacobi eigensolver failed", sweep);
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (a(p, q) == 0) continue;
                const Real theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
                Real t = 1 / (std::fabs(theta) + std::sqrt(theta * theta + 1));
                if (theta < 0) t = -t;
                const Real c = 1 / std::sqrt(t * t + 1);
                const Real s = t * c;
                const Real tau = s / (1 + c);
                const Real apq = a(p, q);
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0;
                for (int k = 0; k < n; ++k) {
                    if (k != p && k != q) {
                        const Real akp = a(k, p), akq = a(k, q);
                        a(k, p) = a(p, k) = akp - s * (akq + tau * akp);
                        a(k, q) = a(q, k) = akq + s * (akp - tau * akq);
                    }
                    const Real vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
    }
    Eigensystem es;
    es.values.resize(n);
    es.vectors.resize(n);
    for (int j = 0; j < n; ++j) {
        es.values[j] = a(j, j);
        es.vectors[j].resize(n);
        for (int k = 0; k < n; ++k) es.vectors[j][k] = v(k, j);
    }
    sort_eigensystem(es);
    return es;
}

Real lu_determinant(Matrix a) {
    const int n = a.rows();
    Real det = 1;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
        if (a(piv, k) == 0) return 0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
            det = -det;
        }
        det *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const Real f = a(i, k) / a(k, k);
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

Vector solve_linear(Matrix a, Vector b) {
    const int n = a.rows();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
        if (a(piv, k) == 0) throw ConvergenceFailure("singular linear system", k);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
            std::swap(b[piv], b[k]);
        }
        for (int i = k + 1; i < n; ++i) {
            const Real f = a(i, k) / a(k, k);
            b[i] -= f * b[k];
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    Vector x(n);
    for (int i = n - 1; i >= 0; --i) {
        Real s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

PolyFit polynomial_fit(const Vector& y, const Vector& values, int degree) {
    const int m = static_cast<int>(y.size());
    const int nc = degree + 1;
    Real ylo = y[0], yhi = y[0];
    for (Real v : y) {
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
    }
    const Real span = (yhi > ylo) ? (yhi - ylo) : Real(1);
    auto scale = [&](Real v) { return 2 * (v - ylo) / span - 1; };

    // Normal equations on the scaled variable; fine at the degrees used here.
    Matrix ata(nc, nc);
    Vector atb(nc, 0);
    for (int i = 0; i < m; ++i) {
        Vector pow(nc);
        pow[0] = 1;
        const Real t = scale(y[i]);
        for (int j = 1; j < nc; ++j) pow[j] = pow[j - 1] * t;
        for (int r = 0; r < nc; ++r) {
            atb[r] += pow[r] * values[i];
            for (int c = 0; c < nc; ++c) ata(r, c) += pow[r] * pow[c];
        }
    }
    PolyFit fit;
    fit.degree = degree;
    fit.coeffs = solve_linear(std::move(ata), std::move(atb));

    Real max_data = 0, max_err = 0;
    for (int i = 0; i < m; ++i) {
        const Real t = scale(y[i]);
        Real p = 0;
        for (int j = nc - 1; j >= 0; --j) p = p * t + fit.coeffs[j];
        max_err = std::max(max_err, std::fabs(p - values[i]));
        max_data = std::max(max_data, std::fabs(values[i]));
    }
    fit.residual = (max_data > 0) ? max_err / max_data : max_err;
    return fit;
}

int fitted_polynomial_degree(const Vector& y, const Vector& values, int max_degree, Real tol) {
    for (int deg = 0; deg <= max_degree; ++deg) {
        if (deg + 3 > static_cast<int>(y.size())) break;  // demand a few spare points
        if (polynomial_fit(y, values, deg).residual <= tol) return deg;
    }
    throw DegreeMismatch(max_degree, -1);
}

Matrix matrix_exponential(const Matrix& a) {
    const int n = a.rows();
    int squarings = 0;
    Real norm = a.inf_norm();
    while (norm > 0.5L) {
        norm /= 2;
        ++squarings;
    }
    Matrix as(n, n);
    const Real scale = std::pow(Real(2), static_cast<Real>(-squarings));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) as(i, j) = a(i, j) * scale;

    // Pade(6,6)
    static const Real c[] = {1.0L,        1.0L / 2,     5.0L / 44,    1.0L / 66,
                             1.0L / 792,  1.0L / 15840, 1.0L / 665280};
    Matrix even(n, n), odd(n, n);
    Matrix power = Matrix::identity(n);
    for (int k = 0; k <= 6; ++k) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (k % 2 == 0)
                    even(i, j) += c[k] * power(i, j);
                else
                    odd(i, j) += c[k] * power(i, j);
            }
        power = power * as;
    }
    // exp(A) ~ (even - odd)^-1 (even + odd): solve column by column.
    Matrix lhs = even - odd;
    Matrix rhs(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rhs(i, j) = even(i, j) + odd(i, j);
    Matrix out(n, n);
    for (int j = 0; j < n; ++j) {
        Vector col(n);
        for (int i = 0; i < n; ++i) col[i] = rhs(i, j);
        Vector x = solve_linear(lhs, col);
        for (int i = 0; i < n; ++i) out(i, j) = x[i];
    }
    for (int s = 0; s < squarings; ++s) out = out * out;
    return out;
}

}  // namespace dqm
