#pragma once

#include <cstddef>
#include <vector>

#include "dqm/core.hpp"

namespace dqm {

// Dense row-major matrix, desk-scale only.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Real& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    Real operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    Matrix transposed() const;
    Matrix operator*(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Vector operator*(const Vector& v) const;

    Real max_abs() const;
    // max_i sum_j |a_ij|
    Real inf_norm() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Real> a_;
};

struct Eigensystem {
    Vector values;                // ascending
    std::vector<Vector> vectors;  // vectors[k] belongs to values[k], normalized
};

// Implicit-shift QL for a symmetric tridiagonal matrix, rotations accumulated
// into the eigenvector matrix.  diag has n entries, offdiag n-1.
Eigensystem tridiagonal_eigensystem(Vector diag, Vector offdiag, bool want_vectors = true);

// Cyclic Jacobi rotations; dense fallback and test oracle for dim <= 64.
Eigensystem jacobi_eigensystem(Matrix a);

// LU determinant with partial pivoting.
Real lu_determinant(Matrix a);

// Solve a small dense linear system in place (Gaussian elimination, partial
// pivoting); returns the solution of A x = b.
Vector solve_linear(Matrix a, Vector b);

struct PolyFit {
    Vector coeffs;       // in the scaled variable, ascending degree
    Real residual = 0;   // max |fit - data| / max |data|
    int degree = 0;
};

// Least-squares fit of data(y_i) by a polynomial of degree `degree` in y,
// internally scaled to [-1,1] for conditioning.
PolyFit polynomial_fit(const Vector& y, const Vector& values, int degree);

// Smallest degree whose fit residual drops below tol; throws DegreeMismatch
// if none does up to max_degree.
int fitted_polynomial_degree(const Vector& y, const Vector& values, int max_degree, Real tol);

// Scaling-and-squaring Pade-6 matrix exponential.
Matrix matrix_exponential(const Matrix& a);

}  // namespace dqm
