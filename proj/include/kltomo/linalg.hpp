#pragma once

// Dense matrices just big enough for orthonormal frames and the canonical-angle
// Gram matrices, plus the two eigen-solvers the toolkit needs: cyclic Jacobi
// rotations for small symmetric matrices and implicit-shift QL for the
// symmetric tridiagonal systems of the Golub-Welsch quadrature construction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace kltomo {

class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative size");
    }

    static Matrix identity(int m) {
        Matrix I(m, m);
        for (int k = 0; k < m; ++k) I(k, k) = 1.0;
        return I;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<double>& data() const { return a_; }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline Matrix matmul(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Matrix C(A.rows(), B.cols());
    for (int r = 0; r < A.rows(); ++r)
        for (int k = 0; k < A.cols(); ++k) {
            const double a = A(r, k);
            if (a == 0.0) continue;
            for (int c = 0; c < B.cols(); ++c) C(r, c) += a * B(k, c);
        }
    return C;
}

inline Matrix transpose(const Matrix& A) {
    Matrix T(A.cols(), A.rows());
    for (int r = 0; r < A.rows(); ++r)
        for (int c = 0; c < A.cols(); ++c) T(c, r) = A(r, c);
    return T;
}

// A' A
inline Matrix gram(const Matrix& A) {
    Matrix G(A.cols(), A.cols());
    for (int p = 0; p < A.cols(); ++p)
        for (int q = p; q < A.cols(); ++q) {
            double s = 0.0;
            for (int r = 0; r < A.rows(); ++r) s += A(r, p) * A(r, q);
            G(p, q) = s;
            G(q, p) = s;
        }
    return G;
}

// A A'
inline Matrix outer_gram(const Matrix& A) {
    Matrix G(A.rows(), A.rows());
    for (int p = 0; p < A.rows(); ++p)
        for (int q = p; q < A.rows(); ++q) {
            double s = 0.0;
            for (int c = 0; c < A.cols(); ++c) s += A(p, c) * A(q, c);
            G(p, q) = s;
            G(q, p) = s;
        }
    return G;
}

inline std::vector<double> matvec(const Matrix& A, const std::vector<double>& x) {
    if (A.cols() != static_cast<int>(x.size())) throw std::invalid_argument("matvec: shape mismatch");
    std::vector<double> y(static_cast<std::size_t>(A.rows()), 0.0);
    for (int r = 0; r < A.rows(); ++r) {
        double s = 0.0;
        for (int c = 0; c < A.cols(); ++c) s += A(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

// Frobenius norm of A'A - I.
inline double orthonormality_residual(const Matrix& A) {
    const Matrix G = gram(A);
    double s = 0.0;
    for (int p = 0; p < G.rows(); ++p)
        for (int q = 0; q < G.cols(); ++q) {
            const double d = G(p, q) - (p == q ? 1.0 : 0.0);
            s += d * d;
        }
    return std::sqrt(s);
}

// In-place modified Gram-Schmidt with one re-orthogonalization pass.
// Throws on (near) rank deficiency.
inline void modified_gram_schmidt(Matrix& A) {
    const int n = A.rows(), m = A.cols();
    for (int c = 0; c < m; ++c) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int p = 0; p < c; ++p) {
                double dot = 0.0;
                for (int r = 0; r < n; ++r) dot += A(r, p) * A(r, c);
                for (int r = 0; r < n; ++r) A(r, c) -= dot * A(r, p);
            }
        }
        double norm2 = 0.0;
        for (int r = 0; r < n; ++r) norm2 += A(r, c) * A(r, c);
        if (norm2 < 1e-24) throw NumericalError("modified_gram_schmidt: rank deficient input");
        const double inv = 1.0 / std::sqrt(norm2);
        for (int r = 0; r < n; ++r) A(r, c) *= inv;
    }
}

// Gaussian matrix followed by Gram-Schmidt; the resulting frame is Haar
// distributed on the Stiefel manifold V_{n,m}.
inline Matrix random_orthonormal(int n, int m, Rng& rng) {
    Matrix A(n, m);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c) A(r, c) = rng.normal();
    modified_gram_schmidt(A);
    return A;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted in
// non-increasing order. Intended for the tiny (<= 8 x 8) Gram matrices that
// carry canonical angles.
inline std::vector<double> symmetric_eigenvalues(Matrix S) {
    if (S.rows() != S.cols()) throw std::invalid_argument("symmetric_eigenvalues: not square");
    const int m = S.rows();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) off += S(p, q) * S(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) {
                if (std::abs(S(p, q)) < 1e-300) continue;
                const double theta = 0.5 * (S(q, q) - S(p, p)) / S(p, q);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int r = 0; r < m; ++r) {
                    const double arp = S(r, p), arq = S(r, q);
                    S(r, p) = c * arp - s * arq;
                    S(r, q) = s * arp + c * arq;
                }
                for (int r = 0; r < m; ++r) {
                    const double apr = S(p, r), aqr = S(q, r);
                    S(p, r) = c * apr - s * aqr;
                    S(q, r) = s * apr + c * aqr;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) ev[k] = S(k, k);
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

// Implicit-shift QL for a symmetric tridiagonal matrix. On return d holds the
// eigenvalues in ascending order and z the correspondingly permuted entries of
// the rotated input vector (pass e_1 to obtain first eigenvector components,
// as Golub-Welsch requires). d has size n, e holds the n-1 off-diagonals.
inline void tridiagonal_eigen(std::vector<double>& d, std::vector<double>& e,
                              std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return;
    if (static_cast<int>(e.size()) < n - 1) throw std::invalid_argument("tridiagonal_eigen: bad e");
    if (static_cast<int>(z.size()) != n) throw std::invalid_argument("tridiagonal_eigen: bad z");
    e.resize(static_cast<std::size_t>(n), 0.0);
    e[n - 1] = 0.0;
    const double eps = 2.22e-16;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (++iter > 50) throw NonConvergence("tridiagonal_eigen: too many QL iterations");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }
    // insertion sort, permuting z alongside
    for (int ii = 1; ii < n; ++ii) {
        const double dv = d[ii], zv = z[ii];
        int j = ii - 1;
        while (j >= 0 && d[j] > dv) {
            d[j + 1] = d[j];
            z[j + 1] = z[j];
            --j;
        }
        d[j + 1] = dv;
        z[j + 1] = zv;
    }
}

// Orthonormal basis of the orthogonal complement of the columns of A,
// obtained by orthonormalizing the residuals of the standard basis.
inline Matrix orthocomplement_basis(const Matrix& A) {
    const int n = A.rows(), m = A.cols();
    if (m > n) throw std::invalid_argument("orthocomplement_basis: more columns than rows");
    Matrix C(n, n - m);
    std::vector<std::vector<double>> accepted;
    accepted.reserve(static_cast<std::size_t>(n - m));
    for (int k = 0; k < n && static_cast<int>(accepted.size()) < n - m; ++k) {
        std::vector<double> v(static_cast<std::size_t>(n), 0.0);
        v[k] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (int c = 0; c < m; ++c) {
                double dot = 0.0;
                for (int r = 0; r < n; ++r) dot += A(r, c) * v[r];
                for (int r = 0; r < n; ++r) v[r] -= dot * A(r, c);
            }
            for (const auto& w : accepted) {
                double dot = 0.0;
                for (int r = 0; r < n; ++r) dot += w[r] * v[r];
                for (int r = 0; r < n; ++r) v[r] -= dot * w[r];
            }
        }
        double norm2 = 0.0;
        for (double x : v) norm2 += x * x;
        if (norm2 < 1e-16) continue;
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
        accepted.push_back(std::move(v));
    }
    if (static_cast<int>(accepted.size()) != n - m)
        throw NumericalError("orthocomplement_basis: completion failed");
    for (int c = 0; c < n - m; ++c)
        for (int r = 0; r < n; ++r) C(r, c) = accepted[c][r];
    return C;
}

} // namespace kltomo
