#pragma once

// Subspaces as orthonormal frames, canonical angles to the coordinate
// subspace R^ell, Haar and equal-angle sampling, and the block rotation
// group K_ell = O(n-ell) x O(ell).
//
// Convention: R^ell is spanned by the LAST ell coordinates, so
// sigma = [0; I_ell] and t = cos^2(angle from theta to R^ell) = |sigma' theta|^2.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace kltomo {

struct Dims {
    int n = 0;
    int i = 0;
    int ell = 0;

    Dims(int n_, int i_, int ell_) : n(n_), i(i_), ell(ell_) {
        if (n < 2) throw std::invalid_argument("Dims: require n >= 2");
        if (i < 1 || i > n - 1) throw std::invalid_argument("Dims: require 1 <= i <= n-1");
        if (ell < 1 || ell > n - 1) throw std::invalid_argument("Dims: require 1 <= ell <= n-1");
    }

    int m() const { return std::min(i, ell); }
};

class Frame {
  public:
    explicit Frame(Matrix columns, double tol = 1e-8) : cols_(std::move(columns)) {
        if (cols_.cols() < 1 || cols_.cols() > cols_.rows())
            throw std::invalid_argument("Frame: need an n x i matrix with 1 <= i <= n");
        if (orthonormality_residual(cols_) > tol)
            throw std::invalid_argument("Frame: columns are not orthonormal");
    }

    const Matrix& columns() const { return cols_; }
    int ambient() const { return cols_.rows(); }
    int dim() const { return cols_.cols(); }

    // tau * eta for eta in R^i: the sphere point of intrinsic coordinates eta.
    std::vector<double> embed(std::span<const double> eta) const {
        std::vector<double> out(static_cast<std::size_t>(ambient()), 0.0);
        for (int c = 0; c < dim(); ++c) {
            const double e = eta[c];
            for (int r = 0; r < ambient(); ++r) out[r] += cols_(r, c) * e;
        }
        return out;
    }

  private:
    Matrix cols_;
};

struct CanonicalSpectrum {
    std::vector<double> lambdas; // non-increasing, in [0,1]
    int size() const { return static_cast<int>(lambdas.size()); }
};

struct KlRotation {
    Matrix alpha_block; // (n-ell) x (n-ell), acts on the leading coordinates
    Matrix beta_block;  // ell x ell, acts on the trailing coordinates

    KlRotation(Matrix a, Matrix b) : alpha_block(std::move(a)), beta_block(std::move(b)) {
        if (alpha_block.rows() != alpha_block.cols() || beta_block.rows() != beta_block.cols())
            throw std::invalid_argument("KlRotation: blocks must be square");
        if (orthonormality_residual(alpha_block) > 1e-12 ||
            orthonormality_residual(beta_block) > 1e-12)
            throw std::invalid_argument("KlRotation: blocks must be orthogonal");
    }
};

// Haar-distributed orthonormal i-frame: Gaussian matrix + Gram-Schmidt.
// The distribution induced on G_{n,i} is rotation invariant.
inline Frame haar_sample_frame(const Dims& dims, Rng& rng) {
    return Frame(random_orthonormal(dims.n, dims.i, rng));
}

// Squared cosines of the canonical angles between span(frame) and R^ell,
// sorted non-increasing. Eigenvalues of tau' sigma sigma' tau (i <= ell)
// or sigma' P_xi sigma (i > ell); the two Gram matrices share their nonzero
// spectrum, so we always diagonalize the smaller one.
inline CanonicalSpectrum canonical_lambdas(const Frame& frame, const Dims& dims) {
    if (frame.ambient() != dims.n || frame.dim() != dims.i)
        throw std::invalid_argument("canonical_lambdas: frame does not match dims");
    if (orthonormality_residual(frame.columns()) > 1e-8)
        throw std::invalid_argument("canonical_lambdas: frame is not orthonormal");
    const int n = dims.n, i = dims.i, ell = dims.ell;
    Matrix bottom(ell, i); // sigma' tau: last ell rows of tau
    for (int r = 0; r < ell; ++r)
        for (int c = 0; c < i; ++c) bottom(r, c) = frame.columns()(n - ell + r, c);
    const Matrix g = (i <= ell) ? gram(bottom) : outer_gram(bottom);
    std::vector<double> ev = symmetric_eigenvalues(g);
    for (double& v : ev) {
        if (v < -1e-10 || v > 1.0 + 1e-10)
            throw NumericalError("canonical_lambdas: eigenvalue outside [0,1] beyond roundoff: " +
                                 std::to_string(v));
        v = std::clamp(v, 0.0, 1.0);
    }
    return CanonicalSpectrum{std::move(ev)};
}

// Frame whose canonical angles to R^ell are all equal, with cos^2 = lambda.
// Columns c_j = sqrt(lambda) b_j + sqrt(1-lambda) a_j for j <= m and c_j = a_j
// beyond, with Haar frames a in R^{n-ell} and b in R^ell.
inline Frame equal_angle_frame(const Dims& dims, double lambda, Rng& rng) {
    const int n = dims.n, i = dims.i, ell = dims.ell, m = dims.m();
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("equal_angle_frame: lambda must lie in [0,1]");
    if (lambda < 1.0 && i > n - ell)
        throw std::invalid_argument(
            "equal_angle_frame: lambda < 1 requires i <= n-ell (forced intersection with R^ell)");
    if (lambda == 1.0 && i > ell)
        throw std::invalid_argument("equal_angle_frame: lambda = 1 requires i <= ell");

    Matrix cols(n, i);
    const double sb = std::sqrt(lambda), sa = std::sqrt(1.0 - lambda);
    if (lambda < 1.0) {
        const Matrix a = random_orthonormal(n - ell, i, rng);
        for (int c = 0; c < i; ++c) {
            const double scale = (c < m) ? sa : 1.0;
            for (int r = 0; r < n - ell; ++r) cols(r, c) = scale * a(r, c);
        }
    }
    if (lambda > 0.0) {
        const Matrix b = random_orthonormal(ell, m, rng);
        for (int c = 0; c < m; ++c)
            for (int r = 0; r < ell; ++r) cols(n - ell + r, c) = sb * b(r, c);
    }
    return Frame(std::move(cols));
}

// Orthonormal (n-i)-frame spanning the orthogonal complement of span(frame).
inline Frame orthocomplement_frame(const Frame& frame) {
    return Frame(orthocomplement_basis(frame.columns()));
}

inline KlRotation haar_kl_rotation(const Dims& dims, Rng& rng) {
    return KlRotation(random_orthonormal(dims.n - dims.ell, dims.n - dims.ell, rng),
                      random_orthonormal(dims.ell, dims.ell, rng));
}

// gamma tau with gamma = blockdiag(alpha, beta); preserves canonical angles.
inline Frame apply_kl_rotation(const Frame& frame, const KlRotation& rot) {
    const int n = frame.ambient(), i = frame.dim();
    const int ne = rot.alpha_block.rows(), ell = rot.beta_block.rows();
    if (ne + ell != n) throw std::invalid_argument("apply_kl_rotation: block sizes do not sum to n");
    Matrix out(n, i);
    for (int c = 0; c < i; ++c) {
        for (int r = 0; r < ne; ++r) {
            double s = 0.0;
            for (int k = 0; k < ne; ++k) s += rot.alpha_block(r, k) * frame.columns()(k, c);
            out(r, c) = s;
        }
        for (int r = 0; r < ell; ++r) {
            double s = 0.0;
            for (int k = 0; k < ell; ++k) s += rot.beta_block(r, k) * frame.columns()(ne + k, c);
            out(ne + r, c) = s;
        }
    }
    return Frame(std::move(out));
}

// cos^2 of the angle between a unit vector and R^ell.
inline double cos2_to_rell(std::span<const double> theta, int ell) {
    const int n = static_cast<int>(theta.size());
    double t = 0.0;
    for (int r = n - ell; r < n; ++r) t += theta[r] * theta[r];
    return std::clamp(t, 0.0, 1.0);
}

// Bi-spherical assembly theta = (sqrt(1-t) u, sqrt(t) v) with u in S^{n-ell-1},
// v in S^{ell-1}.
inline std::vector<double> bispherical_point(std::span<const double> u, std::span<const double> v,
                                             double t) {
    std::vector<double> theta(u.size() + v.size());
    const double su = std::sqrt(std::max(0.0, 1.0 - t)), sv = std::sqrt(std::max(0.0, t));
    for (std::size_t r = 0; r < u.size(); ++r) theta[r] = su * u[r];
    for (std::size_t r = 0; r < v.size(); ++r) theta[u.size() + r] = sv * v[r];
    return theta;
}

} // namespace kltomo
