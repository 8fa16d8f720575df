#pragma once

// Spectral machinery for K_ell-invariant functions on S^{n-1}.
//
// The invariant functions of degree 2k form one-dimensional spaces spanned by
// q_k(t), the orthonormal polynomials of the weight t^{ell/2-1}(1-t)^{(n-ell)/2-1}
// on [0,1] (the weight of the bi-spherical measure decomposition). The
// generalized cosine transform
//
//   (M^a f)(u) = gamma_n(a) int_{S^{n-1}} f(theta) |theta . u|^{a-1} dtheta,
//   gamma_n(a) = sigma_{n-1} Gamma((1-a)/2) / (2 pi^{(n-1)/2} Gamma(a/2)),
//
// acts on each q_k by a scalar multiplier m_{2k}(a). With the measure read as
// the normalized one (see MultiplierTable::convention_note), the closed form
//
//   m_{2k}(a) = (-1)^k Gamma(k + (1-a)/2) / Gamma(k + (n-1+a)/2)
//
// satisfies m_{2k}(a) m_{2k}(2-n-a) = 1 identically. The closed form is never
// trusted blind: on first use per dimension it is matched against the direct
// quadrature oracle on (0,1) and the inversion identity, and per (n, ell) the
// basis is checked to consist of single M^a eigenspaces.

#include <cmath>
#include <map>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "grassmann.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "radon.hpp"

namespace kltomo {

class InvariantBasis {
  public:
    InvariantBasis(int n, int ell, int max_degree)
        : n_(n), ell_(ell), K_(max_degree),
          rec_(jacobi_recurrence01(max_degree + 2, 0.5 * ell - 1.0, 0.5 * (n - ell) - 1.0)) {
        if (ell < 1 || ell > n - 1) throw std::invalid_argument("InvariantBasis: bad (n, ell)");
        if (max_degree < 0) throw std::invalid_argument("InvariantBasis: max_degree >= 0");
        quad_ = gauss_jacobi01(std::max(2 * (K_ + 1), 64), 0.5 * ell - 1.0,
                               0.5 * (n - ell) - 1.0);
    }

    int n() const { return n_; }
    int ell() const { return ell_; }
    int max_degree() const { return K_; }
    const QuadRule& quad() const { return quad_; }

    // q_0(t), ..., q_K(t) by the stabilized orthonormal recurrence.
    void eval_all(double t, std::span<double> out) const {
        const int K = static_cast<int>(out.size()) - 1;
        double qm1 = 0.0;
        double q0 = 1.0 / std::sqrt(rec_.b[0]);
        if (K >= 0) out[0] = q0;
        for (int k = 0; k < K; ++k) {
            const double q1 =
                ((t - rec_.a[k]) * q0 - (k > 0 ? std::sqrt(rec_.b[k]) : 0.0) * qm1) /
                std::sqrt(rec_.b[k + 1]);
            out[k + 1] = q1;
            qm1 = q0;
            q0 = q1;
        }
    }

    double eval(int k, double t) const {
        std::vector<double> buf(static_cast<std::size_t>(k) + 1);
        eval_all(t, buf);
        return buf[k];
    }

  private:
    int n_, ell_, K_;
    JacobiRecurrence rec_;
    QuadRule quad_;
};

struct HarmonicExpansion {
    int n = 0, ell = 0;
    std::vector<double> coeffs; // c_k of f0 = sum c_k q_k

    int max_degree() const { return static_cast<int>(coeffs.size()) - 1; }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double c : coeffs) m = std::max(m, std::abs(c));
        return m;
    }

    double tail_bound(int count = 4) const {
        double m = 0.0;
        for (int k = std::max(0, max_degree() - count + 1); k <= max_degree(); ++k)
            m = std::max(m, std::abs(coeffs[k]));
        return m;
    }

    // coefficient decay flag: tail below tol * largest coefficient
    bool converged(double tol = 1e-8) const { return tail_bound() <= tol * max_abs_coeff(); }

    double dot(const HarmonicExpansion& other) const {
        const std::size_t m = std::min(coeffs.size(), other.coeffs.size());
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += coeffs[k] * other.coeffs[k];
        return s;
    }
};

inline HarmonicExpansion expand_invariant_fn(const ProfileFunction& f0,
                                             const InvariantBasis& basis) {
    const int K = basis.max_degree();
    HarmonicExpansion e;
    e.n = basis.n();
    e.ell = basis.ell();
    e.coeffs.assign(static_cast<std::size_t>(K) + 1, 0.0);
    std::vector<double> q(static_cast<std::size_t>(K) + 1);
    const QuadRule& rule = basis.quad();
    for (int j = 0; j < rule.size(); ++j) {
        basis.eval_all(rule.nodes[j], q);
        const double wf = rule.weights[j] * f0(rule.nodes[j]);
        for (int k = 0; k <= K; ++k) e.coeffs[k] += wf * q[k];
    }
    // coefficients at the quadrature roundoff floor carry no information and
    // would be amplified by growing multipliers; zero them out
    const double floor = 5e-14 * e.max_abs_coeff();
    for (double& c : e.coeffs)
        if (std::abs(c) < floor) c = 0.0;
    return e;
}

inline HarmonicExpansion expand_invariant(const Profile& f0, const InvariantBasis& basis) {
    return expand_invariant_fn([&f0](double t) { return f0(t); }, basis);
}

inline double reconstruct(const HarmonicExpansion& e, const InvariantBasis& basis, double t) {
    std::vector<double> q(e.coeffs.size());
    basis.eval_all(t, q);
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) s += e.coeffs[k] * q[k];
    return s;
}

// max |f0 - reconstruction| over an open grid; the expansion's quality report.
inline double reconstruction_error(const HarmonicExpansion& e, const InvariantBasis& basis,
                                   const ProfileFunction& f0, int grid = 256) {
    double worst = 0.0;
    for (double t : ChebyshevInterpolant::open_nodes(grid))
        worst = std::max(worst, std::abs(f0(t) - reconstruct(e, basis, t)));
    return worst;
}

// Direct-quadrature oracle for (M^a f)(u) with 0 < a < 1, in the normalized
// measure convention. The |theta.u| power is absorbed by a Jacobi rule in
// x = (theta.u)^2 along the axis u; the u-perp sphere carries a product rule
// exact up to `degree`.
inline double cosine_direct(const SphereFunction& f, std::span<const double> u, double alpha,
                            int degree = 16) {
    const int n = static_cast<int>(u.size());
    if (n < 2) throw std::invalid_argument("cosine_direct: need n >= 2");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("cosine_direct: oracle range is 0 < alpha < 1");
    Matrix ucol(n, 1);
    double norm2 = 0.0;
    for (int r = 0; r < n; ++r) {
        ucol(r, 0) = u[r];
        norm2 += u[r] * u[r];
    }
    if (std::abs(norm2 - 1.0) > 1e-10)
        throw std::invalid_argument("cosine_direct: u must be a unit vector");
    const Matrix perp = orthocomplement_basis(ucol); // n x (n-1)

    const SphereRule inner = sphere_product_rule(n - 2, degree);
    const QuadRule srule = gauss_jacobi01(std::max(degree / 2 + 2, 4), 0.5 * alpha - 1.0,
                                          0.5 * (n - 3.0));
    std::vector<double> theta(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int a = 0; a < srule.size(); ++a) {
        const double s = std::sqrt(srule.nodes[a]);
        const double c = std::sqrt(std::max(0.0, 1.0 - srule.nodes[a]));
        double hsum = 0.0;
        for (int b = 0; b < inner.size(); ++b) {
            const auto phi = inner.point(b);
            for (int r = 0; r < n; ++r) {
                double acc = s * u[r];
                for (int j = 0; j < n - 1; ++j) acc += c * perp(r, j) * phi[j];
                theta[r] = acc;
            }
            hsum += inner.w[b] * f(theta);
        }
        total += srule.weights[a] * hsum;
    }
    const double gamma = sphere_surface(n - 1) * std::tgamma(0.5 * (1.0 - alpha)) /
                         (2.0 * std::pow(kPi, 0.5 * (n - 1)) * std::tgamma(0.5 * alpha));
    return gamma * total / sphere_surface(n - 1);
}

class MultiplierTable {
  public:
    // Verified table for S^{n-1}; built once per n and cached.
    static const MultiplierTable& for_dimension(int n) {
        static std::mutex mu;
        static std::map<int, std::unique_ptr<MultiplierTable>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it == cache.end()) it = cache.emplace(n, std::unique_ptr<MultiplierTable>(new MultiplierTable(n))).first;
        return *it->second;
    }

    int dimension() const { return n_; }

    // m_{2k}(alpha) in the normalized measure convention, meromorphically
    // continued through negative Gamma arguments.
    double multiplier(int k, double alpha) const {
        check_alpha(alpha);
        const double x = k + 0.5 * (1.0 - alpha);
        const double y = k + 0.5 * (n_ - 1.0 + alpha);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        if (x > 0.0 && y > 0.0) return sign * std::exp(std::lgamma(x) - std::lgamma(y));
        auto near_pole = [](double v) { return v < 0.5 && std::abs(v - std::round(v)) < 1e-9; };
        if (near_pole(x))
            throw std::invalid_argument("MultiplierTable: alpha hits a pole of the multiplier");
        if (near_pole(y)) return 0.0; // denominator pole: the multiplier vanishes
        return sign * std::tgamma(x) / std::tgamma(y);
    }

    double m0(double alpha) const { return multiplier(0, alpha); }

    const std::string& convention_note() const { return note_; }

    void export_csv(std::ostream& os, std::span<const int> ks,
                    std::span<const double> alphas) const {
        os << "k,alpha,m\n";
        for (int k : ks)
            for (double a : alphas) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", k, a, multiplier(k, a));
                os << buf;
            }
    }

  private:
    explicit MultiplierTable(int n) : n_(n) {
        if (n < 3) throw std::invalid_argument("MultiplierTable: need n >= 3");
        verify();
    }

    static void check_alpha(double alpha) {
        if (alpha < 1.0 - 1e-9) return; // poles sit at 1, 3, 5, ...
        const double nearest_odd = 2.0 * std::round(0.5 * (alpha - 1.0)) + 1.0;
        if (std::abs(alpha - nearest_odd) < 1e-9)
            throw std::invalid_argument("MultiplierTable: alpha hits a pole (odd integer)");
    }

    // Build-time checks, all against independent routes:
    //  1. printed gamma_n(alpha) with the raw area measure gives
    //     m0(a) m0(2-n-a) = sigma_{n-1}^2, so the normalized measure is adopted;
    //     the area-measure m0 itself is matched against a 1D quadrature oracle.
    //  2. closed-form inversion m(a) m(2-n-a) = 1 for k <= 48.
    void verify() {
        std::ostringstream note;
        const double sigma = sphere_surface(n_ - 1);
        for (double a : {0.25, 0.5, 0.75}) {
            // oracle: gamma_n(a) sigma_{n-2} int_0^1 s^{a-1} (1-s^2)^{(n-3)/2} ds * 2
            const double integral = tanh_sinh01(
                [&](double s, double) {
                    return std::pow(s, a - 1.0) * std::pow(1.0 - s * s, 0.5 * (n_ - 3.0));
                },
                1e-13);
            const double gamma = sigma * std::tgamma(0.5 * (1.0 - a)) /
                                 (2.0 * std::pow(kPi, 0.5 * (n_ - 1)) * std::tgamma(0.5 * a));
            const double oracle_area = gamma * sphere_surface(n_ - 2) * 2.0 * integral;
            const double closed_area = sigma * m0(a); // area convention = sigma * normalized
            if (std::abs(oracle_area - closed_area) > 1e-9 * (1.0 + std::abs(closed_area)))
                throw NumericalError("MultiplierTable: m0 oracle mismatch at alpha=" +
                                     std::to_string(a));
            const double area_product = closed_area * sigma * m0(2.0 - n_ - a);
            if (std::abs(area_product - sigma * sigma) > 1e-8 * sigma * sigma)
                throw NumericalError("MultiplierTable: unexpected area-measure product");
        }
        note << "area-measure product m0(a) m0(2-n-a) = sigma_{n-1}^2 confirmed; "
                "transform rescaled by 1/sigma_{n-1} (normalized sphere measure), "
                "after which the product is 1";
        for (int k = 0; k <= 48; ++k) {
            for (double a : {-3.5, -1.2, 0.25, 0.5, 0.75}) {
                const double prod = multiplier(k, a) * multiplier(k, 2.0 - n_ - a);
                if (std::abs(prod - 1.0) > 1e-8)
                    throw NumericalError("MultiplierTable: inversion identity failed");
            }
        }
        note_ = note.str();
    }

    int n_;
    std::string note_;
};

// Eigenspace oracle: per (n, ell), each basis element must be mapped to a
// multiple of itself by M^a, with the ratio matching the closed form.
// Runs once per pair; throws with a diagnostic on failure.
inline void verify_invariant_eigenbasis(int n, int ell) {
    static std::mutex mu;
    static std::set<std::pair<int, int>> done;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (done.count({n, ell})) return;
    }
    const MultiplierTable& table = MultiplierTable::for_dimension(n);
    const InvariantBasis basis(n, ell, 6);
    for (int k = 0; k <= 4; ++k) {
        auto f = [&](std::span<const double> theta) {
            return basis.eval(k, cos2_to_rell(theta, ell));
        };
        for (double a : {0.25, 0.5, 0.75}) {
            for (double tu : {0.15, 0.5, 0.85}) {
                std::vector<double> u(static_cast<std::size_t>(n), 0.0);
                u[0] = std::sqrt(1.0 - tu);
                u[n - 1] = std::sqrt(tu);
                const double got = cosine_direct(f, u, a, 2 * k + 4);
                const double want = table.multiplier(k, a) * basis.eval(k, tu);
                if (std::abs(got - want) > 1e-6 * (1.0 + std::abs(want)))
                    throw NumericalError(
                        "verify_invariant_eigenbasis: oracle mismatch at n=" + std::to_string(n) +
                        " ell=" + std::to_string(ell) + " k=" + std::to_string(k));
            }
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    done.insert({n, ell});
}

// Coefficient-wise action of M^alpha.
inline HarmonicExpansion cosine_transform(const HarmonicExpansion& e, double alpha) {
    verify_invariant_eigenbasis(e.n, e.ell);
    const MultiplierTable& table = MultiplierTable::for_dimension(e.n);
    HarmonicExpansion out = e;
    for (int k = 0; k <= e.max_degree(); ++k) out.coeffs[k] *= table.multiplier(k, alpha);
    return out;
}

struct IntersectionBodyReport {
    bool is_member = false;
    double mu_min = 0.0;
    double mu_max_abs = 0.0;
    double truncation_error = 0.0; // sup of the last coefficients' contribution
    std::vector<double> ts, mu;
};

// Definition test for the class I^n_k: rho^k = M^{1-k} mu with mu >= 0.
// mu is reconstructed as M^{1+k-n}(rho^k) (multiplier inversion) on a 512-point
// open grid; membership verdict tolerates -1e-6 * max |mu|.
inline IntersectionBodyReport intersection_body_test(const Profile& rho, int n, int ell, int kth,
                                                     int K = 48) {
    if (kth < 1 || kth > n - 1)
        throw std::invalid_argument("intersection_body_test: require 1 <= k <= n-1");
    const InvariantBasis basis(n, ell, K);
    const HarmonicExpansion power =
        expand_invariant_fn([&](double t) { return std::pow(rho(t), kth); }, basis);
    const HarmonicExpansion mu = cosine_transform(power, 1.0 + kth - n);

    IntersectionBodyReport rep;
    rep.ts = ChebyshevInterpolant::open_nodes(512);
    rep.mu.resize(rep.ts.size());
    rep.mu_min = std::numeric_limits<double>::infinity();
    std::vector<double> q(static_cast<std::size_t>(K) + 1);
    for (std::size_t j = 0; j < rep.ts.size(); ++j) {
        basis.eval_all(rep.ts[j], q);
        double val = 0.0, tail = 0.0;
        for (int k = 0; k <= K; ++k) {
            const double term = mu.coeffs[k] * q[k];
            val += term;
            if (k > K - 8) tail += std::abs(term);
        }
        rep.mu[j] = val;
        rep.mu_min = std::min(rep.mu_min, val);
        rep.mu_max_abs = std::max(rep.mu_max_abs, std::abs(val));
        rep.truncation_error = std::max(rep.truncation_error, tail);
    }
    // never report an estimate below the coefficient noise floor
    rep.truncation_error = std::max(rep.truncation_error, 1e-12 * rep.mu_max_abs);
    rep.is_member = rep.mu_min >= -1e-6 * rep.mu_max_abs;
    return rep;
}

struct IntertwiningReport {
    std::vector<double> ratios;
    double c_hat = 0.0;
    double cv = 0.0; // coefficient of variation of the per-frame ratios
};

// Checks (R_i M^{1-i} f)(xi) = c (R_{n-i} f)(xi-perp) over Haar frames:
// the per-frame ratio must be a positive constant.
inline IntertwiningReport verify_intertwining(const Profile& f0, const Dims& dims, int trials,
                                              std::uint64_t seed, int K = 48,
                                              const ReducedOptions& opt = {}) {
    const int n = dims.n, i = dims.i, ell = dims.ell;
    const InvariantBasis basis(n, ell, K);
    const HarmonicExpansion transformed =
        cosine_transform(expand_invariant(f0, basis), 1.0 - i);
    auto lhs_fn = [&](double t) { return reconstruct(transformed, basis, t); };

    const Dims comp_dims(n, n - i, ell);
    IntertwiningReport rep;
    rep.ratios.reserve(static_cast<std::size_t>(trials));
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(seed, static_cast<std::uint64_t>(trial));
        const Frame xi = haar_sample_frame(dims, rng);
        const Frame perp = orthocomplement_frame(xi);
        const double lhs = radon_reduced_fn(lhs_fn, canonical_lambdas(xi, dims), dims, opt).value;
        const double rhs =
            radon_reduced(f0, canonical_lambdas(perp, comp_dims), comp_dims, opt).value;
        if (std::abs(rhs) < 1e-14) continue;
        rep.ratios.push_back(lhs / rhs);
    }
    if (rep.ratios.empty()) throw NumericalError("verify_intertwining: no usable frames");
    double mean = 0.0;
    for (double r : rep.ratios) mean += r;
    mean /= static_cast<double>(rep.ratios.size());
    double var = 0.0;
    for (double r : rep.ratios) var += square(r - mean);
    var /= static_cast<double>(rep.ratios.size());
    rep.c_hat = mean;
    rep.cv = std::sqrt(var) / std::abs(mean);
    return rep;
}

} // namespace kltomo
