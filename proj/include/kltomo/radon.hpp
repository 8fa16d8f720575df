#pragma once

// Spherical Radon transform R_i and its dual, normalized so that
// R_i 1 = sigma_{i-1} and R_i^* 1 = 1. Direct evaluation integrates over
// S^{n-1} cap xi; for K_ell-invariant f the transform collapses to the
// low-dimensional formulas
//
//   i <= ell:  (R_i f)(xi) = int_{S^{i-1}} f0(v' L v) dv
//   i  > ell:  (R_i f)(xi) = (sigma_{i-ell-1}/2) int_{S^{ell-1}} (v'Lv)^{1-i/2}
//                  int_0^{v'Lv} t^{ell/2-1} (v'Lv - t)^{(i-ell)/2-1} f0(t) dt dv
//
// where L = diag of the canonical-angle spectrum. The singular inner integral
// is evaluated after t = s w, which turns it into a fixed Jacobi-weight
// integral of f0(s w); the prefactor s^{1-i/2} cancels identically, so the
// s -> 0 corner needs no special casing.

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "grassmann.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "star_body.hpp"

namespace kltomo {

enum class RadonMethod { DirectMc, DirectQuadrature, Reduced };

struct RadonResult {
    double value = 0.0;
    RadonMethod method = RadonMethod::Reduced;
    double error_estimate = 0.0;
};

using SphereFunction = std::function<double(std::span<const double>)>;
using ProfileFunction = std::function<double(double)>;

struct ReducedOptions {
    int inner_nodes = 64;        // Jacobi nodes for the inner integral, doubled until settled
    double inner_rel_tol = 1e-11;
    int max_inner_nodes = 1024;
    int outer_degree = 64;       // circle points / sphere-rule degree for ell <= 3 or i <= 4
    long mc_samples = 1 << 15;   // fallback Monte-Carlo size for high-dimensional outers
    std::uint64_t seed = 1;
};

// ---------------------------------------------------------------------------
// direct transforms

// Product-quadrature evaluation of (R_i f)(span tau); exact for polynomial f
// up to the requested degree. Antithetic +/- pairing kills odd parts exactly.
inline RadonResult radon_direct_quadrature(const SphereFunction& f, const Frame& frame,
                                           int degree = 32) {
    const int i = frame.dim();
    const SphereRule rule = sphere_product_rule(i - 1, degree);
    double acc = 0.0;
    std::vector<double> neg(static_cast<std::size_t>(frame.ambient()));
    for (int k = 0; k < rule.size(); ++k) {
        const auto theta = frame.embed(rule.point(k));
        for (std::size_t r = 0; r < theta.size(); ++r) neg[r] = -theta[r];
        acc += rule.w[k] * 0.5 * (f(theta) + f(neg));
    }
    return {acc, RadonMethod::DirectQuadrature, 0.0};
}

inline RadonResult radon_direct_mc(const SphereFunction& f, const Frame& frame, long samples,
                                   std::uint64_t seed) {
    const int i = frame.dim();
    Rng rng(seed);
    double s = 0.0, s2 = 0.0;
    std::vector<double> neg(static_cast<std::size_t>(frame.ambient()));
    for (long k = 0; k < samples; ++k) {
        const auto eta = rng.unit_vector(i);
        const auto theta = frame.embed(eta);
        for (std::size_t r = 0; r < theta.size(); ++r) neg[r] = -theta[r];
        const double v = 0.5 * (f(theta) + f(neg));
        s += v;
        s2 += v * v;
    }
    const double mean = s / samples;
    const double var = std::max(0.0, s2 / samples - mean * mean);
    const double sigma = sphere_surface(i - 1);
    return {sigma * mean, RadonMethod::DirectMc, sigma * std::sqrt(var / samples)};
}

// (R_i^* phi)(theta): average of phi over Haar frames [theta | W], W an
// (i-1)-frame in theta-perp. theta is canonicalized so antipodal inputs sample
// identical frames.
inline McEstimate dual_radon_direct(const std::function<double(const Frame&)>& phi,
                                    std::vector<double> theta, const Dims& dims, long samples,
                                    std::uint64_t seed) {
    const int n = dims.n, i = dims.i;
    if (static_cast<int>(theta.size()) != n)
        throw std::invalid_argument("dual_radon_direct: theta has wrong dimension");
    double norm2 = 0.0;
    for (double x : theta) norm2 += x * x;
    if (std::abs(norm2 - 1.0) > 1e-8)
        throw std::invalid_argument("dual_radon_direct: theta must be a unit vector");
    for (double x : theta) {
        if (x > 1e-14) break;
        if (x < -1e-14) {
            for (double& y : theta) y = -y;
            break;
        }
    }
    Matrix th(n, 1);
    for (int r = 0; r < n; ++r) th(r, 0) = theta[r];
    const Matrix basis = orthocomplement_basis(th); // n x (n-1)

    double s = 0.0, s2 = 0.0;
    for (long k = 0; k < samples; ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        Matrix cols(n, i);
        for (int r = 0; r < n; ++r) cols(r, 0) = theta[r];
        if (i > 1) {
            Matrix coef(n - 1, i - 1);
            for (int r = 0; r < n - 1; ++r)
                for (int c = 0; c < i - 1; ++c) coef(r, c) = rng.normal();
            modified_gram_schmidt(coef);
            for (int c = 0; c < i - 1; ++c)
                for (int r = 0; r < n; ++r) {
                    double acc = 0.0;
                    for (int j = 0; j < n - 1; ++j) acc += basis(r, j) * coef(j, c);
                    cols(r, c + 1) = acc;
                }
        }
        const double v = phi(Frame(std::move(cols)));
        s += v;
        s2 += v * v;
    }
    const double mean = s / samples;
    const double var = std::max(0.0, s2 / samples - mean * mean);
    return {mean, std::sqrt(var / samples)};
}

// ---------------------------------------------------------------------------
// reduced transforms

namespace detail {

// G(s) = int_0^1 w^{ell/2-1} (1-w)^{(i-ell)/2-1} f0(s w) dw evaluated at many
// s values with one shared rule.
struct InnerIntegral {
    QuadRule rule;
    double operator()(const ProfileFunction& f0, double s) const {
        double acc = 0.0;
        for (int k = 0; k < rule.size(); ++k) acc += rule.weights[k] * f0(s * rule.nodes[k]);
        return acc;
    }
};

template <typename OuterEval>
RadonResult settle_inner(const Dims& dims, const ProfileFunction& f0, const ReducedOptions& opt,
                         OuterEval&& outer) {
    const double e0 = 0.5 * dims.ell - 1.0, e1 = 0.5 * (dims.i - dims.ell) - 1.0;
    double prev = 0.0;
    bool have_prev = false;
    for (int nodes = opt.inner_nodes; nodes <= opt.max_inner_nodes; nodes *= 2) {
        InnerIntegral inner{gauss_jacobi01(nodes, e0, e1)};
        const double cur = outer([&](double s) { return inner(f0, s); });
        if (have_prev && std::abs(cur - prev) <= opt.inner_rel_tol * (1.0 + std::abs(cur)))
            return {cur, RadonMethod::Reduced, std::abs(cur - prev)};
        prev = cur;
        have_prev = true;
    }
    throw NonConvergence("radon_reduced: inner integral did not settle");
}

} // namespace detail

// (R_i f)(xi) for K_ell-invariant f given by the one-variable function f0 and
// the canonical spectrum of xi.
inline RadonResult radon_reduced_fn(const ProfileFunction& f0, const CanonicalSpectrum& spectrum,
                                    const Dims& dims, const ReducedOptions& opt = {}) {
    const int i = dims.i, ell = dims.ell;
    if (spectrum.size() != dims.m())
        throw std::invalid_argument("radon_reduced: spectrum length must equal min(i, ell)");
    for (double l : spectrum.lambdas)
        if (l < -1e-12 || l > 1.0 + 1e-12)
            throw std::invalid_argument("radon_reduced: spectrum entries must lie in [0,1]");

    if (i <= ell) {
        // int_{S^{i-1}} f0(sum lambda_j v_j^2) dv
        auto eval_svv = [&](std::span<const double> v) {
            double s = 0.0;
            for (int j = 0; j < i; ++j) s += spectrum.lambdas[j] * v[j] * v[j];
            return f0(std::clamp(s, 0.0, 1.0));
        };
        if (i <= 4) {
            const SphereRule r1 = sphere_product_rule(i - 1, opt.outer_degree);
            const SphereRule r2 = sphere_product_rule(i - 1, opt.outer_degree + 17);
            double a = 0.0, b = 0.0;
            for (int k = 0; k < r1.size(); ++k) a += r1.w[k] * eval_svv(r1.point(k));
            for (int k = 0; k < r2.size(); ++k) b += r2.w[k] * eval_svv(r2.point(k));
            return {b, RadonMethod::Reduced, std::abs(a - b)};
        }
        Rng rng(opt.seed);
        double s = 0.0, s2 = 0.0;
        for (long k = 0; k < opt.mc_samples; ++k) {
            const auto v = rng.unit_vector(i);
            const double w = eval_svv(v);
            s += w;
            s2 += w * w;
        }
        const double mean = s / opt.mc_samples;
        const double var = std::max(0.0, s2 / opt.mc_samples - mean * mean);
        const double sigma = sphere_surface(i - 1);
        return {sigma * mean, RadonMethod::Reduced, sigma * std::sqrt(var / opt.mc_samples)};
    }

    // i > ell
    const double front = 0.5 * sphere_surface(i - ell - 1);
    const auto& lam = spectrum.lambdas;
    if (ell == 1) {
        return detail::settle_inner(dims, f0, opt, [&](auto&& G) { return 2.0 * front * G(lam[0]); });
    }
    if (ell == 2) {
        int mpts = opt.outer_degree + 1;
        if (mpts % 2) ++mpts;
        const int m = mpts;
        return detail::settle_inner(dims, f0, opt, [&](auto&& G) {
            double acc = 0.0;
            for (int j = 0; j < m; ++j) {
                const double phi = 2.0 * kPi * (j + 0.5) / m;
                const double s = lam[0] * square(std::cos(phi)) + lam[1] * square(std::sin(phi));
                acc += G(std::clamp(s, 0.0, 1.0));
            }
            return front * acc * 2.0 * kPi / m;
        });
    }
    if (ell == 3) {
        const SphereRule rule = sphere_product_rule(2, opt.outer_degree);
        return detail::settle_inner(dims, f0, opt, [&](auto&& G) {
            double acc = 0.0;
            for (int k = 0; k < rule.size(); ++k) {
                const auto v = rule.point(k);
                const double s = lam[0] * v[0] * v[0] + lam[1] * v[1] * v[1] + lam[2] * v[2] * v[2];
                acc += rule.w[k] * G(std::clamp(s, 0.0, 1.0));
            }
            return front * acc;
        });
    }
    // ell >= 4: Monte-Carlo outer
    Rng rng(opt.seed);
    std::vector<double> svals(static_cast<std::size_t>(opt.mc_samples));
    for (long k = 0; k < opt.mc_samples; ++k) {
        const auto v = rng.unit_vector(ell);
        double s = 0.0;
        for (int j = 0; j < ell; ++j) s += lam[j] * v[j] * v[j];
        svals[k] = std::clamp(s, 0.0, 1.0);
    }
    const double sigma_ell = sphere_surface(ell - 1);
    return detail::settle_inner(dims, f0, opt, [&](auto&& G) {
        double acc = 0.0;
        for (double s : svals) acc += G(s);
        return front * sigma_ell * acc / opt.mc_samples;
    });
}

inline RadonResult radon_reduced(const Profile& f0, const CanonicalSpectrum& spectrum,
                                 const Dims& dims, const ReducedOptions& opt = {}) {
    return radon_reduced_fn([&f0](double t) { return f0(t); }, spectrum, dims, opt);
}

// Equal-angle form of the reduced transform:
//   i <= ell: F(lambda) = sigma_{i-1} f0(lambda)
//   i  > ell: F(lambda) = c1 int_0^1 w^{ell/2-1} (1-w)^{(i-ell)/2-1} f0(lambda w) dw,
//             c1 = sigma_{i-ell-1} sigma_{ell-1} / 2.
inline RadonResult radon_equal_angle_fn(const ProfileFunction& f0, double lambda, const Dims& dims,
                                        const ReducedOptions& opt = {}) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("radon_equal_angle: lambda must lie in [0,1]");
    if (lambda > 0.0 && lambda < 1.0 && dims.i > dims.n - dims.ell)
        throw std::invalid_argument(
            "radon_equal_angle: 0 < lambda < 1 requires i <= n-ell (forced intersection)");
    if (dims.i <= dims.ell)
        return {sphere_surface(dims.i - 1) * f0(lambda), RadonMethod::Reduced, 0.0};
    const double c1 = 0.5 * sphere_surface(dims.i - dims.ell - 1) * sphere_surface(dims.ell - 1);
    return detail::settle_inner(dims, f0, opt, [&](auto&& G) { return c1 * G(lambda); });
}

inline RadonResult radon_equal_angle(const Profile& f0, double lambda, const Dims& dims,
                                     const ReducedOptions& opt = {}) {
    return radon_equal_angle_fn([&f0](double t) { return f0(t); }, lambda, dims, opt);
}

// ---------------------------------------------------------------------------
// section volumes: vol_i(B cap xi) = (R_i rho_B^i)(xi) / i

inline RadonResult section_volume_profile(const Profile& rho, const CanonicalSpectrum& spectrum,
                                          const Dims& dims, const ReducedOptions& opt = {}) {
    const int i = dims.i;
    RadonResult r = radon_reduced_fn([&rho, i](double t) { return std::pow(rho(t), i); }, spectrum,
                                     dims, opt);
    r.value /= i;
    r.error_estimate /= i;
    return r;
}

inline RadonResult section_volume_equal_angle(const Profile& rho, double lambda, const Dims& dims,
                                              const ReducedOptions& opt = {}) {
    const int i = dims.i;
    RadonResult r = radon_equal_angle_fn([&rho, i](double t) { return std::pow(rho(t), i); },
                                         lambda, dims, opt);
    r.value /= i;
    r.error_estimate /= i;
    return r;
}

inline RadonResult section_volume_body_mc(const StarBody& b, const Frame& frame, long samples,
                                          std::uint64_t seed) {
    const int i = frame.dim();
    RadonResult r = radon_direct_mc(
        [&](std::span<const double> th) { return std::pow(b.radial(th), i); }, frame, samples,
        seed);
    r.value /= i;
    r.error_estimate /= i;
    return r;
}

inline RadonResult section_volume_body_quadrature(const StarBody& b, const Frame& frame,
                                                  int degree = 32) {
    const int i = frame.dim();
    RadonResult r = radon_direct_quadrature(
        [&](std::span<const double> th) { return std::pow(b.radial(th), i); }, frame, degree);
    r.value /= i;
    r.error_estimate /= i;
    return r;
}

} // namespace kltomo
