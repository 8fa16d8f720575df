#pragma once

// One-dimensional Abel machinery for the equal-angle Radon transform:
// I+ (the transform itself, shared with radon_equal_angle), its dual I-,
// the right-sided Riemann-Liouville integral, and the solver for the
// weight g with (1-t)^{(n-ell)/2-1} rho^{n-i} = I^alpha g at alpha in {1/2, 1}.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "chebyshev.hpp"
#include "constants.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "radon.hpp"

namespace kltomo {

struct AbelParams {
    Dims dims;

    explicit AbelParams(const Dims& d) : dims(d) {
        if (!(d.ell < d.i && d.i <= d.n - d.ell))
            throw std::invalid_argument("AbelParams: require ell < i <= n - ell");
    }

    double alpha() const { return 0.5 * (dims.i - dims.ell); }
    double c1() const {
        return 0.5 * sphere_surface(dims.i - dims.ell - 1) * sphere_surface(dims.ell - 1);
    }
};

// (I+ f)(lambda): the i > ell equal-angle Radon transform,
//   c1 lambda^{1-i/2} int_0^lambda t^{ell/2-1} (lambda-t)^{alpha-1} f(t) dt.
inline double i_plus_fn(const ProfileFunction& f, double lambda, const AbelParams& p,
                        const ReducedOptions& opt = {}) {
    return radon_equal_angle_fn(f, lambda, p.dims, opt).value;
}

inline double i_plus(const Profile& f, double lambda, const AbelParams& p,
                     const ReducedOptions& opt = {}) {
    return i_plus_fn([&f](double t) { return f(t); }, lambda, p, opt);
}

namespace detail {

// J(t) = int_t^1 (lam-t)^{alpha-1} lam^{1-i/2} psi(lam) dlam.
// For small t the factor lam^{1-i/2} is steep near lam = t, so the range is
// split at 2t: a Jacobi rule absorbs (lam-t)^{alpha-1} on [t,2t] and a
// composite Gauss rule in log(lam) covers [2t,1]. For t > 1/3 a single
// Jacobi rule suffices.
inline double abel_dual_core(const ProfileFunction& psi, double t, double alpha, double ihalf,
                             int nodes) {
    if (t >= 1.0) return 0.0;
    if (t > 1.0 / 3.0) {
        const QuadRule r = gauss_jacobi01(nodes, alpha - 1.0, 0.0);
        double acc = 0.0;
        for (int k = 0; k < r.size(); ++k) {
            const double lam = t + (1.0 - t) * r.nodes[k];
            acc += r.weights[k] * std::pow(lam, 1.0 - ihalf) * psi(lam);
        }
        return std::pow(1.0 - t, alpha) * acc;
    }
    // piece A: lam = t (1 + x), x in [0,1]
    const QuadRule ra = gauss_jacobi01(nodes, alpha - 1.0, 0.0);
    double acc_a = 0.0;
    for (int k = 0; k < ra.size(); ++k) {
        const double x = ra.nodes[k];
        acc_a += ra.weights[k] * std::pow(1.0 + x, 1.0 - ihalf) * psi(t * (1.0 + x));
    }
    acc_a *= std::exp((alpha + 1.0 - ihalf) * std::log(t));
    // piece B: lam = e^u on [2t, 1], evaluated in log scale to dodge overflow
    const double u_lo = std::log(2.0 * t);
    const int chunks = std::max(1, static_cast<int>(std::ceil(-u_lo / 6.0)));
    const QuadRule rb = gauss_legendre01(nodes);
    double acc_b = 0.0;
    for (int c = 0; c < chunks; ++c) {
        const double a = u_lo + (-u_lo) * c / chunks;
        const double b = u_lo + (-u_lo) * (c + 1) / chunks;
        double part = 0.0;
        for (int k = 0; k < rb.size(); ++k) {
            const double u = a + (b - a) * rb.nodes[k];
            const double lam = std::exp(u);
            const double logval = (alpha - 1.0) * std::log(lam - t) + (2.0 - ihalf) * u;
            part += rb.weights[k] * std::exp(logval) * psi(lam);
        }
        acc_b += part * (b - a);
    }
    return acc_a + acc_b;
}

} // namespace detail

// Dual Abel operator (I- psi)(t) = c1 t^{ell/2-1} int_t^1 (lam-t)^{alpha-1}
// lam^{1-i/2} psi(lam) dlam, with node doubling until 1e-11 relative change.
inline double i_minus(const ProfileFunction& psi, double t, const AbelParams& p,
                      int base_nodes = 48, double rel_tol = 1e-11) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("i_minus: t must lie in (0,1)");
    const double alpha = p.alpha();
    const double ihalf = 0.5 * p.dims.i;
    double prev = 0.0;
    bool have = false;
    for (int nodes = base_nodes; nodes <= 24 * base_nodes; nodes *= 2) {
        const double cur = detail::abel_dual_core(psi, t, alpha, ihalf, nodes);
        if (have && std::abs(cur - prev) <= rel_tol * (1.0 + std::abs(cur)))
            return p.c1() * std::pow(t, 0.5 * p.dims.ell - 1.0) * cur;
        prev = cur;
        have = true;
    }
    throw NonConvergence("i_minus: quadrature did not settle");
}

// Right-sided Riemann-Liouville integral
//   (I^alpha g)(t) = (1/Gamma(alpha)) int_t^1 g(lam) (lam-t)^{alpha-1} dlam
//                  = ((1-t)^alpha / Gamma(alpha)) int_0^1 x^{alpha-1} g(t + (1-t) x) dx,
// evaluated by tanh-sinh so that endpoint behavior of g at lam = 1 (as in the
// solved weights g below) costs no accuracy.
inline double rl_integral(const ProfileFunction& g, double t, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("rl_integral: require alpha > 0");
    if (t < 0.0 || t >= 1.0) throw std::invalid_argument("rl_integral: t must lie in [0,1)");
    const double front = std::pow(1.0 - t, alpha) / std::tgamma(alpha);
    const double inner = tanh_sinh01(
        [&](double x, double) { return std::pow(x, alpha - 1.0) * g(t + (1.0 - t) * x); }, 1e-12,
        11, 1e-30);
    return front * inner;
}

struct SolvedG {
    std::vector<double> ts;     // open Chebyshev points in (0,1)
    std::vector<double> values; // g at ts
    std::function<double(double)> eval;
    double min_value = 0.0;
    double max_abs = 0.0;
};

// Solves (1-t)^{(n-ell)/2-1} rho^{n-i}(t) = (I^alpha g)(t) for the two cases
// the Busemann-Petty argument needs.
//
// i = ell+2 (alpha = 1):  g = -d/dt [ (1-t)^q rho^{n-i}(t) ],  q = (n-i)/2.
// The smooth factor rho^{n-i} is Chebyshev-interpolated and differentiated
// spectrally; the algebraic prefactor is differentiated exactly:
//   g(t) = (1-t)^{q-1} [ q R(t) - (1-t) R'(t) ].
//
// i = ell+1 (alpha = 1/2): with r(s) = s^{1/2} rho(1-s) and p = 1-t,
//   g(t) = (1/sqrt(pi)) d/dp int_0^1 r^{n-i}(p eta) / sqrt(eta (1-eta)) deta
//        = (1/sqrt(pi)) [ q p^{q-1} H(p) + p^q H'(p) ],
// where H(p) = int_0^1 eta^{(n-i-1)/2} (1-eta)^{-1/2} rho^{n-i}(1-p eta) deta
// carries the smooth part (fixed Jacobi rule, Chebyshev in p).
inline SolvedG solve_g(const Profile& rho, const AbelParams& params, int cheb_degree = 128,
                       int grid = 512) {
    const int n = params.dims.n, i = params.dims.i, ell = params.dims.ell;
    if (i != ell + 1 && i != ell + 2)
        throw std::invalid_argument("solve_g: only i = ell+1 and i = ell+2 are solvable here");
    const int ni = n - i;
    const double q = 0.5 * ni;

    std::function<double(double)> eval;
    if (i == ell + 2) {
        const auto R = ChebyshevInterpolant::fit(
            [&](double t) { return std::pow(rho(t), ni); }, cheb_degree);
        const auto Rp = R.derivative();
        eval = [R, Rp, q](double t) {
            return std::pow(1.0 - t, q - 1.0) * (q * R(t) - (1.0 - t) * Rp(t));
        };
    } else {
        const QuadRule eta = gauss_jacobi01(96, 0.5 * (ni - 1), -0.5);
        const auto H = ChebyshevInterpolant::fit(
            [&](double p) {
                double acc = 0.0;
                for (int k = 0; k < eta.size(); ++k)
                    acc += eta.weights[k] * std::pow(rho(1.0 - p * eta.nodes[k]), ni);
                return acc;
            },
            cheb_degree);
        const auto Hp = H.derivative();
        const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
        eval = [H, Hp, q, inv_sqrt_pi](double t) {
            const double p = 1.0 - t;
            return inv_sqrt_pi *
                   (q * std::pow(p, q - 1.0) * H(p) + std::pow(p, q) * Hp(p));
        };
    }

    SolvedG out;
    out.ts = ChebyshevInterpolant::open_nodes(grid);
    out.values.resize(out.ts.size());
    out.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < out.ts.size(); ++k) {
        out.values[k] = eval(out.ts[k]);
        out.min_value = std::min(out.min_value, out.values[k]);
        out.max_abs = std::max(out.max_abs, std::abs(out.values[k]));
    }
    out.eval = std::move(eval);
    return out;
}

struct AbelDualityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_residual = 0.0;
};

// int_0^1 (I+ f)(lam) psi(lam) dlam  vs  int_0^1 f(t) (I- psi)(t) dt.
// Both outer integrals run through tanh-sinh; the right side carries the
// t^{ell/2-1} endpoint singularity of I-.
inline AbelDualityCheck abel_duality_check(const ProfileFunction& f, const ProfileFunction& psi,
                                           const AbelParams& p) {
    ReducedOptions opt;
    opt.inner_rel_tol = 1e-12;
    AbelDualityCheck out;
    out.lhs = tanh_sinh01([&](double lam, double) { return i_plus_fn(f, lam, p, opt) * psi(lam); },
                          1e-12, 11, 1e-30);
    // near t = 1 the node collapses onto the endpoint in double precision;
    // the integrand vanishes there like (1-t)^alpha
    out.rhs = tanh_sinh01(
        [&](double t, double) { return t < 1.0 ? f(t) * i_minus(psi, t, p) : 0.0; }, 1e-12, 11,
        1e-30);
    out.rel_residual = std::abs(out.lhs - out.rhs) / (1.0 + std::max(std::abs(out.lhs), std::abs(out.rhs)));
    return out;
}

} // namespace kltomo
