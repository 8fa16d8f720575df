#pragma once

// 1D Gauss rules (Jacobi weights via Golub-Welsch), tanh-sinh for endpoint
// singularities, and product Gauss rules on spheres.

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "linalg.hpp"

namespace kltomo {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int size() const { return static_cast<int>(nodes.size()); }

    template <typename F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (int k = 0; k < size(); ++k) s += weights[k] * f(nodes[k]);
        return s;
    }
};

// Monic three-term recurrence p_{k+1} = (t - a_k) p_k - b_k p_{k-1} for the
// orthogonal polynomials of the weight t^{exp_at_zero} (1-t)^{exp_at_one} on
// [0,1] (Gautschi's Jacobi coefficients, shifted). b[0] carries the total
// weight integral.
struct JacobiRecurrence {
    std::vector<double> a, b;
};

inline JacobiRecurrence jacobi_recurrence01(int count, double exp_at_zero, double exp_at_one) {
    if (count < 1) throw std::invalid_argument("jacobi_recurrence01: count >= 1");
    if (exp_at_zero <= -1.0 || exp_at_one <= -1.0)
        throw std::invalid_argument("jacobi_recurrence01: exponents must exceed -1");
    const double a = exp_at_one;  // Jacobi alpha on [-1,1], weight (1-x)^a
    const double b = exp_at_zero; // Jacobi beta, weight (1+x)^b
    const double ab = a + b;
    JacobiRecurrence rec;
    rec.a.resize(static_cast<std::size_t>(count));
    rec.b.resize(static_cast<std::size_t>(count));
    rec.a[0] = 0.5 * (1.0 + (b - a) / (ab + 2.0));
    for (int k = 1; k < count; ++k) {
        const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        rec.a[k] = 0.5 * (1.0 + (b * b - a * a) / den);
    }
    rec.b[0] = beta_function(b + 1.0, a + 1.0);
    if (count > 1) rec.b[1] = (a + 1.0) * (b + 1.0) / (square(ab + 2.0) * (ab + 3.0));
    for (int k = 2; k < count; ++k) {
        const double t = 2.0 * k + ab;
        rec.b[k] = k * (k + a) * (k + b) * (k + ab) / (t * t * (t * t - 1.0));
    }
    return rec;
}

// Gauss rule on [0,1] for the weight t^{exp_at_zero} (1-t)^{exp_at_one};
// exact for polynomial factors of degree <= 2n-1 (Golub-Welsch).
inline QuadRule gauss_jacobi01(int n, double exp_at_zero, double exp_at_one) {
    const JacobiRecurrence rec = jacobi_recurrence01(n, exp_at_zero, exp_at_one);
    std::vector<double> diag = rec.a;
    std::vector<double> sub(static_cast<std::size_t>(n > 1 ? n - 1 : 0));
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(rec.b[k]);
    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    z[0] = 1.0;
    tridiagonal_eigen(diag, sub, z);
    QuadRule rule;
    rule.nodes = std::move(diag);
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) rule.weights[k] = rec.b[0] * z[k] * z[k];
    return rule;
}

inline QuadRule gauss_legendre01(int n) { return gauss_jacobi01(n, 0.0, 0.0); }

// Rule for int_{-1}^{1} (1-x^2)^c F(x) dx (Gegenbauer weight), c > -1.
inline QuadRule gauss_gegenbauer(int n, double c) {
    QuadRule q = gauss_jacobi01(n, c, c);
    const double scale = std::pow(2.0, 2.0 * c + 1.0);
    for (int k = 0; k < q.size(); ++k) {
        q.nodes[k] = 2.0 * q.nodes[k] - 1.0;
        q.weights[k] *= scale;
    }
    return q;
}

// Gauss-Chebyshev on [0,1]: weight 1/sqrt(t(1-t)), all weights pi/n.
inline QuadRule gauss_chebyshev01(int n) {
    QuadRule q;
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.assign(static_cast<std::size_t>(n), kPi / n);
    for (int k = 0; k < n; ++k)
        q.nodes[k] = 0.5 * (1.0 + std::cos((2.0 * k + 1.0) * kPi / (2.0 * n)));
    return q;
}

// tanh-sinh quadrature of f over (0,1). The integrand is called as
// f(t, 1-t) with both arguments accurate near the endpoints, so algebraic
// or logarithmic endpoint singularities integrate at full precision.
template <typename F>
double tanh_sinh01(F&& f, double rel_tol = 1e-12, int max_level = 11, double clip = 1e-290) {
    const double tau_max = 6.8;
    auto add_node = [&](double tau, double& acc) {
        const double st = 0.5 * kPi * std::sinh(std::abs(tau));
        const double x_small = 1.0 / (1.0 + std::exp(2.0 * st)); // distance to nearer endpoint
        if (x_small < clip) return;
        const double sech = 2.0 * std::exp(-st) / (1.0 + std::exp(-2.0 * st));
        const double w = 0.25 * kPi * std::cosh(tau) * sech * sech;
        if (tau >= 0.0)
            acc += w * f(1.0 - x_small, x_small);
        else
            acc += w * f(x_small, 1.0 - x_small);
    };

    double h = 1.0;
    double sum = 0.0;
    add_node(0.0, sum);
    for (double tau = h; tau <= tau_max; tau += h) {
        add_node(tau, sum);
        add_node(-tau, sum);
    }
    double prev = sum * h;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (double tau = h; tau <= tau_max; tau += 2.0 * h) {
            add_node(tau, sum);
            add_node(-tau, sum);
        }
        const double cur = sum * h;
        if (level >= 3 && std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

// Product Gauss rule on the unit sphere S^dim in R^{dim+1}. Weights sum to
// sigma_dim and the rule is exact for polynomials of degree <= degree
// (Gauss-Gegenbauer in each cosine, uniform points on the base circle).
struct SphereRule {
    int dim = 0;
    std::vector<double> pts; // row k holds point k, stride dim+1
    std::vector<double> w;

    int size() const { return static_cast<int>(w.size()); }
    std::span<const double> point(int k) const {
        return {pts.data() + static_cast<std::size_t>(k) * (dim + 1),
                static_cast<std::size_t>(dim + 1)};
    }
};

inline SphereRule sphere_product_rule(int dim, int degree) {
    if (dim < 0) throw std::invalid_argument("sphere_product_rule: negative dimension");
    if (degree < 1) degree = 1;
    SphereRule rule;
    rule.dim = dim;
    if (dim == 0) {
        rule.pts = {1.0, -1.0};
        rule.w = {1.0, 1.0};
        return rule;
    }
    if (dim == 1) {
        const int m = degree + 1;
        rule.pts.resize(2 * static_cast<std::size_t>(m));
        rule.w.assign(static_cast<std::size_t>(m), 2.0 * kPi / m);
        for (int j = 0; j < m; ++j) {
            const double phi = 2.0 * kPi * (j + 0.5) / m;
            rule.pts[2 * static_cast<std::size_t>(j)] = std::cos(phi);
            rule.pts[2 * static_cast<std::size_t>(j) + 1] = std::sin(phi);
        }
        return rule;
    }
    const SphereRule sub = sphere_product_rule(dim - 1, degree);
    const int m = (degree + 2) / 2;
    const QuadRule cosrule = gauss_gegenbauer(m, 0.5 * (dim - 2));
    const int total = cosrule.size() * sub.size();
    rule.pts.resize(static_cast<std::size_t>(total) * (dim + 1));
    rule.w.resize(static_cast<std::size_t>(total));
    int out = 0;
    for (int a = 0; a < cosrule.size(); ++a) {
        const double u = cosrule.nodes[a];
        const double r = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (int b = 0; b < sub.size(); ++b) {
            double* p = rule.pts.data() + static_cast<std::size_t>(out) * (dim + 1);
            p[0] = u;
            const auto q = sub.point(b);
            for (int c = 0; c <= dim - 1; ++c) p[c + 1] = r * q[c];
            rule.w[out] = cosrule.weights[a] * sub.w[b];
            ++out;
        }
    }
    return rule;
}

// Order-independent pairwise sum; used so that parallel reductions match the
// sequential result bit for bit.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

} // namespace kltomo
