#pragma once

// Origin-symmetric star bodies: general radial evaluators and profile-backed
// K_ell-symmetric bodies, with volume computation (weighted quadrature and
// Monte-Carlo), the planar profile convexity test, and K_ell-symmetrization.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "grassmann.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

namespace kltomo {

using RadialEvaluator = std::function<double(std::span<const double>)>;

class StarBody {
  public:
    static StarBody from_profile(int n, int ell, Profile p) {
        if (ell < 1 || ell > n - 1) throw std::invalid_argument("StarBody: bad ell");
        StarBody b;
        b.n_ = n;
        b.ell_ = ell;
        b.profile_ = std::move(p);
        const Profile& prof = *b.profile_;
        b.rho_ = [prof, ell](std::span<const double> theta) {
            return prof(cos2_to_rell(theta, ell));
        };
        return b;
    }

    static StarBody ql_ball(int n, int ell, double q) {
        return from_profile(n, ell, Profile::ql_ball(q));
    }

    // General closed-form evaluator; evenness and positivity are sampled.
    static StarBody from_evaluator(int n, RadialEvaluator rho, std::uint64_t check_seed = 12345) {
        StarBody b;
        b.n_ = n;
        b.rho_ = std::move(rho);
        b.check(check_seed);
        return b;
    }

    // rho(theta) * (1 + sum_j coeffs[j] theta_j^2)^{1/2}; keeps evenness.
    StarBody perturbed(std::vector<double> coeffs) const {
        if (static_cast<int>(coeffs.size()) != n_)
            throw std::invalid_argument("StarBody::perturbed: need one coefficient per axis");
        const RadialEvaluator base = rho_;
        StarBody b;
        b.n_ = n_;
        b.rho_ = [base, coeffs](std::span<const double> theta) {
            double s = 1.0;
            for (std::size_t j = 0; j < coeffs.size(); ++j) s += coeffs[j] * theta[j] * theta[j];
            return base(theta) * std::sqrt(s);
        };
        b.check(777);
        return b;
    }

    StarBody scaled(double c) const {
        if (!(c > 0.0)) throw std::invalid_argument("StarBody::scaled: require c > 0");
        StarBody b;
        b.n_ = n_;
        b.ell_ = ell_;
        const RadialEvaluator base = rho_;
        b.rho_ = [base, c](std::span<const double> theta) { return c * base(theta); };
        if (profile_) {
            const Profile p = *profile_;
            b.profile_ = Profile::closed_form([p, c](double t) { return c * p(t); });
        }
        return b;
    }

    // Body rotated by a K_ell element: rho_rot(theta) = rho(gamma' theta).
    StarBody rotated(const KlRotation& rot) const {
        const int ne = rot.alpha_block.rows(), ell = rot.beta_block.rows();
        if (ne + ell != n_) throw std::invalid_argument("StarBody::rotated: block mismatch");
        const RadialEvaluator base = rho_;
        const Matrix at = transpose(rot.alpha_block), bt = transpose(rot.beta_block);
        StarBody b;
        b.n_ = n_;
        b.rho_ = [base, at, bt, ne, ell](std::span<const double> theta) {
            std::vector<double> y(theta.size());
            for (int r = 0; r < ne; ++r) {
                double s = 0.0;
                for (int k = 0; k < ne; ++k) s += at(r, k) * theta[k];
                y[r] = s;
            }
            for (int r = 0; r < ell; ++r) {
                double s = 0.0;
                for (int k = 0; k < ell; ++k) s += bt(r, k) * theta[ne + k];
                y[ne + r] = s;
            }
            return base(y);
        };
        return b;
    }

    double radial(std::span<const double> theta) const { return rho_(theta); }
    int ambient() const { return n_; }
    const std::optional<Profile>& profile() const { return profile_; }
    std::optional<int> symmetry_ell() const { return ell_; }

  private:
    void check(std::uint64_t seed) const {
        Rng rng(seed);
        for (int k = 0; k < 10000; ++k) {
            const auto theta = rng.unit_vector(n_);
            const double v = rho_(theta);
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("StarBody: radial evaluator not positive");
            if (k < 256) {
                std::vector<double> neg(theta);
                for (double& x : neg) x = -x;
                if (std::abs(rho_(neg) - v) > 1e-12 * (1.0 + std::abs(v)))
                    throw std::invalid_argument("StarBody: radial evaluator not even");
            }
        }
    }

    int n_ = 0;
    std::optional<int> ell_;
    std::optional<Profile> profile_;
    RadialEvaluator rho_;
};

namespace detail {

// int_0^1 t^{ell/2-1} (1-t)^{(n-ell)/2-1} f(t) dt for a grid-backed f:
// composite Gauss aligned to the interpolation cells, with the singular
// endpoint factors absorbed by Jacobi rules on the first and last cell.
template <typename F>
double weighted_integral_composite(F&& f, double e0, double e1, const std::vector<double>& grid,
                                   int pts_per_cell) {
    const QuadRule mid = gauss_legendre01(pts_per_cell);
    const QuadRule left = gauss_jacobi01(pts_per_cell, e0, 0.0);
    const QuadRule right = gauss_jacobi01(pts_per_cell, 0.0, e1);
    double total = 0.0;
    for (std::size_t c = 0; c + 1 < grid.size(); ++c) {
        const double a = grid[c], b = grid[c + 1], h = b - a;
        if (h <= 0.0) continue;
        double cell = 0.0;
        if (c == 0 && a == 0.0) {
            // t = h tau, weight t^{e0} handled by the rule; keep (1-t)^{e1} explicit
            for (int k = 0; k < left.size(); ++k) {
                const double t = h * left.nodes[k];
                cell += left.weights[k] * std::pow(1.0 - t, e1) * f(t);
            }
            cell *= std::pow(h, e0 + 1.0);
        } else if (c + 2 == grid.size() && b == 1.0) {
            for (int k = 0; k < right.size(); ++k) {
                const double t = a + h * right.nodes[k];
                cell += right.weights[k] * std::pow(t, e0) * f(t);
            }
            cell *= std::pow(h, e1 + 1.0);
        } else {
            for (int k = 0; k < mid.size(); ++k) {
                const double t = a + h * mid.nodes[k];
                cell += mid.weights[k] * std::pow(t, e0) * std::pow(1.0 - t, e1) * f(t);
            }
            cell *= h;
        }
        total += cell;
    }
    return total;
}

} // namespace detail

struct ValueWithError {
    double value = 0.0;
    double error = 0.0; // measured last-doubling difference
};

// vol_n of a K_ell-invariant body from its profile:
//   (sigma_{ell-1} sigma_{n-ell-1} / 2n) int_0^1 t^{ell/2-1} (1-t)^{(n-ell)/2-1} rho(t)^n dt,
// with node doubling until 1e-8 relative agreement; the achieved doubling
// difference is reported as the error. Grid-backed profiles are integrated
// cell by cell so interpolation kinks do not stall convergence.
inline ValueWithError body_volume_profile_with_error(const Profile& p, int n, int ell,
                                                     int base_nodes = 64) {
    const double c = sphere_surface(ell - 1) * sphere_surface(n - ell - 1) / (2.0 * n);
    const double e0 = 0.5 * ell - 1.0, e1 = 0.5 * (n - ell) - 1.0;
    auto fn = [&](double t) { return std::pow(p(t), n); };
    if (const auto* grid = p.grid_nodes()) {
        double prev = c * detail::weighted_integral_composite(fn, e0, e1, *grid, 6);
        for (int pts = 12; pts <= 48; pts *= 2) {
            const double cur = c * detail::weighted_integral_composite(fn, e0, e1, *grid, pts);
            if (std::abs(cur - prev) <= 1e-8 * std::abs(cur))
                return {cur, std::abs(cur - prev) + 1e-15 * std::abs(cur)};
            prev = cur;
        }
        throw NonConvergence("body_volume_profile: composite quadrature did not settle at 1e-8");
    }
    auto value = [&](int nodes) {
        const QuadRule q = gauss_jacobi01(nodes, e0, e1);
        return c * q.integrate(fn);
    };
    double prev = value(base_nodes);
    for (int nodes = 2 * base_nodes; nodes <= 16 * base_nodes; nodes *= 2) {
        const double cur = value(nodes);
        if (std::abs(cur - prev) <= 1e-8 * std::abs(cur))
            return {cur, std::abs(cur - prev) + 1e-15 * std::abs(cur)};
        prev = cur;
    }
    throw NonConvergence("body_volume_profile: quadrature did not settle at 1e-8");
}

inline double body_volume_profile(const Profile& p, int n, int ell, int base_nodes = 64) {
    return body_volume_profile_with_error(p, n, ell, base_nodes).value;
}

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Monte-Carlo volume: (sigma_{n-1}/n) * mean of rho^n over uniform directions.
// Samples are drawn in fixed blocks with per-block streams and combined by
// pairwise summation, so the estimate is identical for any thread count.
inline McEstimate body_volume_mc(const StarBody& b, long samples, std::uint64_t seed,
                                 int threads = 1) {
    if (samples < 1000) throw std::invalid_argument("body_volume_mc: need >= 1000 samples");
    const int n = b.ambient();
    constexpr long kBlock = 4096;
    const long blocks = (samples + kBlock - 1) / kBlock;
    std::vector<double> sums(static_cast<std::size_t>(blocks), 0.0);
    std::vector<double> sums2(static_cast<std::size_t>(blocks), 0.0);
    parallel_for(blocks, threads, [&](long blk) {
        Rng rng(seed, static_cast<std::uint64_t>(blk));
        const long lo = blk * kBlock;
        const long hi = std::min(samples, lo + kBlock);
        double s = 0.0, s2 = 0.0;
        for (long k = lo; k < hi; ++k) {
            const auto theta = rng.unit_vector(n);
            const double v = std::pow(b.radial(theta), n);
            s += v;
            s2 += v * v;
        }
        sums[blk] = s;
        sums2[blk] = s2;
    });
    const double total = pairwise_sum(sums);
    const double total2 = pairwise_sum(sums2);
    const double mean = total / samples;
    const double var = std::max(0.0, total2 / samples - mean * mean);
    const double scale = sphere_surface(n - 1) / n;
    McEstimate est;
    est.value = scale * mean;
    est.std_error = scale * std::sqrt(var / samples);
    return est;
}

// Planar convexity of the profile body: the curve
//   (x, y) = rho(cos^2 w) (sin w, cos w),  w in [0, pi/2],
// reflected in both axes, must bound a convex polygon. All consecutive-edge
// cross products must share one sign within -1e-10.
inline bool is_convex_profile(const Profile& p, int grid = 512) {
    if (grid < 64) throw std::invalid_argument("is_convex_profile: grid >= 64");
    std::vector<double> xs, ys;
    xs.reserve(static_cast<std::size_t>(grid) + 1);
    ys.reserve(static_cast<std::size_t>(grid) + 1);
    for (int k = 0; k <= grid; ++k) {
        const double w = 0.5 * kPi * k / grid;
        const double t = square(std::cos(w));
        const double r = p(t);
        if (!(r > 0.0)) throw std::invalid_argument("is_convex_profile: degenerate profile");
        xs.push_back(r * std::sin(w));
        ys.push_back(r * std::cos(w));
    }
    // Quadrant I runs from (0, rho(1)) down to (rho(0), 0); assemble the full
    // closed curve counterclockwise starting in quadrant IV.
    std::vector<double> px, py;
    auto push = [&](double x, double y) {
        if (!px.empty() && std::abs(x - px.back()) + std::abs(y - py.back()) < 1e-15) return;
        px.push_back(x);
        py.push_back(y);
    };
    for (int k = grid; k >= 0; --k) push(xs[k], -ys[k]);  // IV: (rho(0),0) -> (0,-rho(1)) ... reversed
    for (int k = 0; k <= grid; ++k) push(-xs[k], -ys[k]); // III
    for (int k = grid; k >= 0; --k) push(-xs[k], ys[k]);  // II
    for (int k = 0; k <= grid; ++k) push(xs[k], ys[k]);   // I
    if (std::abs(px.front() - px.back()) + std::abs(py.front() - py.back()) < 1e-15) {
        px.pop_back();
        py.pop_back();
    }
    const std::size_t m = px.size();
    int sign = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t a = k, b2 = (k + 1) % m, c = (k + 2) % m;
        const double e1x = px[b2] - px[a], e1y = py[b2] - py[a];
        const double e2x = px[c] - px[b2], e2y = py[c] - py[b2];
        const double cross = e1x * e2y - e1y * e2x;
        if (cross > 1e-10) {
            if (sign < 0) return false;
            sign = 1;
        } else if (cross < -1e-10) {
            if (sign > 0) return false;
            sign = -1;
        }
    }
    return true;
}

// r(s) = s^{1/2} rho(1-s) non-decreasing on the grid within 1e-10.
inline bool monotone_r_check(const Profile& p, int grid = 512) {
    if (grid < 64) throw std::invalid_argument("monotone_r_check: grid >= 64");
    double prev = 0.0;
    for (int k = 0; k <= grid; ++k) {
        const double s = static_cast<double>(k) / grid;
        const double r = std::sqrt(s) * p(1.0 - s);
        if (k > 0 && r < prev - 1e-10) return false;
        prev = r;
    }
    return true;
}

struct SymmetrizedProfile {
    Profile profile;
    double max_std_error = 0.0; // largest per-node Monte-Carlo error of rho^i means
};

// K_ell-symmetrization (orbit average of rho^i, then the i-th root):
//   rho_0(t) = ( E_{u,v}[ rho(sqrt(1-t) u, sqrt(t) v)^i ] )^{1/i},
// sampled per grid node over u in S^{n-ell-1}, v in S^{ell-1}. The K_ell
// orbit of a direction at angle w is exactly that bi-spherical torus.
inline SymmetrizedProfile kl_symmetrize(const StarBody& b, int ell, int i, long samples,
                                        std::uint64_t seed, int nodes = 257, int threads = 1,
                                        double max_rel_std_error = 0.0) {
    if (i < 1) throw std::invalid_argument("kl_symmetrize: require i >= 1");
    if (samples < 100) throw std::invalid_argument("kl_symmetrize: require >= 100 samples");
    const int n = b.ambient();
    if (ell < 1 || ell > n - 1) throw std::invalid_argument("kl_symmetrize: bad ell");
    const auto ts = ChebyshevInterpolant::nodes(nodes - 1);
    std::vector<double> values(ts.size(), 0.0);
    std::vector<double> errors(ts.size(), 0.0);
    parallel_for(static_cast<long>(ts.size()), threads, [&](long node) {
        Rng rng(seed, static_cast<std::uint64_t>(node));
        const double t = ts[node];
        std::vector<double> draws(static_cast<std::size_t>(samples));
        for (long k = 0; k < samples; ++k) {
            const auto u = rng.unit_vector(n - ell);
            const auto v = rng.unit_vector(ell);
            const auto theta = bispherical_point(u, v, t);
            draws[k] = std::pow(b.radial(theta), i);
        }
        const double mean = pairwise_sum(draws) / samples;
        double var = 0.0;
        for (double w : draws) var += square(w - mean);
        var /= samples;
        values[node] = std::pow(mean, 1.0 / i);
        // delta method for the i-th root
        errors[node] = std::sqrt(var / samples) * values[node] / (i * mean);
    });
    double worst = 0.0, worst_rel = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        worst = std::max(worst, errors[k]);
        worst_rel = std::max(worst_rel, errors[k] / values[k]);
    }
    if (max_rel_std_error > 0.0 && worst_rel > max_rel_std_error)
        throw NumericalError("kl_symmetrize: Monte-Carlo error above requested tolerance");
    SymmetrizedProfile out{Profile::from_grid(ts, values), worst};
    return out;
}

} // namespace kltomo
