#pragma once

// Cross-module validation suite: the identities each transform must satisfy,
// run at configurable sizes. Used by the `validate` subcommand and the
// acceptance tests.

#include <string>
#include <vector>

#include "abel.hpp"
#include "bp.hpp"
#include "harmonics.hpp"
#include "radon.hpp"

namespace kltomo {

struct ValidationCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct ValidationConfig {
    int pairs_per_dims = 10;    // radon oracle-equivalence sample pairs
    int duality_pairs = 4;      // abel duality pairs per admissible dims
    int positivity_profiles = 12;
    int intertwining_trials = 12;
    std::uint64_t seed = 1;
    std::vector<Dims> extra_dims; // e.g. the classical body of revolution (3,2,1)
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass = true;
    std::string convention_note;
};

namespace detail {

inline ProfileFunction random_validation_poly(std::uint64_t seed, int degree = 6) {
    Rng rng(seed);
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (double& a : c) a = 2.0 * rng.uniform01() - 1.0;
    return [c](double t) {
        double acc = 0.0;
        for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) acc = acc * t + c[k];
        return acc;
    };
}

// Random analytic profile that is strictly convex, poles included. The base
// (q, ell)-balls with even q > 2 have flat poles (zero curvature), so the
// multiplicative factor 1 + a t + b t(1-t) must bend both poles inward:
// a - b >= margin at t = 1 and -(a + b) >= margin at t = 0.
inline Profile random_convex_profile(std::uint64_t seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(seed, attempt);
        const double qs[3] = {2.0, 4.0, 6.0};
        const double q = qs[rng.next_u64() % 3];
        const double a = -0.12 * rng.uniform01();
        const double b = a - (0.02 + 0.08 * rng.uniform01()); // b <= a and a + b < 0
        const Profile base = Profile::ql_ball(q);
        try {
            const Profile candidate = Profile::closed_form([base, a, b](double t) {
                return base(t) * (1.0 + a * t + b * t * (1.0 - t));
            });
            if (is_convex_profile(candidate)) return candidate;
        } catch (const std::invalid_argument&) {
        }
    }
}

} // namespace detail

inline ValidationReport run_validation(const ValidationConfig& cfg = {}) {
    ValidationReport rep;
    auto add = [&](ValidationCheck c) {
        rep.all_pass = rep.all_pass && c.pass;
        rep.checks.push_back(std::move(c));
    };

    // Radon reduced-vs-direct oracle equivalence
    {
        std::vector<Dims> dims_set{Dims(5, 2, 2), Dims(6, 4, 1), Dims(6, 2, 3), Dims(7, 3, 2)};
        for (const Dims& d : cfg.extra_dims) dims_set.push_back(d);
        double worst = 0.0;
        for (const Dims& dims : dims_set) {
            for (int trial = 0; trial < cfg.pairs_per_dims; ++trial) {
                const auto f0 = detail::random_validation_poly(
                    cfg.seed + 11 * static_cast<std::uint64_t>(dims.n + 8 * dims.i) + trial);
                Rng rng(cfg.seed + 13, static_cast<std::uint64_t>(dims.n * 100 + trial));
                const Frame xi = haar_sample_frame(dims, rng);
                const int ell = dims.ell;
                auto f = [&](std::span<const double> th) { return f0(cos2_to_rell(th, ell)); };
                const double direct = radon_direct_quadrature(f, xi).value;
                const double reduced =
                    radon_reduced_fn(f0, canonical_lambdas(xi, dims), dims).value;
                worst = std::max(worst, std::abs(reduced - direct) / (1.0 + std::abs(direct)));
            }
        }
        add({"radon-reduced-vs-direct", worst, 1e-6, worst <= 1e-6, ""});
    }

    // normalizations R_i 1 = sigma_{i-1}, R_i^* 1 = 1
    {
        double worst = 0.0;
        for (const Dims& dims : {Dims(5, 2, 2), Dims(6, 4, 1), Dims(7, 3, 2)}) {
            Rng rng(cfg.seed + 29, static_cast<std::uint64_t>(dims.n));
            const Frame xi = haar_sample_frame(dims, rng);
            auto one = [](std::span<const double>) { return 1.0; };
            worst = std::max(worst, std::abs(radon_direct_quadrature(one, xi).value -
                                             sphere_surface(dims.i - 1)) /
                                        sphere_surface(dims.i - 1));
            auto onef = [](const Frame&) { return 1.0; };
            const auto dual = dual_radon_direct(onef, rng.unit_vector(dims.n), dims, 64,
                                                cfg.seed + 31);
            worst = std::max(worst, std::abs(dual.value - 1.0));
        }
        add({"radon-normalization", worst, 1e-10, worst <= 1e-10, ""});
    }

    // multiplier inversion identity after the measure-convention fix
    {
        double worst = 0.0;
        std::string note;
        for (int n = 4; n <= 8; ++n) {
            const MultiplierTable& table = MultiplierTable::for_dimension(n);
            note = table.convention_note();
            for (int k = 0; k <= 40; ++k)
                for (double a : {-3.5, -1.2, 0.25, 0.5, 0.75})
                    worst = std::max(worst, std::abs(table.multiplier(k, a) *
                                                         table.multiplier(k, 2.0 - n - a) -
                                                     1.0));
        }
        rep.convention_note = note;
        add({"cosine-multiplier-inversion", worst, 1e-8, worst <= 1e-8, note});
    }

    // Abel duality across all admissible (n, i, ell), n <= 8
    {
        double worst = 0.0;
        for (int n = 3; n <= 8; ++n)
            for (int ell = 1; 2 * ell + 1 <= n; ++ell)
                for (int i = ell + 1; i <= n - ell; ++i) {
                    const AbelParams params{Dims(n, i, ell)};
                    for (int trial = 0; trial < cfg.duality_pairs; ++trial) {
                        const auto f = detail::random_validation_poly(
                            cfg.seed + 37 * static_cast<std::uint64_t>(n + 8 * i) + trial, 5);
                        const auto psi = detail::random_validation_poly(
                            cfg.seed + 41 * static_cast<std::uint64_t>(ell + 3 * i) + trial, 5);
                        worst = std::max(worst, abel_duality_check(f, psi, params).rel_residual);
                    }
                }
        add({"abel-duality", worst, 1e-8, worst <= 1e-8, ""});
    }

    // positivity of the solved weight g on convex profiles, plus the control
    {
        double worst = 0.0; // most negative min(g)/max|g| over convex profiles
        int done = 0;
        std::uint64_t s = cfg.seed + 71;
        const double ball_qs[4] = {2.0, 3.0, 4.0, 6.0};
        while (done < cfg.positivity_profiles) {
            const Profile p = (done < 4) ? Profile::ql_ball(ball_qs[done])
                                         : detail::random_convex_profile(s + done);
            Rng rng(cfg.seed + 73, static_cast<std::uint64_t>(done));
            const int delta_i = 1 + static_cast<int>(rng.next_u64() % 2);
            const int ell = 1 + static_cast<int>(rng.next_u64() % 2);
            const int i = ell + delta_i;
            const int n = i + ell + 1 + static_cast<int>(rng.next_u64() % 2);
            const auto g = solve_g(p, AbelParams{Dims(n, i, ell)});
            worst = std::min(worst, g.min_value / g.max_abs);
            ++done;
        }
        add({"solve-g-positivity", -worst, 1e-8, -worst <= 1e-8, ""});

        const Profile steep = Profile::closed_form([](double t) { return 1.0 + 5.0 * t; });
        const auto g = solve_g(steep, AbelParams{Dims(6, 3, 1)});
        const double control = g.min_value / g.max_abs;
        add({"solve-g-negative-control", control, -1e-3, control < -1e-3,
             "non-convex fixture must yield a genuinely negative g"});
    }

    // constancy of the intertwining ratio
    {
        double worst_cv = 0.0;
        bool positive = true;
        for (const Dims& dims : {Dims(6, 4, 1), Dims(7, 3, 2)}) {
            const Profile f0 = detail::random_convex_profile(cfg.seed + 91);
            const auto r = verify_intertwining(f0, dims, cfg.intertwining_trials, cfg.seed + 93);
            worst_cv = std::max(worst_cv, r.cv);
            positive = positive && (r.c_hat > 0.0);
        }
        add({"intertwining-constancy", worst_cv, 1e-4, worst_cv <= 1e-4 && positive, ""});
    }

    return rep;
}

} // namespace kltomo
