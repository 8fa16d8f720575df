#pragma once

// Busemann-Petty experiment harness: positive-direction verification for
// K_ell-symmetric bodies with smaller sections (the i <= ell case and the
// convex i = ell+1, ell+2 cases), and the negative-direction counterexample
// against B = B^n_{4,ell} for i > ell+2.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "abel.hpp"
#include "constants.hpp"
#include "grassmann.hpp"
#include "harmonics.hpp"
#include "profile.hpp"
#include "radon.hpp"
#include "star_body.hpp"

namespace kltomo {

struct BpTolerances {
    double section_rel = 1e-8; // slack for section comparisons, relative
    double volume_rel = 1e-6;  // vol(A) <= vol(B) (1 + volume_rel)
    double mc_sigmas = 3.0;    // extra slack in Monte-Carlo standard errors
};

struct BpReport {
    int n = 0, i = 0, ell = 0;
    std::string mode;
    long section_samples = 0;
    double fraction_ok = 0.0;
    bool hypothesis_holds = false;
    double vol_a = 0.0;
    double vol_b = 0.0;
    double vol_b_std_error = 0.0;
    double vol_b0 = 0.0; // symmetrized comparison body (positive modes)
    double volume_margin = 0.0;
    double volume_error = 0.0;
    double min_g = 0.0, max_abs_g = 0.0;          // mode positive-b certificate
    double duality_identity_residual = 0.0;       // mode positive-b cross-check
    double worst_section_excess = 0.0;            // most violating section, relative
    double chain_max_excess = 0.0;                // A vs B0 along the symmetrization chain
    bool chain_ok = false;
    std::string verdict;
    std::uint64_t seed = 0;
    BpTolerances tol;
};

struct BpPositiveOptions {
    int lambda_grid = 33;
    int frames_per_lambda = 8;
    long mc_section_samples = 4096;
    long symmetrize_samples = 2048;
    int symmetrize_nodes = 129;
    long volume_mc_samples = 200000;
    std::uint64_t seed = 1;
    int threads = 1;
    BpTolerances tol;
};

// Positive-direction check of the section hypothesis and the volume
// conclusion. Mode "positive-a" needs i <= min(ell, n-ell); mode "positive-b"
// needs i - ell in {1,2}, i <= n-ell, and a convex A. Sections are sampled on
// the equal-angle submanifold: a Chebyshev lambda grid, several random frames
// per lambda.
inline BpReport bp_positive_check(const Profile& a_profile, const StarBody& b_body,
                                  const Dims& dims, const std::string& mode,
                                  const BpPositiveOptions& opt = {}) {
    const int n = dims.n, i = dims.i, ell = dims.ell;
    if (b_body.ambient() != n) throw std::invalid_argument("bp_positive_check: B dimension");
    const bool mode_a = (mode == "positive-a");
    const bool mode_b = (mode == "positive-b");
    if (!mode_a && !mode_b)
        throw std::invalid_argument("bp_positive_check: mode must be positive-a or positive-b");
    if (mode_a && i > std::min(ell, n - ell))
        throw std::invalid_argument("bp_positive_check: mode positive-a requires i <= min(ell, n-ell)");
    if (mode_b) {
        if (i != ell + 1 && i != ell + 2)
            throw std::invalid_argument("bp_positive_check: mode positive-b requires i-ell in {1,2}");
        if (i > n - ell)
            throw std::invalid_argument("bp_positive_check: mode positive-b requires i <= n-ell");
        if (!is_convex_profile(a_profile))
            throw std::invalid_argument("bp_positive_check: mode positive-b requires a convex A");
    }

    BpReport rep;
    rep.n = n;
    rep.i = i;
    rep.ell = ell;
    rep.mode = mode;
    rep.seed = opt.seed;
    rep.tol = opt.tol;

    const bool b_invariant = b_body.profile().has_value() && b_body.symmetry_ell() == ell;

    // section hypothesis on the equal-angle grid
    const auto lambdas = ChebyshevInterpolant::open_nodes(opt.lambda_grid);
    long ok = 0, total = 0;
    double worst = -1e300;
    for (std::size_t lj = 0; lj < lambdas.size(); ++lj) {
        const double lambda = lambdas[lj];
        const double vol_a_sec = section_volume_equal_angle(a_profile, lambda, dims).value;
        const int frames = b_invariant ? 1 : opt.frames_per_lambda;
        for (int fj = 0; fj < frames; ++fj) {
            double vol_b_sec = 0.0, se = 0.0;
            if (b_invariant) {
                vol_b_sec = section_volume_equal_angle(*b_body.profile(), lambda, dims).value;
            } else {
                Rng rng(opt.seed, 1000 + lj * 64 + static_cast<std::uint64_t>(fj));
                const Frame xi = equal_angle_frame(dims, lambda, rng);
                const auto est = section_volume_body_mc(b_body, xi, opt.mc_section_samples,
                                                        opt.seed + 7 * lj + fj);
                vol_b_sec = est.value;
                se = est.error_estimate;
            }
            const double slack = opt.tol.section_rel * (1.0 + std::abs(vol_b_sec)) +
                                 opt.tol.mc_sigmas * se;
            const double excess = (vol_a_sec - vol_b_sec) / (1.0 + std::abs(vol_b_sec));
            worst = std::max(worst, excess);
            if (vol_a_sec <= vol_b_sec + slack) ++ok;
            ++total;
        }
    }
    rep.section_samples = total;
    rep.fraction_ok = static_cast<double>(ok) / static_cast<double>(total);
    rep.worst_section_excess = worst;
    rep.hypothesis_holds = (ok == total);

    // comparison body B0 (the volume-contracting symmetrization)
    double b0_std_error = 0.0;
    Profile b0 = [&] {
        if (b_invariant) return *b_body.profile();
        auto sym = kl_symmetrize(b_body, ell, i, opt.symmetrize_samples, opt.seed + 17,
                                 opt.symmetrize_nodes, opt.threads);
        b0_std_error = sym.max_std_error;
        return sym.profile;
    }();
    rep.vol_b0 = body_volume_profile(b0, n, ell);

    // the chain step: averaging the hypothesis over the K_ell orbit gives
    // sections of A below sections of B0; with i <= ell that is the pointwise
    // radial comparison, and for mode b it feeds the I+ monotonicity
    {
        double excess = -1e300;
        for (double lambda : lambdas) {
            const double sa = section_volume_equal_angle(a_profile, lambda, dims).value;
            const double sb = section_volume_equal_angle(b0, lambda, dims).value;
            const double se =
                b0_std_error > 0.0 ? i * sb * b0_std_error / b0(lambda) : 0.0;
            const double slack =
                opt.tol.section_rel * (1.0 + std::abs(sb)) + opt.tol.mc_sigmas * se;
            excess = std::max(excess, (sa - sb - slack) / (1.0 + std::abs(sb)));
        }
        rep.chain_max_excess = excess;
        rep.chain_ok = excess <= 0.0;
    }
    rep.vol_a = body_volume_profile(a_profile, n, ell);
    if (b_invariant) {
        rep.vol_b = body_volume_profile(*b_body.profile(), n, ell);
        rep.vol_b_std_error = 0.0;
    } else {
        const auto est = body_volume_mc(b_body, opt.volume_mc_samples, opt.seed + 23, opt.threads);
        rep.vol_b = est.value;
        rep.vol_b_std_error = est.std_error;
    }

    if (mode_b) {
        const AbelParams params{dims};
        const auto g = solve_g(a_profile, params);
        rep.min_g = g.min_value;
        rep.max_abs_g = g.max_abs;
        // vol_n(A) = (c2/c1) int (I+ rho_A^i)(lam) psi(lam) dlam with
        // psi = lam^{i/2-1} g(lam) / Gamma(alpha): the duality route that
        // certifies the volume conclusion
        const double c2 = sphere_surface(ell - 1) * sphere_surface(n - ell - 1) / (2.0 * n);
        const double inv_gamma = 1.0 / std::tgamma(params.alpha());
        auto rho_i = [&](double t) { return std::pow(a_profile(t), i); };
        const double via_chain =
            (c2 / params.c1()) *
            tanh_sinh01(
                [&](double lam, double) {
                    if (lam <= 0.0 || lam >= 1.0) return 0.0;
                    return i_plus_fn(rho_i, lam, params) *
                           std::pow(lam, 0.5 * i - 1.0) * g.eval(lam) * inv_gamma;
                },
                1e-11, 11, 1e-30);
        rep.duality_identity_residual = std::abs(via_chain - rep.vol_a) / rep.vol_a;
    }

    if (!rep.hypothesis_holds) {
        rep.verdict = "hypothesis-not-satisfied";
    } else {
        const double allowance = rep.vol_b * opt.tol.volume_rel +
                                 opt.tol.mc_sigmas * rep.vol_b_std_error;
        rep.volume_margin = rep.vol_b - rep.vol_a;
        rep.volume_error = 1e-8 * (rep.vol_a + rep.vol_b) + rep.vol_b_std_error;
        const bool volume_ok = rep.vol_a <= rep.vol_b + allowance;
        rep.verdict = (volume_ok && rep.chain_ok) ? "confirmed" : "violation";
    }
    return rep;
}

struct CounterexampleSpec {
    int n = 0, i = 0, ell = 0;
    double q = 4.0;
    int K = 48;
    double eps = 0.0;
    double eps_max = 0.0;
    double delta = 0.0;
    double phi_min = 0.0; // min of phi = M^{1-i} rho_B^{n-i}; must be < 0
    double pairing = 0.0; // (phi, h) in the weighted inner product; must be < 0
    double h_max = 0.0;
    bool smoke_sections_ok = false;
};

struct Counterexample {
    Profile a_profile;
    CounterexampleSpec spec;
    HarmonicExpansion h; // the bump actually used (a square in the truncation space)
};

struct CounterexampleOptions {
    int K = 48;
    double eps_max = 0.5;
    int profile_grid = 1024;
    int convexity_grid = 512; // the same resolution is_convex_profile defaults to
    int bisection_iters = 40;
    int smoke_frames = 64;
    std::uint64_t seed = 1;
};

namespace detail {

inline std::function<double(double)> a_power_evaluator(Profile b_profile, int i,
                                                       InvariantBasis basis,
                                                       HarmonicExpansion mh, double eps) {
    return [b = std::move(b_profile), i, basis = std::move(basis),
            mh = std::move(mh), eps](double t) {
        return std::pow(b(t), i) - eps * reconstruct(mh, basis, t);
    };
}

} // namespace detail

// Builds the counterexample body: rho_A^i = rho_B^i - eps M^{1-i} h with
// B = B^n_{4,ell} and h >= 0 a squared-hinge bump on the set where
// phi = M^{1-i}(rho_B^{n-i}) drops below -delta, realized as a square inside
// the truncation space so it stays nonnegative exactly; epsilon is the
// largest value (times a 0.9 safety factor) keeping A positive and convex.
inline Counterexample construct_counterexample(const Dims& dims,
                                               const CounterexampleOptions& opt = {}) {
    const int n = dims.n, i = dims.i, ell = dims.ell;
    if (!(ell + 2 < i && i <= n - 1))
        throw std::invalid_argument("construct_counterexample: require ell+2 < i <= n-1");
    const int K = opt.K;
    const Profile b_profile = Profile::ql_ball(4.0);
    const InvariantBasis basis(n, ell, K);

    // phi = M^{1-i}(rho_B^{n-i}); its negative set is exactly the failure of
    // B to be an (n-i)-intersection body
    const HarmonicExpansion phi = cosine_transform(
        expand_invariant_fn([&](double t) { return std::pow(b_profile(t), n - i); }, basis),
        1.0 - i);
    const auto grid = ChebyshevInterpolant::open_nodes(opt.profile_grid);
    std::vector<double> phi_vals(grid.size());
    double phi_min = 1e300;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        phi_vals[j] = reconstruct(phi, basis, grid[j]);
        phi_min = std::min(phi_min, phi_vals[j]);
    }
    if (phi_min >= 0.0)
        throw NumericalError(
            "construct_counterexample: phi has no negative set; B appears to be an "
            "intersection body, contradicting the regime i > ell+2 (multiplier bug?)");
    const double delta = 0.1 * std::abs(phi_min);

    // Bump concentrated inside {phi < -delta}. M^{1-i} raises roughness by
    // 2i-n derivatives, so the bump must be smooth; and after truncation it
    // must still be nonnegative. Both hold for h = w^2 with w the degree-K/2
    // expansion of a C-infinity mollifier on the contiguous negative run
    // around the minimizer: h is an exact polynomial of the truncation space,
    // nonnegative by algebra, and (phi, h) < 0 is verified below.
    std::size_t arg_min = 0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (phi_vals[j] == phi_min) arg_min = j;
    std::size_t lo = arg_min, hi = arg_min;
    while (lo > 0 && phi_vals[lo - 1] < -delta) --lo;
    while (hi + 1 < grid.size() && phi_vals[hi + 1] < -delta) ++hi;
    double support_a = grid[lo], support_b = grid[hi];
    const double inset = 0.02 * (support_b - support_a);
    support_a += inset;
    support_b -= inset;
    if (!(support_b > support_a))
        throw NumericalError("construct_counterexample: negative set too thin for a bump");
    auto mollifier_sqrt = [support_a, support_b](double t) {
        const double z = (2.0 * t - support_a - support_b) / (support_b - support_a);
        if (std::abs(z) >= 1.0) return 0.0;
        return std::exp(0.5 * (1.0 - 1.0 / (1.0 - z * z)));
    };
    const InvariantBasis half_basis(n, ell, K / 2);
    const HarmonicExpansion w = expand_invariant_fn(mollifier_sqrt, half_basis);
    HarmonicExpansion h = expand_invariant_fn(
        [&](double t) { return square(reconstruct(w, half_basis, t)); }, basis);
    double h_max = 0.0;
    for (double t : grid) h_max = std::max(h_max, std::abs(reconstruct(h, basis, t)));
    const double pairing = phi.dot(h);
    if (!(pairing < 0.0))
        throw NumericalError("construct_counterexample: (phi, h) is not negative");

    const HarmonicExpansion mh = cosine_transform(h, 1.0 - i);

    auto feasible = [&](double eps) {
        const auto pow_i = detail::a_power_evaluator(b_profile, i, basis, mh, eps);
        double lo = 1e300;
        for (double t : grid) lo = std::min(lo, pow_i(t));
        if (lo <= 1e-10) return false;
        const Profile a = Profile::closed_form(
            [pow_i, i](double t) { return std::pow(pow_i(t), 1.0 / i); });
        return is_convex_profile(a, opt.convexity_grid);
    };

    double eps = 0.0;
    if (feasible(opt.eps_max)) {
        eps = opt.eps_max;
    } else {
        double lo = 0.0, hi = opt.eps_max;
        for (int it = 0; it < opt.bisection_iters; ++it) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? lo : hi) = mid;
        }
        eps = lo;
    }
    eps *= 0.9;
    if (!(eps > 0.0) || !feasible(eps))
        throw NumericalError("construct_counterexample: no feasible epsilon");

    const auto pow_i = detail::a_power_evaluator(b_profile, i, basis, mh, eps);
    Counterexample out{
        Profile::closed_form([pow_i, i](double t) { return std::pow(pow_i(t), 1.0 / i); }),
        CounterexampleSpec{}, h};
    out.spec.n = n;
    out.spec.i = i;
    out.spec.ell = ell;
    out.spec.K = K;
    out.spec.eps = eps;
    out.spec.eps_max = opt.eps_max;
    out.spec.delta = delta;
    out.spec.phi_min = phi_min;
    out.spec.pairing = pairing;
    out.spec.h_max = h_max;

    // construction honesty: confirm the section inequality on a small sample
    // without invoking the intertwining identity
    ReducedOptions ropt;
    ropt.inner_nodes = 48;
    ropt.outer_degree = 48;
    auto rho_a_i = [&](double t) { return pow_i(t); };
    auto rho_b_i = [&](double t) { return std::pow(b_profile(t), i); };
    bool smoke_ok = true;
    for (int trial = 0; trial < opt.smoke_frames && smoke_ok; ++trial) {
        Rng rng(opt.seed, 5000 + static_cast<std::uint64_t>(trial));
        const auto sp = canonical_lambdas(haar_sample_frame(dims, rng), dims);
        const double va = radon_reduced_fn(rho_a_i, sp, dims, ropt).value;
        const double vb = radon_reduced_fn(rho_b_i, sp, dims, ropt).value;
        if (va > vb + 1e-8 * (1.0 + std::abs(vb))) smoke_ok = false;
    }
    out.spec.smoke_sections_ok = smoke_ok;
    if (!smoke_ok)
        throw NumericalError("construct_counterexample: direct section check failed");
    return out;
}

struct VerifyOptions {
    long haar_samples = 10000;
    int lambda_grid = 33;
    int frames_per_lambda = 8;
    std::uint64_t seed = 2;
    BpTolerances tol;
    ReducedOptions reduced;

    VerifyOptions() {
        reduced.inner_nodes = 48;
        reduced.outer_degree = 48;
    }
};

// Verifies a counterexample body directly: every sampled section (Haar and
// equal-angle) of A must not exceed the matching section of B = B^n_{4,ell},
// and vol_n(A) must exceed vol_n(B) by more than 5x the numerical error.
inline BpReport verify_counterexample(const Profile& a_profile, const Dims& dims,
                                      const VerifyOptions& opt = {}) {
    const int n = dims.n, i = dims.i, ell = dims.ell;
    const Profile b_profile = Profile::ql_ball(4.0);

    BpReport rep;
    rep.n = n;
    rep.i = i;
    rep.ell = ell;
    rep.mode = "negative";
    rep.seed = opt.seed;
    rep.tol = opt.tol;

    auto rho_a_i = [&](double t) { return std::pow(a_profile(t), i); };
    auto rho_b_i = [&](double t) { return std::pow(b_profile(t), i); };

    long ok = 0, total = 0;
    double worst = -1e300;
    auto record = [&](double va, double vb) {
        const double excess = (va - vb) / (1.0 + std::abs(vb));
        worst = std::max(worst, excess);
        if (va <= vb + opt.tol.section_rel * (1.0 + std::abs(vb))) ++ok;
        ++total;
    };
    for (long trial = 0; trial < opt.haar_samples; ++trial) {
        Rng rng(opt.seed, static_cast<std::uint64_t>(trial));
        const auto sp = canonical_lambdas(haar_sample_frame(dims, rng), dims);
        record(radon_reduced_fn(rho_a_i, sp, dims, opt.reduced).value / i,
               radon_reduced_fn(rho_b_i, sp, dims, opt.reduced).value / i);
    }
    for (double lambda : ChebyshevInterpolant::open_nodes(opt.lambda_grid)) {
        record(radon_equal_angle_fn(rho_a_i, lambda, dims, opt.reduced).value / i,
               radon_equal_angle_fn(rho_b_i, lambda, dims, opt.reduced).value / i);
    }
    rep.section_samples = total;
    rep.fraction_ok = static_cast<double>(ok) / static_cast<double>(total);
    rep.worst_section_excess = worst;
    rep.hypothesis_holds = (ok == total);

    const auto va = body_volume_profile_with_error(a_profile, n, ell);
    const auto vb = body_volume_profile_with_error(b_profile, n, ell);
    rep.vol_a = va.value;
    rep.vol_b = vb.value;
    rep.volume_margin = rep.vol_a - rep.vol_b; // counterexample wants A strictly larger
    rep.volume_error = va.error + vb.error;

    if (!rep.hypothesis_holds) {
        rep.verdict = "false";
    } else if (rep.volume_margin > 5.0 * rep.volume_error) {
        rep.verdict = "true";
    } else if (rep.volume_margin > 0.0) {
        rep.verdict = "inconclusive";
    } else {
        rep.verdict = "false";
    }
    return rep;
}

struct SymmetrizationReport {
    double vol_b = 0.0, vol_b_std_error = 0.0;
    double vol_b0 = 0.0;
    bool contraction_ok = false;
    double transfer_max_dev = 0.0; // orbit-averaged sections of B vs sections of B0
    double transfer_tol = 0.0;
    std::uint64_t seed = 0;
};

struct SymmetrizationOptions {
    long symmetrize_samples = 4096;
    int symmetrize_nodes = 129;
    long volume_mc_samples = 200000;
    long section_samples = 8192;
    int rotations = 24;
    int lambda_probes = 4;
    std::uint64_t seed = 3;
    int threads = 1;
};

// Symmetrization experiment: vol(B0) <= vol(B), and the orbit average of
// equal-angle sections of B equals the matching section of B0.
inline SymmetrizationReport symmetrization_experiment(const StarBody& b_body, const Dims& dims,
                                                      const SymmetrizationOptions& opt = {}) {
    const int n = dims.n, i = dims.i, ell = dims.ell;
    if (b_body.ambient() != n) throw std::invalid_argument("symmetrization_experiment: dims");
    SymmetrizationReport rep;
    rep.seed = opt.seed;

    const bool invariant = b_body.profile().has_value() && b_body.symmetry_ell() == ell;
    const Profile b0 = invariant ? *b_body.profile()
                                 : kl_symmetrize(b_body, ell, i, opt.symmetrize_samples,
                                                 opt.seed, opt.symmetrize_nodes, opt.threads)
                                       .profile;
    rep.vol_b0 = body_volume_profile(b0, n, ell);
    const auto vb = body_volume_mc(b_body, opt.volume_mc_samples, opt.seed + 1, opt.threads);
    rep.vol_b = vb.value;
    rep.vol_b_std_error = vb.std_error;
    rep.contraction_ok = rep.vol_b0 <= rep.vol_b + 3.0 * vb.std_error + 1e-9 * rep.vol_b;

    // section transfer at a few equal-angle frames
    double max_dev = 0.0, tol = 0.0;
    for (int p = 0; p < opt.lambda_probes; ++p) {
        Rng rng(opt.seed, 100 + static_cast<std::uint64_t>(p));
        const double lambda = 0.15 + 0.7 * rng.uniform01();
        const Frame zeta = equal_angle_frame(dims, lambda, rng);
        std::vector<double> vals(static_cast<std::size_t>(opt.rotations));
        double mean_se2 = 0.0;
        for (int r = 0; r < opt.rotations; ++r) {
            Rng rr(opt.seed, 200 + 64 * static_cast<std::uint64_t>(p) + r);
            const KlRotation rot = haar_kl_rotation(dims, rr);
            const auto est = section_volume_body_mc(b_body, apply_kl_rotation(zeta, rot),
                                                    opt.section_samples, opt.seed + 31 + r);
            vals[r] = est.value;
            mean_se2 += square(est.error_estimate);
        }
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= opt.rotations;
        double spread2 = 0.0;
        for (double v : vals) spread2 += square(v - mean);
        spread2 /= opt.rotations;
        const double se = std::sqrt(spread2 / opt.rotations + mean_se2 / square(1.0 * opt.rotations));
        const double b0_section = section_volume_equal_angle(b0, lambda, dims).value;
        max_dev = std::max(max_dev, std::abs(mean - b0_section));
        tol = std::max(tol, 4.0 * se + 1e-9 * std::abs(mean));
    }
    rep.transfer_max_dev = max_dev;
    rep.transfer_tol = tol;
    return rep;
}

} // namespace kltomo
