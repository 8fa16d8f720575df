#include <doctest.h>

#include <cmath>
#include <kltomo/bp.hpp>

using namespace kltomo;

TEST_CASE("positive mode a: identical bodies give equality") {
    const Dims dims(6, 2, 3);
    const Profile q4 = Profile::ql_ball(4.0);
    const StarBody B = StarBody::ql_ball(6, 3, 4.0);
    const auto rep = bp_positive_check(q4, B, dims, "positive-a");
    CHECK(rep.hypothesis_holds);
    CHECK(rep.fraction_ok == 1.0);
    CHECK(rep.verdict == "confirmed");
    CHECK(rep.vol_a == doctest::Approx(rep.vol_b).epsilon(1e-12));
    CHECK(rep.vol_b0 == doctest::Approx(rep.vol_b).epsilon(1e-12));
}

TEST_CASE("positive mode a: shrunken body scales volumes") {
    const Dims dims(6, 2, 3);
    const Profile q4 = Profile::ql_ball(4.0);
    const Profile small = Profile::closed_form([&](double t) { return 0.9 * q4(t); });
    const StarBody B = StarBody::ql_ball(6, 3, 4.0);
    const auto rep = bp_positive_check(small, B, dims, "positive-a");
    CHECK(rep.verdict == "confirmed");
    CHECK(rep.vol_a == doctest::Approx(std::pow(0.9, 6) * rep.vol_b).epsilon(1e-10));
}

TEST_CASE("positive mode a: oversized body reports a failed hypothesis") {
    const Dims dims(5, 2, 2);
    const Profile ball = Profile::ql_ball(2.0);
    const Profile big = Profile::closed_form([&](double t) { return 1.1 * ball(t); });
    const StarBody B = StarBody::ql_ball(5, 2, 2.0);
    const auto rep = bp_positive_check(big, B, dims, "positive-a");
    CHECK_FALSE(rep.hypothesis_holds);
    CHECK(rep.verdict == "hypothesis-not-satisfied");
    CHECK(rep.worst_section_excess > 0.0);
}

TEST_CASE("positive mode b with a section-ratio comparison oracle") {
    // A = B^6_{4,2} with i = 3 = ell+1; B is a Euclidean ball scaled so that
    // every equal-angle section is just larger than the matching section of A.
    const Dims dims(6, 3, 2);
    const Profile q4 = Profile::ql_ball(4.0);
    const Profile ball = Profile::ql_ball(2.0);
    double scale_i = 0.0;
    for (double lambda : ChebyshevInterpolant::open_nodes(65)) {
        const double sa = section_volume_equal_angle(q4, lambda, dims).value;
        const double sb = section_volume_equal_angle(ball, lambda, dims).value;
        scale_i = std::max(scale_i, sa / sb);
    }
    const double c = 1.001 * std::pow(scale_i, 1.0 / dims.i);
    const StarBody B = StarBody::ql_ball(6, 2, 2.0).scaled(c);

    const auto rep = bp_positive_check(q4, B, dims, "positive-b");
    CHECK(rep.hypothesis_holds);
    CHECK(rep.verdict == "confirmed");
    CHECK(rep.min_g >= -1e-8 * rep.max_abs_g);
    CHECK(rep.duality_identity_residual < 1e-5);
    CHECK(rep.vol_a < rep.vol_b);
}

TEST_CASE("positive mode preconditions") {
    const Profile q4 = Profile::ql_ball(4.0);
    const StarBody B6 = StarBody::ql_ball(6, 1, 4.0);
    CHECK_THROWS_AS(bp_positive_check(q4, B6, Dims(6, 4, 1), "positive-a"),
                    std::invalid_argument); // i > min(ell, n-ell)
    CHECK_THROWS_AS(bp_positive_check(q4, B6, Dims(6, 4, 1), "positive-b"),
                    std::invalid_argument); // i - ell = 3
    CHECK_THROWS_AS(bp_positive_check(q4, StarBody::ql_ball(6, 2, 4.0), Dims(6, 5, 2),
                                      "positive-b"),
                    std::invalid_argument); // i > n - ell
    const Profile nonconvex = Profile::ql_ball(0.5);
    CHECK_THROWS_AS(bp_positive_check(nonconvex, StarBody::ql_ball(6, 2, 4.0), Dims(6, 3, 2),
                                      "positive-b"),
                    std::invalid_argument);
    CHECK_THROWS_AS(bp_positive_check(q4, B6, Dims(6, 2, 1), "sideways"), std::invalid_argument);
}

TEST_CASE("positive mode a with a general star body") {
    const Dims dims(5, 2, 2);
    const StarBody B =
        StarBody::ql_ball(5, 2, 2.0).perturbed(std::vector<double>{0.3, 0.0, 0.1, 0.0, 0.0});
    BpPositiveOptions opt;
    opt.lambda_grid = 9;
    opt.frames_per_lambda = 3;
    opt.mc_section_samples = 4096;
    opt.symmetrize_samples = 2048;
    opt.symmetrize_nodes = 65;
    opt.volume_mc_samples = 50000;
    // A = safely shrunken symmetrization of B
    const auto sym = kl_symmetrize(B, dims.ell, dims.i, 4096, 5, 65);
    const Profile A = Profile::closed_form(
        [p = sym.profile](double t) { return 0.8 * p(t); });
    const auto rep = bp_positive_check(A, B, dims, "positive-a", opt);
    CHECK(rep.hypothesis_holds);
    CHECK(rep.verdict == "confirmed");
}

TEST_CASE("counterexample construction at (6,4,1): frozen fixtures") {
    const Dims dims(6, 4, 1);
    const auto ce = construct_counterexample(dims);
    // fixture values from the frozen pipeline run
    CHECK(ce.spec.phi_min == doctest::Approx(-0.396169).epsilon(1e-3));
    CHECK(ce.spec.eps == doctest::Approx(3.5144e-05).epsilon(1e-3));
    CHECK(ce.spec.delta == doctest::Approx(0.1 * 0.396169).epsilon(1e-3));
    CHECK(ce.spec.pairing < 0.0);
    CHECK(ce.spec.smoke_sections_ok);
    CHECK(is_convex_profile(ce.a_profile));

    // the bump is nonnegative on a dense grid
    const InvariantBasis basis(6, 1, ce.spec.K);
    for (double t : ChebyshevInterpolant::open_nodes(503))
        CHECK(reconstruct(ce.h, basis, t) >= -1e-12 * ce.spec.h_max);

    // wiring: rho_A^i + eps M^{1-i} h = rho_B^i pointwise
    const auto mh = cosine_transform(ce.h, 1.0 - dims.i);
    const Profile b = Profile::ql_ball(4.0);
    for (double t : {0.1, 0.4, 0.77, 0.95}) {
        const double lhs = std::pow(ce.a_profile(t), dims.i) +
                           ce.spec.eps * reconstruct(mh, basis, t);
        CHECK(lhs == doctest::Approx(std::pow(b(t), dims.i)).epsilon(1e-12));
    }

    // eps = 0 edge: the construction formula returns B itself
    const auto at_zero = detail::a_power_evaluator(b, dims.i, basis, mh, 0.0);
    for (double t : {0.2, 0.6, 0.9})
        CHECK(at_zero(t) == doctest::Approx(std::pow(b(t), dims.i)).epsilon(1e-14));
}

TEST_CASE("counterexample construction preconditions") {
    CHECK_THROWS_AS(construct_counterexample(Dims(6, 3, 1)), std::invalid_argument); // i = ell+2
    CHECK_THROWS_AS(construct_counterexample(Dims(6, 2, 1)), std::invalid_argument);
}

TEST_CASE("counterexample verification at (6,4,1)") {
    const Dims dims(6, 4, 1);
    const auto ce = construct_counterexample(dims);
    VerifyOptions opt;
    opt.haar_samples = 400;
    const auto rep = verify_counterexample(ce.a_profile, dims, opt);
    CHECK(rep.verdict == "true");
    CHECK(rep.fraction_ok == 1.0);
    CHECK(rep.volume_margin > 5.0 * rep.volume_error);
    CHECK(rep.vol_a > rep.vol_b);

    // A = B: sections equal, volumes equal, not a counterexample
    const auto same = verify_counterexample(Profile::ql_ball(4.0), dims, opt);
    CHECK(same.verdict == "false");
    CHECK(same.fraction_ok == 1.0);
    CHECK(same.volume_margin == doctest::Approx(0.0));

    // scaled-up A: sections larger, rejected with diagnostics
    const Profile big = Profile::closed_form(
        [p = ce.a_profile](double t) { return 1.5 * p(t); });
    const auto bad = verify_counterexample(big, dims, opt);
    CHECK(bad.verdict == "false");
    CHECK(bad.fraction_ok < 1.0);
    CHECK(bad.worst_section_excess > 0.0);
}

TEST_CASE("symmetrization experiment") {
    const Dims dims(5, 2, 2);
    SymmetrizationOptions opt;
    opt.symmetrize_samples = 2048;
    opt.symmetrize_nodes = 65;
    opt.volume_mc_samples = 50000;
    opt.section_samples = 4096;
    opt.rotations = 12;
    opt.lambda_probes = 2;

    // invariant body: exact equality of volumes
    const StarBody inv = StarBody::ql_ball(5, 2, 4.0);
    const auto r1 = symmetrization_experiment(inv, dims, opt);
    CHECK(r1.contraction_ok);
    CHECK(std::abs(r1.vol_b0 - r1.vol_b) <= 4.0 * r1.vol_b_std_error + 1e-9 * r1.vol_b);
    CHECK(r1.transfer_max_dev <= r1.transfer_tol);

    // perturbed body: strict contraction beyond 3 sigma
    const StarBody bumpy =
        StarBody::ql_ball(5, 2, 2.0).perturbed(std::vector<double>{0.6, 0.0, 0.0, 0.0, 0.0});
    const auto r2 = symmetrization_experiment(bumpy, dims, opt);
    CHECK(r2.contraction_ok);
    CHECK(r2.vol_b0 < r2.vol_b - 3.0 * r2.vol_b_std_error);
    CHECK(r2.transfer_max_dev <= r2.transfer_tol);

    // rotating the body changes nothing beyond the Monte-Carlo error bars
    Rng rng(9);
    const KlRotation rot = haar_kl_rotation(dims, rng);
    const auto r3 = symmetrization_experiment(bumpy.rotated(rot), dims, opt);
    CHECK(std::abs(r3.vol_b0 - r2.vol_b0) <=
          4.0 * (r2.vol_b_std_error + r3.vol_b_std_error) + 2e-3 * r2.vol_b0);

    // determinism: identical inputs give identical reports
    const auto r4 = symmetrization_experiment(bumpy, dims, opt);
    CHECK(r4.vol_b == r2.vol_b);
    CHECK(r4.vol_b0 == r2.vol_b0);
    CHECK(r4.transfer_max_dev == r2.transfer_max_dev);
}
