#include <doctest.h>

#include <cmath>
#include <kltomo/star_body.hpp>
#include <sstream>

using namespace kltomo;

TEST_CASE("ql ball profiles") {
    const Profile euclid = Profile::ql_ball(2.0);
    for (double t : {0.0, 0.2, 0.5, 0.9, 1.0}) CHECK(euclid(t) == doctest::Approx(1.0));

    const Profile q4 = Profile::ql_ball(4.0);
    CHECK(q4(0.0) == doctest::Approx(1.0));
    CHECK(q4(1.0) == doctest::Approx(1.0));
    CHECK(q4(0.5) == doctest::Approx(std::pow(0.5, -0.25)).epsilon(1e-12)); // ~1.189207

    // the radial point lies on the boundary |x'|^4 + |x''|^4 = 1
    for (double t : {0.13, 0.5, 0.84}) {
        const double r = q4(t);
        const double xpp = r * std::sqrt(t), xp = r * std::sqrt(1.0 - t);
        CHECK(std::pow(xp, 4) + std::pow(xpp, 4) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(Profile::ql_ball(0.0), std::invalid_argument);
}

TEST_CASE("profile grid interpolation and csv round trip") {
    const Profile q3 = Profile::ql_ball(3.0);
    auto ts = ChebyshevInterpolant::nodes(128);
    std::vector<double> vs;
    for (double t : ts) vs.push_back(q3(t));
    const Profile g = Profile::from_grid(ts, vs);
    for (double t : {0.03, 0.2, 0.41, 0.77, 0.98})
        CHECK(g(t) == doctest::Approx(q3(t)).epsilon(1e-8));

    std::stringstream ss;
    g.save_csv(ss);
    const Profile back = Profile::load_csv(ss);
    for (double t : {0.1, 0.5, 0.9}) CHECK(back(t) == doctest::Approx(g(t)).epsilon(1e-10));
}

TEST_CASE("profile volume: unit ball and scaling") {
    const Profile one = Profile::closed_form([](double) { return 1.0; });
    CHECK(body_volume_profile(one, 6, 1) == doctest::Approx(std::pow(kPi, 3) / 6.0).epsilon(1e-12));

    const Profile two = Profile::closed_form([](double) { return 2.0; });
    CHECK(body_volume_profile(two, 4, 2) == doctest::Approx(8.0 * kPi * kPi).epsilon(1e-12));

    // exact scaling on the quadrature path
    const Profile q4 = Profile::ql_ball(4.0);
    const Profile q4s = Profile::closed_form([&](double t) { return 1.7 * q4(t); });
    const double v1 = body_volume_profile(q4, 6, 2);
    const double v2 = body_volume_profile(q4s, 6, 2);
    CHECK(v2 == doctest::Approx(std::pow(1.7, 6) * v1).epsilon(1e-10));
}

TEST_CASE("monte carlo volume: zero-variance ball and exact scaling") {
    const StarBody ball = StarBody::ql_ball(5, 1, 2.0);
    const auto est = body_volume_mc(ball, 2000, 7);
    CHECK(est.value == doctest::Approx(8.0 * kPi * kPi / 15.0).epsilon(1e-12));
    CHECK(est.std_error < 1e-12);

    const StarBody q4 = StarBody::ql_ball(6, 1, 4.0);
    const auto e1 = body_volume_mc(q4, 20000, 99);
    const auto e2 = body_volume_mc(q4.scaled(2.0), 20000, 99);
    CHECK(e2.value == doctest::Approx(64.0 * e1.value).epsilon(1e-13));

    CHECK_THROWS_AS(body_volume_mc(ball, 10, 1), std::invalid_argument);
}

TEST_CASE("profile volume matches monte carlo for the q=4 ball") {
    const Profile q4 = Profile::ql_ball(4.0);
    const double vq = body_volume_profile(q4, 6, 1);
    const auto mc = body_volume_mc(StarBody::ql_ball(6, 1, 4.0), 400000, 31);
    CHECK(std::abs(vq - mc.value) < 3.0 * mc.std_error);
}

TEST_CASE("volume oracle equivalence for random polynomial profiles") {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(600, static_cast<std::uint64_t>(trial));
        const double c0 = 0.5 + rng.uniform01();
        const double a1 = 0.5 * rng.uniform01(), a2 = 0.5 * rng.uniform01(),
                     a3 = 0.5 * rng.uniform01();
        auto f = [=](double t) { return c0 + a1 * t + a2 * t * t + a3 * t * t * t; };
        const int n = 4 + trial % 4;
        const int ell = 1 + trial % (n - 2);
        const Profile p = Profile::closed_form(f);
        const double vq = body_volume_profile(p, n, ell);
        const StarBody b = StarBody::from_profile(n, ell, p);
        const auto mc = body_volume_mc(b, 60000, 700 + static_cast<std::uint64_t>(trial));
        CHECK(std::abs(vq - mc.value) < 3.0 * mc.std_error + 1e-12);
    }
}

TEST_CASE("profile convexity") {
    CHECK(is_convex_profile(Profile::ql_ball(2.0)));
    CHECK(is_convex_profile(Profile::ql_ball(4.0)));
    CHECK(is_convex_profile(Profile::ql_ball(6.0)));
    CHECK_FALSE(is_convex_profile(Profile::ql_ball(0.5)));

    // The quadrant-I arc runs clockwise, so convex bodies only produce
    // non-positive cross products there; a q < 1 ball must exhibit a
    // violating (counterclockwise) vertex triple.
    auto wrong_turns = [](const Profile& p) {
        const int grid = 256;
        std::vector<double> xs, ys;
        for (int k = 0; k <= grid; ++k) {
            const double w = 0.5 * kPi * k / grid;
            const double r = p(square(std::cos(w)));
            xs.push_back(r * std::sin(w));
            ys.push_back(r * std::cos(w));
        }
        int count = 0;
        for (int k = 0; k + 2 <= grid; ++k) {
            const double cross = (xs[k + 1] - xs[k]) * (ys[k + 2] - ys[k + 1]) -
                                 (ys[k + 1] - ys[k]) * (xs[k + 2] - xs[k + 1]);
            if (cross > 1e-10) ++count;
        }
        return count;
    };
    const Profile bad = Profile::ql_ball(0.5);
    CHECK(wrong_turns(bad) > 0);
    CHECK(wrong_turns(Profile::ql_ball(4.0)) == 0);

    // scale invariance
    const Profile q4 = Profile::ql_ball(4.0);
    const Profile q4s = Profile::closed_form([&](double t) { return 3.7 * q4(t); });
    CHECK(is_convex_profile(q4s) == is_convex_profile(q4));
    const Profile bads = Profile::closed_form([&](double t) { return 0.2 * bad(t); });
    CHECK(is_convex_profile(bads) == is_convex_profile(bad));
}

TEST_CASE("monotone r check") {
    CHECK(monotone_r_check(Profile::closed_form([](double) { return 1.0; })));
    for (double q : {2.0, 3.0, 4.0, 6.0}) {
        const Profile p = Profile::ql_ball(q);
        REQUIRE(is_convex_profile(p));
        CHECK(monotone_r_check(p));
    }
    // steep non-convex negative control: r(s) = sqrt(s) (6 - 5s) decreases past s = 0.4
    const Profile steep = Profile::closed_form([](double t) { return 1.0 + 5.0 * t; });
    CHECK_FALSE(monotone_r_check(steep));
}

TEST_CASE("kl symmetrize leaves invariant bodies fixed") {
    const StarBody q4 = StarBody::ql_ball(6, 2, 4.0);
    const auto sym = kl_symmetrize(q4, 2, 3, 200, 5, 65);
    const Profile& p = *q4.profile();
    // exact at the grid nodes (constant orbit integrand), interpolation-level
    // agreement in between
    for (double t : ChebyshevInterpolant::nodes(64))
        CHECK(sym.profile(t) == doctest::Approx(p(t)).epsilon(1e-12));
    for (double t : {0.05, 0.3, 0.6, 0.95})
        CHECK(sym.profile(t) == doctest::Approx(p(t)).epsilon(1e-7));
    CHECK(sym.max_std_error < 1e-12);
}

TEST_CASE("kl symmetrize contracts volume") {
    const StarBody bumpy = StarBody::from_evaluator(
        4, [](std::span<const double> th) { return std::sqrt(1.0 + th[0] * th[0]); });
    const auto sym = kl_symmetrize(bumpy, 1, 2, 4000, 17, 129);
    const double v0 = body_volume_profile(sym.profile, 4, 1);
    const auto vb = body_volume_mc(bumpy, 200000, 23);
    CHECK(v0 <= vb.value + 3.0 * vb.std_error);
    CHECK(v0 < vb.value - 3.0 * vb.std_error); // strict for this body
}

TEST_CASE("kl symmetrize is orbit invariant") {
    const StarBody body = StarBody::from_evaluator(5, [](std::span<const double> th) {
        return 1.0 + 0.4 * th[0] * th[0] + 0.2 * th[4] * th[4];
    });
    Rng rng(41);
    const Dims dims(5, 2, 2);
    const KlRotation rot = haar_kl_rotation(dims, rng);
    const auto s1 = kl_symmetrize(body, 2, 2, 3000, 9, 65);
    const auto s2 = kl_symmetrize(body.rotated(rot), 2, 2, 3000, 9, 65);
    for (double t : {0.1, 0.45, 0.8}) {
        const double tol = 4.0 * (s1.max_std_error + s2.max_std_error) + 1e-9;
        CHECK(std::abs(s1.profile(t) - s2.profile(t)) < tol);
    }
}

TEST_CASE("symmetrization contracts volume across random perturbed bodies") {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(8800, static_cast<std::uint64_t>(trial));
        const int n = 4 + static_cast<int>(rng.next_u64() % 3);
        const int ell = 1 + static_cast<int>(rng.next_u64() % (n - 1));
        const int i = 1 + static_cast<int>(rng.next_u64() % (n - 1));
        std::vector<double> coeffs(static_cast<std::size_t>(n), 0.0);
        for (double& c : coeffs) c = 0.5 * rng.uniform01();
        const StarBody b = StarBody::ql_ball(n, ell, 2.0).perturbed(coeffs);
        const auto sym = kl_symmetrize(b, ell, i, 2048, 8900 + trial, 65);
        const double v0 = body_volume_profile(sym.profile, n, ell);
        const auto vb = body_volume_mc(b, 40000, 8950 + trial);
        CHECK(v0 <= vb.value + 3.0 * vb.std_error);
    }
}

TEST_CASE("monte carlo volume is identical for any thread count") {
    const StarBody b = StarBody::ql_ball(5, 2, 4.0);
    const auto t1 = body_volume_mc(b, 50000, 77, 1);
    const auto t3 = body_volume_mc(b, 50000, 77, 3);
    CHECK(t1.value == t3.value);
    CHECK(t1.std_error == t3.std_error);

    const auto s1 = kl_symmetrize(b, 2, 2, 1024, 5, 33, 1);
    const auto s3 = kl_symmetrize(b, 2, 2, 1024, 5, 33, 3);
    for (double t : {0.2, 0.7}) CHECK(s1.profile(t) == s3.profile(t));
}

TEST_CASE("star body validation rejects odd evaluators") {
    CHECK_THROWS_AS(
        StarBody::from_evaluator(3, [](std::span<const double> th) { return 1.0 + 0.5 * th[0]; }),
        std::invalid_argument);
}
