#include <doctest.h>

#include <cmath>
#include <random>

#include "kpm/ambiguity.hpp"
#include "test_util.hpp"

using namespace kpm;
using namespace kpm_test;

TEST_CASE("kl_divergence basic values") {
    VectorXd q(2);
    q << 0.5, 0.5;
    CHECK(kl_divergence(q, q) == doctest::Approx(0.0));

    VectorXd p(2);
    p << 1.0, 0.0;  // 0 ln 0 = 0 convention
    CHECK(kl_divergence(p, q) == doctest::Approx(std::log(2.0)));

    p << 0.75, 0.25;
    CHECK(kl_divergence(p, q) ==
          doctest::Approx(0.75 * std::log(1.5) + 0.25 * std::log(0.5)));

    VectorXd q3(3);
    q3 << 0.2, 0.3, 0.5;
    CHECK_THROWS_AS(kl_divergence(p, q3), ValidationError);
    VectorXd bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(kl_divergence(p, bad), ValidationError);
}

TEST_CASE("ambiguity set validation") {
    VectorXd q(2);
    q << 0.5, 0.5;
    CHECK_NOTHROW(AmbiguitySet(q, 0.3));
    CHECK_THROWS_AS(AmbiguitySet(q, -0.1), ValidationError);
    VectorXd notnorm(2);
    notnorm << 0.5, 0.6;
    CHECK_THROWS_AS(AmbiguitySet(notnorm, 0.3), ValidationError);
    VectorXd zero(2);
    zero << 1.0, 0.0;
    CHECK_THROWS_AS(AmbiguitySet(zero, 0.3), ValidationError);
}

TEST_CASE("dual_objective limits and special values") {
    VectorXd q(2);
    q << 0.4, 0.6;
    VectorXd d(2);
    d << 1.0, 3.0;

    // mu = 0 is the continuous limit -min d.
    CHECK(dual_objective(0.0, d, AmbiguitySet(q, 0.7)) == doctest::Approx(-1.0));

    // Omega = 0, large mu: l(mu) -> -E_q[d].
    CHECK(dual_objective(1e8, d, AmbiguitySet(q, 0.0)) ==
          doctest::Approx(-q.dot(d)).epsilon(1e-6));

    // Constant d = c: l(mu) = mu*Omega - c.
    VectorXd c = VectorXd::Constant(2, 2.5);
    CHECK(dual_objective(0.3, c, AmbiguitySet(q, 0.7)) ==
          doctest::Approx(0.3 * 0.7 - 2.5));
}

TEST_CASE("dual_objective is convex in mu (midpoint check on random triples)") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ud(-2.0, 2.0), um(0.01, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        VectorXd d(n);
        for (int i = 0; i < n; ++i) d[i] = ud(rng);
        const AmbiguitySet set(random_prior(rng, n), 0.5);
        const double a = um(rng), b = um(rng);
        const double lhs = dual_objective(0.5 * (a + b), d, set);
        const double rhs =
            0.5 * (dual_objective(a, d, set) + dual_objective(b, d, set));
        CHECK(lhs <= rhs + 1e-10);
    }
}

TEST_CASE("worst case: Omega = 0 returns the pivot") {
    VectorXd q(3);
    q << 0.2, 0.3, 0.5;
    VectorXd d(3);
    d << 1.0, -2.0, 0.5;
    const WorstCase wc = worst_case_distribution(d, AmbiguitySet(q, 0.0));
    CHECK(wc.distribution.isApprox(q));
    CHECK(wc.value == doctest::Approx(q.dot(d)));
}

TEST_CASE("worst case: constant d keeps the pivot (canonical tie-break)") {
    VectorXd q(3);
    q << 0.2, 0.3, 0.5;
    const VectorXd d = VectorXd::Constant(3, 1.7);
    const WorstCase wc = worst_case_distribution(d, AmbiguitySet(q, 0.4));
    CHECK(wc.distribution.isApprox(q, 1e-12));
    CHECK(wc.value == doctest::Approx(1.7));
}

TEST_CASE("worst case N=2 matches a fine grid oracle") {
    VectorXd q(2);
    q << 0.5, 0.5;
    VectorXd d(2);
    d << 0.0, 1.0;
    const AmbiguitySet set(q, 0.1);
    const WorstCase wc = worst_case_distribution(d, set);

    // Brute force over p = (x, 1-x), x in [0,1], step 1e-6.
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000000; ++i) {
        VectorXd p(2);
        p << i * 1e-6, 1.0 - i * 1e-6;
        if (kl_divergence(p, q) <= set.radius) best = std::min(best, d.dot(p));
    }
    CHECK(wc.value == doctest::Approx(best).epsilon(1e-5));
    CHECK(wc.distribution.sum() == doctest::Approx(1.0));
    CHECK(kl_divergence(wc.distribution, q) <= set.radius + 1e-8);
}

TEST_CASE("worst case equals -min_mu dual objective (strong duality)") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> ud(-3.0, 3.0), uo(0.05, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        VectorXd d(n);
        for (int i = 0; i < n; ++i) d[i] = ud(rng);
        const AmbiguitySet set(random_prior(rng, n), uo(rng));
        const WorstCase wc = worst_case_distribution(d, set);

        // Dense scan over mu confirms -min l(mu) = value.
        double lmin = dual_objective(0.0, d, set);
        for (int s = 1; s <= 4000; ++s)
            lmin = std::min(lmin, dual_objective(s * 0.005, d, set));
        CHECK(wc.value == doctest::Approx(-lmin).epsilon(5e-5));

        // Feasibility of the returned p*.
        CHECK(wc.distribution.minCoeff() >= -1e-15);
        CHECK(wc.distribution.sum() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(kl_divergence(wc.distribution, set.pivot) <= set.radius + 1e-8);
    }
}

TEST_CASE("worst case value limits and monotonicity in Omega") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        VectorXd d(n);
        for (int i = 0; i < n; ++i) d[i] = ud(rng);
        const VectorXd q = random_prior(rng, n);

        CHECK(worst_case_distribution(d, AmbiguitySet(q, 0.0)).value ==
              doctest::Approx(q.dot(d)));
        CHECK(worst_case_distribution(d, AmbiguitySet(q, 50.0)).value ==
              doctest::Approx(d.minCoeff()).epsilon(1e-6));

        double prev = std::numeric_limits<double>::infinity();
        for (const double omega : {0.0, 0.1, 0.3, 0.8, 2.0, 5.0}) {
            const double v = worst_case_distribution(d, AmbiguitySet(q, omega)).value;
            CHECK(v <= prev + 1e-10);
            prev = v;
        }
    }
}

TEST_CASE("worst case rejects non-finite d") {
    VectorXd q(2);
    q << 0.5, 0.5;
    VectorXd d(2);
    d << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(worst_case_distribution(d, AmbiguitySet(q, 0.5)), ValidationError);
}
