#include "doctest.h"

#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "risra/contention.hpp"

using namespace risra;

TEST_CASE("single user is always granted")
{
    Rng rng = make_stream(4, StreamTag::Contention);
    for (int s : {1, 2, 7}) {
        for (int t = 0; t < 100; ++t) {
            const GrantOutcome g = simulate_rr(rng, 1, s);
            REQUIRE(g.n_granted() == 1);
            CHECK(g.granted[0] == 0);
        }
    }
}

TEST_CASE("expected granted count")
{
    CHECK(expected_granted(50, 30) == doctest::Approx(9.495775099516969).epsilon(1e-12));
    CHECK(expected_granted(10, 8) == doctest::Approx(3.0065780133008957).epsilon(1e-12));
    CHECK(expected_granted(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("enumeration oracle matches hand counts")
{
    const auto p22 = oracle::enumerate_granted_pmf(2, 2);
    CHECK(p22[0] == doctest::Approx(0.5));
    CHECK(p22[1] == doctest::Approx(0.0));
    CHECK(p22[2] == doctest::Approx(0.5));
    const auto p33 = oracle::enumerate_granted_pmf(3, 3);
    CHECK(p33[0] == doctest::Approx(1.0 / 9));
    CHECK(p33[1] == doctest::Approx(2.0 / 3));
    CHECK(p33[3] == doctest::Approx(2.0 / 9));
}

TEST_CASE("simulated grants follow the exact law")
{
    Rng rng = make_stream(8, StreamTag::Contention);
    for (auto [k, s] : {std::pair{2, 2}, {3, 3}, {3, 2}, {5, 4}}) {
        const auto exact = oracle::enumerate_granted_pmf(k, s);
        const auto mc = granted_pmf_exact(k, s, 100000, rng);
        for (std::size_t i = 0; i < exact.size(); ++i) {
            CHECK(std::abs(mc[i] - exact[i]) <= 0.01);
        }
    }
}

TEST_CASE("granted users are distinct and within range")
{
    Rng rng = make_stream(9, StreamTag::Contention);
    for (int t = 0; t < 2000; ++t) {
        const int k = 1 + static_cast<int>(rng() % 60);
        const int s = 1 + static_cast<int>(rng() % 40);
        const GrantOutcome g = simulate_rr(rng, k, s);
        CHECK(static_cast<int>(g.n_granted()) <= std::min(k, s));
        const std::set<int> unique(g.granted.begin(), g.granted.end());
        CHECK(unique.size() == g.n_granted());
        CHECK(std::is_sorted(g.granted.begin(), g.granted.end()));
        if (!g.granted.empty()) {
            CHECK(g.granted.front() >= 0);
            CHECK(g.granted.back() < k);
        }
    }
}

TEST_CASE("closed-form pmf examples")
{
    const GrantedPmf p22 = granted_pmf_closed_form(2, 2);
    REQUIRE(p22.p.size() == 3);
    CHECK(p22.p[0] == doctest::Approx(0.25));
    CHECK(p22.p[1] == doctest::Approx(0.5));
    CHECK(p22.p[2] == doctest::Approx(0.25));

    const GrantedPmf p11 = granted_pmf_closed_form(1, 1);
    CHECK(p11.p[1] == doctest::Approx(1.0));

    const GrantedPmf p = granted_pmf_closed_form(50, 30);
    CHECK(p.mean() == doctest::Approx(expected_granted(50, 30)).epsilon(0.05));
}

TEST_CASE("closed-form pmf is a distribution")
{
    for (int k = 1; k <= 60; k += 7) {
        for (int s = 1; s <= 40; s += 3) {
            const GrantedPmf p = granted_pmf_closed_form(k, s);
            for (double v : p.p) {
                CHECK(v >= 0.0);
            }
            CHECK(std::abs(p.sum - 1.0) <= 1e-6);
            CHECK(std::accumulate(p.p.begin(), p.p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("closed form vs exact contention at the default size")
{
    Rng rng = make_stream(10, StreamTag::Contention);
    const auto exact = granted_pmf_exact(50, 30, 100000, rng);
    const double tv = total_variation(exact, granted_pmf_closed_form(50, 30).p);
    MESSAGE("total variation (50, 30): " << tv);
    CHECK(tv > 0.0);
    CHECK(tv < 0.1);
}
