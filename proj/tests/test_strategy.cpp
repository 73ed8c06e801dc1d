#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "risra/error.hpp"
#include "risra/strategy.hpp"

using namespace risra;

namespace {

struct Setup {
    SystemConfig config;
    DerivedParams derived;
    std::shared_ptr<const CascadePool> pool;
    ThetaEstimator estimator;

    explicit Setup(const SystemConfig& c, std::size_t n = 400, std::uint64_t seed = 5)
        : config(c), derived(validate(c)),
          pool(std::make_shared<CascadePool>(config, derived, n, seed)),
          estimator(derived, pool)
    {
    }
};

Matrix<cplx> rayleigh_direct(const Setup& s, std::size_t users, std::uint64_t seed)
{
    Rng rng = make_stream(seed, StreamTag::Validation, 1);
    return sample_direct(rng, users, s.config, s.derived);
}

std::shared_ptr<CascadePool> zero_pool(int max_level, std::size_t channels, std::size_t n = 8)
{
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(max_level) + 1,
                                          std::vector<double>(n * channels, 0.0));
    return std::make_shared<CascadePool>(n, channels, std::move(sums));
}

} // namespace

TEST_CASE("probe reward branch identity")
{
    Rng rng = make_stream(31, StreamTag::Validation);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    for (int t = 0; t < 100000; ++t) {
        const double rate = u(rng);
        const double lambda = u(rng);
        const double tc = 0.024;
        const double tau = 40e-6 * (1 + t % 64);
        if (std::abs(rate - lambda) < 1e-9) {
            continue;
        }
        const double transmit = (tc - tau) * rate - lambda * tc;
        const double reward = probe_reward(rate, lambda, tc, tau);
        CHECK((reward == transmit) == (rate >= lambda));
    }
}

TEST_CASE("theta limiting cases")
{
    const Setup s(fixture::desk());
    const Matrix<cplx> hd = rayleigh_direct(s, 3, 1);
    const Schedule a = greedy_schedule(hd);

    SUBCASE("zero threshold gives T_r E[R_r]")
    {
        for (int level : {1, 3, 6}) {
            const auto rates = s.estimator.rates(a, level, hd);
            double mean = 0.0;
            for (double r : rates) {
                mean += r;
            }
            mean /= static_cast<double>(rates.size());
            const ThetaValue t = s.estimator.theta(a, level, 0.0, hd);
            CHECK(t.value > 0.0);
            CHECK(t.value == doctest::Approx(s.derived.ris_tx_time(level) * mean).epsilon(1e-12));
        }
    }
    SUBCASE("empty probing vector")
    {
        const Schedule none{std::vector<int>(4, Schedule::kNone)};
        for (double lambda : {0.5, 3.0, 10.0}) {
            const ThetaValue t = s.estimator.theta(none, 2, lambda, hd);
            CHECK(t.value == doctest::Approx(-lambda * s.derived.tau_ce(2)));
            CHECK(t.std_error == 0.0);
        }
    }
    SUBCASE("huge threshold")
    {
        const double lambda = 1e6;
        CHECK(s.estimator.theta(a, 4, lambda, hd).value == doctest::Approx(-lambda * s.derived.tau_ce(4)));
    }
}

TEST_CASE("pooled theta agrees with fresh sampling")
{
    const Setup s(fixture::desk(), 2000, 7);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Matrix<cplx> hd = rayleigh_direct(s, 2 + seed, 100 + seed);
        const Schedule a = greedy_schedule(hd);
        for (int level : {1, 6}) {
            const double lambda = 10.0 + 5.0 * static_cast<double>(seed);
            Rng rng = make_stream(seed, StreamTag::Validation, 2);
            const ThetaValue fresh = theta_fresh(a, level, lambda, hd, s.config, s.derived, 2000, rng);
            const ThetaValue pooled = s.estimator.theta(a, level, lambda, hd);
            const double se = std::hypot(fresh.std_error, pooled.std_error);
            CHECK(std::abs(fresh.value - pooled.value) <= 4.0 * se + 1e-12);
        }
    }
}

TEST_CASE("pool is hierarchical")
{
    const Setup s(fixture::desk(), 50);
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t c = 0; c < 4; ++c) {
            for (int level = 1; level < 6; ++level) {
                CHECK(s.pool->sum(level, i, c) <= s.pool->sum(level + 1, i, c) * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("theta is nondecreasing in the direct magnitudes")
{
    const Setup s(fixture::desk(), 300);
    Rng rng = make_stream(33, StreamTag::Validation);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    for (int t = 0; t < 50; ++t) {
        const Matrix<cplx> hd = rayleigh_direct(s, 3, 200 + static_cast<std::uint64_t>(t));
        const Schedule a = greedy_schedule(hd);
        Matrix<cplx> up = hd;
        const std::size_t k = rng() % 3;
        const std::size_t c = rng() % 4;
        up(k, c) *= u(rng);
        const double lambda = 5.0 + static_cast<double>(t % 10) * 3.0;
        for (int level : {1, 4, 6}) {
            CHECK(s.estimator.theta(a, level, lambda, up).value >=
                  s.estimator.theta(a, level, lambda, hd).value - 1e-15);
        }
    }
}

TEST_CASE("best probe level")
{
    SUBCASE("single level")
    {
        SystemConfig c = fixture::desk();
        c.max_grouping_level = 1;
        c.n_elements = 2;
        const Setup s(c, 100);
        const Matrix<cplx> hd = rayleigh_direct(s, 2, 3);
        CHECK(best_probe(s.estimator, 4.0, hd, greedy_schedule(hd)).level == 1);
    }
    SUBCASE("negligible pilot cost picks the finest grouping")
    {
        SystemConfig c = fixture::desk();
        c.pilot_duration_s = 1e-15;
        const Setup s(c, 300);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Matrix<cplx> hd = rayleigh_direct(s, 1 + seed % 5, 40 + seed);
            const Schedule a = greedy_schedule(hd);
            CHECK(best_probe(s.estimator, 0.0, hd, a).level == 6);
            CHECK(best_probe(s.estimator, 1.0, hd, a).level == 6);
        }
    }
    SUBCASE("coherence time barely above the finest probe")
    {
        SystemConfig c = fixture::desk();
        c.coherence_time_s = 1.3e-3; // tau_CE(6) = 1.28 ms
        const Setup s(c, 300);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Matrix<cplx> hd = rayleigh_direct(s, 3, 60 + seed);
            const auto choice = best_probe(s.estimator, 1.0, hd, greedy_schedule(hd));
            CHECK(choice.level < 6);
        }
    }
    SUBCASE("no surface")
    {
        SystemConfig c = fixture::desk();
        c.ris_enabled = false;
        const Setup s(c, 10);
        const Matrix<cplx> hd = rayleigh_direct(s, 2, 3);
        CHECK(best_probe(s.estimator, 1.0, hd, greedy_schedule(hd)).theta ==
              -std::numeric_limits<double>::infinity());
    }
}

TEST_CASE("first layer rule")
{
    const DerivedParams d = validate(fixture::desk());
    const ThetaEstimator zero(d, zero_pool(6, 4));

    SUBCASE("silent channels skip for any positive threshold")
    {
        const Matrix<cplx> hd(3, 4, cplx(0.0, 0.0));
        for (double lambda : {1e-6, 1.0, 50.0}) {
            const Layer1Result r = decide_layer1(zero, lambda, hd);
            CHECK(r.direct_rate == 0.0);
            CHECK(r.decision.layer1 == Layer1::Skip);
        }
    }
    SUBCASE("ties favor transmitting now")
    {
        const Matrix<cplx> hd(3, 4, cplx(0.0, 0.0));
        const Layer1Result r = decide_layer1(zero, 0.0, hd);
        CHECK(r.theta_bar == 0.0);
        CHECK(r.decision.layer1 == Layer1::TransmitDirect);

        Matrix<cplx> one(1, 4, cplx(0.0, 0.0));
        one(0, 2) = 1e-4;
        const double rd = link_rate(d.mean_snr, 1e-4);
        const Layer1Result at = decide_layer1(zero, rd, one);
        CHECK(at.direct_rate == rd);
        CHECK(at.decision.layer1 == Layer1::TransmitDirect);
    }
    SUBCASE("literal inequalities on sampled channels")
    {
        const Setup s(fixture::desk(), 200);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const Matrix<cplx> hd = rayleigh_direct(s, 1 + seed % 6, 300 + seed);
            const double lambda = 2.0 + static_cast<double>(seed % 13) * 2.0;
            const Layer1Result r = decide_layer1(s.estimator, lambda, hd);
            const double direct = (r.direct_rate - lambda) * s.derived.coherence_time;
            switch (r.decision.layer1) {
            case Layer1::TransmitDirect:
                CHECK(direct >= std::max(r.theta_bar, 0.0));
                break;
            case Layer1::Skip:
                CHECK(std::max(direct, r.theta_bar) < 0.0);
                break;
            case Layer1::Probe:
                CHECK(r.decision.probe_level >= 1);
                CHECK(r.decision.probe_level <= 6);
                CHECK(r.theta_bar > direct);
                CHECK(r.theta_bar >= 0.0);
                CHECK_NOTHROW(check_schedule(r.decision.schedule, hd.rows(), hd.cols()));
                break;
            }
        }
    }
    SUBCASE("large direct gains transmit directly")
    {
        Matrix<cplx> hd(2, 4, cplx(1.0, 0.0));
        CHECK(decide_layer1(zero, 10.0, hd).decision.layer1 == Layer1::TransmitDirect);
    }
}

TEST_CASE("second layer rule")
{
    CHECK(decide_layer2(3.5, 3.5) == Layer2::TransmitRis);
    CHECK(decide_layer2(3.5, 0.0) == Layer2::Skip);
    CHECK(decide_layer2(0.0, 0.0) == Layer2::TransmitRis);
    CHECK(decide_layer2(0.0, 7.0) == Layer2::TransmitRis);
}

TEST_CASE("deterministic fixed point")
{
    const SystemConfig c = fixture::deterministic();
    const DerivedParams d = validate(c);
    auto pool = std::make_shared<CascadePool>(c, d, 4, 1);
    const FixedPointModel model(c, d, McParams{4, 4}, pool, 1);
    const double rate = std::log2(1.0 + d.mean_snr * 1e-9);
    CHECK(rate == doctest::Approx(2.3164561796262597).epsilon(1e-12));
    const double expected = rate * 0.024 / 0.0243;
    CHECK(expected == doctest::Approx(2.2878579551864293).epsilon(1e-12));

    const OfflineSolution sol = solve_lambda(model, SolverSettings{});
    CHECK(sol.lambda_star == doctest::Approx(expected).epsilon(1e-5));
    CHECK(sol.residual <= 2e-6 * (d.rr_duration + d.coherence_time));
    CHECK(sol.pmf_sum == doctest::Approx(1.0));
}

TEST_CASE("solver contract at desk scale")
{
    const SystemConfig c = fixture::desk();
    const DerivedParams d = validate(c);
    auto pool = std::make_shared<CascadePool>(c, d, 120, 3);
    const FixedPointModel model(c, d, McParams{120, 60}, pool, 3);

    SUBCASE("residual and monotone excess")
    {
        const OfflineSolution sol = solve_lambda(model, SolverSettings{});
        CHECK(sol.residual <= 2.0 * 1e-6 * (d.rr_duration + d.coherence_time));
        CHECK(sol.trace.size() == static_cast<std::size_t>(sol.iterations) + 1);
        double previous = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 10; ++i) {
            const double lambda = 0.2 * sol.lambda_star * (1 + i);
            const double g = model.excess(lambda, ActionSet::full());
            CHECK(g < previous);
            previous = g;
        }
    }
    SUBCASE("starting at zero climbs monotonically")
    {
        SolverSettings st;
        st.initial_lambda = 0.0;
        const OfflineSolution sol = solve_lambda(model, st);
        for (std::size_t i = 1; i < sol.trace.size(); ++i) {
            CHECK(sol.trace[i] >= sol.trace[i - 1]);
        }
    }
    SUBCASE("restricted action sets never beat the full one")
    {
        const double full = solve_lambda(model, SolverSettings{}).lambda_star;
        for (int level : {1, 6}) {
            const double restricted = solve_lambda(model, SolverSettings{}, ActionSet::forced_probe(level)).lambda_star;
            CHECK(restricted <= full + 1e-6);
        }
    }
    SUBCASE("step size outside the admissible interval")
    {
        SolverSettings st;
        st.step = 2.0 / (d.rr_duration + d.coherence_time);
        try {
            solve_lambda(model, st);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::StepSizeOutOfRange);
            CHECK(std::string(e.what()).find("[1e-06, ") != std::string::npos);
        }
    }
    SUBCASE("iteration cap keeps the partial trace")
    {
        SolverSettings st;
        st.max_iterations = 2;
        try {
            solve_lambda(model, st);
            FAIL("expected throw");
        } catch (const SolverError& e) {
            CHECK(e.kind() == ErrorKind::MaxIterationsExceeded);
            CHECK(e.partial().trace.size() == 3);
        }
    }
    SUBCASE("weights")
    {
        CHECK(model.max_granted() == 8);
        CHECK(model.pmf_mass() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK_THROWS_AS(model.lambda_term(0, 1.0, ActionSet::full()), Error);
        CHECK_THROWS_AS(model.lambda_term(9, 1.0, ActionSet::full()), Error);
    }
}

TEST_CASE("more preambles than users")
{
    SystemConfig c = fixture::desk();
    c.n_users = 3;
    c.n_preambles = 8;
    const DerivedParams d = validate(c);
    auto pool = std::make_shared<CascadePool>(c, d, 20, 1);
    const FixedPointModel model(c, d, McParams{20, 10}, pool, 1);
    CHECK(model.max_granted() == 3);
    CHECK(model.pmf_mass() <= 1.0 + 1e-12);
}

TEST_CASE("solution file round trip")
{
    OfflineSolution s;
    s.strategy = "OPTSTOP_FULLARRAY";
    s.lambda_star = 12.345678901234567;
    s.iterations = 17;
    s.residual = 3e-9;
    s.step_size = 41.15;
    s.accuracy = 1e-6;
    s.trace = {1.0, 5.0, 12.3};
    s.seed = 99;
    s.n_cascade_samples = 300;
    s.n_outer_samples = 200;
    s.pmf_sum = 1.0;
    s.config_hash = 0xfedcba9876543210ULL;
    const std::string path = "strategy_roundtrip.json";
    save_solution(path, s);
    const OfflineSolution back = load_solution(path);
    std::remove(path.c_str());
    CHECK(back.strategy == s.strategy);
    CHECK(back.lambda_star == s.lambda_star);
    CHECK(back.trace == s.trace);
    CHECK(back.config_hash == s.config_hash);
    CHECK(back.seed == 99);
    CHECK_THROWS_AS(load_solution("does/not/exist.json"), Error);
}
