#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "risra/baselines.hpp"
#include "risra/error.hpp"

using namespace risra;

TEST_CASE("strategy tags")
{
    for (StrategyKind k : all_strategies()) {
        CHECK(parse_strategy(to_string(k)) == k);
    }
    CHECK(parse_strategy("optstop_elementwise") == StrategyKind::OptstopElementwise);
    CHECK_THROWS_AS(parse_strategy("GREEDY"), Error);
    CHECK(all_strategies().size() == 5);
}

TEST_CASE("fixed grouping levels")
{
    CHECK(fixed_level(StrategyKind::OptstopElementwise, 10) == 10);
    CHECK(fixed_level(StrategyKind::OptstopFullarray, 10) == 1);
    CHECK(fixed_level(StrategyKind::Proposed, 10) == 0);
    CHECK(action_set(StrategyKind::OptstopElementwise, 6).level == 6);
    CHECK(action_set(StrategyKind::Proposed, 6).kind == ActionSet::Kind::Full);
    CHECK_THROWS_AS(action_set(StrategyKind::DirectOnly, 6), Error);
}

TEST_CASE("baseline first layers")
{
    Matrix<cplx> hd(2, 3);
    hd(0, 0) = 0.1;
    hd(1, 2) = 0.4;
    const FrameContext ctx{hd, 1.0};

    const Decision direct = run_direct_only(ctx);
    CHECK(direct.layer1 == Layer1::TransmitDirect);
    CHECK(direct.schedule == greedy_schedule(hd));

    const Decision full = run_direct_ris_full(ctx);
    CHECK(full.layer1 == Layer1::Probe);
    CHECK(full.probe_level == 1);

    const Decision fixed = run_optstop_fixed_grouping(ctx, 5);
    CHECK(fixed.layer1 == Layer1::Probe);
    CHECK(fixed.probe_level == 5);
    CHECK(fixed.schedule == greedy_schedule(hd));
}

TEST_CASE("policy dispatch")
{
    Matrix<cplx> hd(1, 4, cplx(0.01, 0.0));
    const Policy elementwise(StrategyKind::OptstopElementwise, 3.0, 6);
    CHECK(elementwise.first_layer(hd, 1e9).probe_level == 6);
    CHECK(elementwise.second_layer(3.0) == Layer2::TransmitRis);
    CHECK(elementwise.second_layer(2.9) == Layer2::Skip);

    const Policy full(StrategyKind::DirectRisFull, std::nan(""), 6);
    CHECK(full.first_layer(hd, 1e9).probe_level == 1);
    CHECK(full.second_layer(0.0) == Layer2::TransmitRis);

    const Policy direct(StrategyKind::DirectOnly, std::nan(""), 6);
    CHECK(direct.first_layer(hd, 1e9).layer1 == Layer1::TransmitDirect);
}

TEST_CASE("threshold strategies need a threshold")
{
    try {
        Policy p(StrategyKind::OptstopFullarray, std::nan(""), 6);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingLambdaStar);
    }
    CHECK_THROWS_AS(Policy(StrategyKind::OptstopFullarray, -1.0, 6), Error);
    CHECK_THROWS_AS(Policy(StrategyKind::Proposed, 1.0, 6), Error); // no estimator
}

TEST_CASE("restricted thresholds sit below the proposed one")
{
    const SystemConfig c = fixture::desk();
    const DerivedParams d = validate(c);
    auto pool = std::make_shared<CascadePool>(c, d, 150, 2);
    const FixedPointModel model(c, d, McParams{150, 80}, pool, 2);
    const double proposed = solve_lambda(model, {}, action_set(StrategyKind::Proposed, 6)).lambda_star;
    for (StrategyKind k : {StrategyKind::OptstopElementwise, StrategyKind::OptstopFullarray}) {
        CHECK(solve_lambda(model, {}, action_set(k, 6)).lambda_star <= proposed + 1e-6);
    }
}

TEST_CASE("free probing makes element-wise probing optimal")
{
    SystemConfig c = fixture::desk();
    c.pilot_duration_s = 1e-15;
    const DerivedParams d = validate(c);
    auto pool = std::make_shared<CascadePool>(c, d, 150, 4);
    const FixedPointModel model(c, d, McParams{150, 80}, pool, 4);
    const double proposed = solve_lambda(model, {}).lambda_star;
    const double elementwise =
        solve_lambda(model, {}, action_set(StrategyKind::OptstopElementwise, 6)).lambda_star;
    CHECK(elementwise == doctest::Approx(proposed).epsilon(1e-4));
}
