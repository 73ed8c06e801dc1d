#include "risra/baselines.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fmt/core.h>

#include "risra/error.hpp"

namespace risra {

namespace {

constexpr std::array<std::pair<StrategyKind, std::string_view>, 5> kTags{{
    {StrategyKind::Proposed, "PROPOSED"},
    {StrategyKind::DirectOnly, "DIRECT_ONLY"},
    {StrategyKind::DirectRisFull, "DIRECT_RIS_FULL"},
    {StrategyKind::OptstopElementwise, "OPTSTOP_ELEMENTWISE"},
    {StrategyKind::OptstopFullarray, "OPTSTOP_FULLARRAY"},
}};

} // namespace

std::string_view to_string(StrategyKind kind)
{
    for (const auto& [k, tag] : kTags) {
        if (k == kind) {
            return tag;
        }
    }
    return "?";
}

StrategyKind parse_strategy(std::string_view tag)
{
    std::string upper(tag);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    for (const auto& [k, t] : kTags) {
        if (t == upper) {
            return k;
        }
    }
    throw Error(ErrorKind::Config, fmt::format("unknown strategy '{}'", tag));
}

std::vector<StrategyKind> all_strategies()
{
    std::vector<StrategyKind> out;
    for (const auto& entry : kTags) {
        out.push_back(entry.first);
    }
    return out;
}

bool needs_lambda(StrategyKind kind)
{
    return kind == StrategyKind::Proposed || kind == StrategyKind::OptstopElementwise ||
           kind == StrategyKind::OptstopFullarray;
}

int fixed_level(StrategyKind kind, int max_level)
{
    switch (kind) {
    case StrategyKind::OptstopElementwise: return max_level;
    case StrategyKind::OptstopFullarray:
    case StrategyKind::DirectRisFull: return 1;
    default: return 0;
    }
}

ActionSet action_set(StrategyKind kind, int max_level)
{
    switch (kind) {
    case StrategyKind::OptstopElementwise:
    case StrategyKind::OptstopFullarray: return ActionSet::forced_probe(fixed_level(kind, max_level));
    case StrategyKind::Proposed: return ActionSet::full();
    default:
        throw Error(ErrorKind::Config,
                    fmt::format("strategy {} has no fixed-point threshold", to_string(kind)));
    }
}

Decision run_direct_only(const FrameContext& ctx)
{
    Decision d;
    d.layer1 = Layer1::TransmitDirect;
    d.schedule = greedy_schedule(ctx.direct);
    return d;
}

Decision run_direct_ris_full(const FrameContext& ctx)
{
    return run_optstop_fixed_grouping(ctx, 1);
}

Decision run_optstop_fixed_grouping(const FrameContext& ctx, int level)
{
    Decision d;
    d.layer1 = Layer1::Probe;
    d.probe_level = level;
    d.schedule = greedy_schedule(ctx.direct);
    return d;
}

Policy::Policy(StrategyKind kind, double lambda, int max_level,
               std::shared_ptr<const ThetaEstimator> estimator)
    : kind_(kind), lambda_(lambda), max_level_(max_level), estimator_(std::move(estimator))
{
    if (kind_ == StrategyKind::Proposed && !estimator_) {
        throw Error(ErrorKind::Config, "the proposed strategy needs a Theta estimator");
    }
    if (needs_lambda(kind_) && !(lambda_ >= 0.0)) {
        throw Error(ErrorKind::MissingLambdaStar,
                    fmt::format("strategy {} needs a threshold >= 0, got {}", to_string(kind_), lambda_));
    }
}

Decision Policy::first_layer(const Matrix<cplx>& direct, double snr) const
{
    const FrameContext ctx{direct, snr};
    switch (kind_) {
    case StrategyKind::Proposed: return decide_layer1(*estimator_, lambda_, direct).decision;
    case StrategyKind::DirectOnly: return run_direct_only(ctx);
    case StrategyKind::DirectRisFull: return run_direct_ris_full(ctx);
    case StrategyKind::OptstopElementwise:
    case StrategyKind::OptstopFullarray:
        return run_optstop_fixed_grouping(ctx, fixed_level(kind_, max_level_));
    }
    throw Error(ErrorKind::Config, "unhandled strategy");
}

Layer2 Policy::second_layer(double ris_rate) const
{
    if (kind_ == StrategyKind::DirectRisFull) {
        return Layer2::TransmitRis;
    }
    return decide_layer2(lambda_, ris_rate);
}

} // namespace risra
