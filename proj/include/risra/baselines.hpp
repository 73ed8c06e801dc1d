#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "risra/strategy.hpp"

namespace risra {

enum class StrategyKind {
    Proposed,
    DirectOnly,
    DirectRisFull,
    OptstopElementwise,
    OptstopFullarray,
};

std::string_view to_string(StrategyKind kind);
/// Accepts the upper-case tags (PROPOSED, DIRECT_ONLY, ...), case-insensitive.
StrategyKind parse_strategy(std::string_view tag);
std::vector<StrategyKind> all_strategies();

/// True when the strategy needs a threshold from the fixed-point solver.
bool needs_lambda(StrategyKind kind);

/// Action set of the fixed point that yields the strategy's threshold.
ActionSet action_set(StrategyKind kind, int max_level);

/// Grouping level a fixed-grouping strategy always probes at (0 for the others).
int fixed_level(StrategyKind kind, int max_level);

/// What the BS knows right after a nonempty RR phase.
struct FrameContext {
    const Matrix<cplx>& direct;
    double snr;
};

/// Always transmit over the direct links with the greedy schedule.
Decision run_direct_only(const FrameContext& ctx);

/// Always probe at level 1 and transmit RIS-aided.
Decision run_direct_ris_full(const FrameContext& ctx);

/// Always probe at `level`; the second layer stops iff R_r >= lambda.
Decision run_optstop_fixed_grouping(const FrameContext& ctx, int level);

/// Decision function of one strategy, shared by the simulator for every
/// strategy so that only the decision differs between them.
class Policy {
public:
    /// `estimator` is required for Proposed and ignored otherwise.
    Policy(StrategyKind kind, double lambda, int max_level,
           std::shared_ptr<const ThetaEstimator> estimator = nullptr);

    StrategyKind kind() const noexcept { return kind_; }
    double lambda() const noexcept { return lambda_; }

    Decision first_layer(const Matrix<cplx>& direct, double snr) const;
    Layer2 second_layer(double ris_rate) const;

private:
    StrategyKind kind_;
    double lambda_;
    int max_level_;
    std::shared_ptr<const ThetaEstimator> estimator_;
};

} // namespace risra
