#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "risra/channel.hpp"
#include "risra/error.hpp"
#include "risra/phy.hpp"

namespace risra {

struct McParams {
    /// Cascade samples behind every Theta estimate.
    std::size_t n_cascade_samples = 300;
    /// Direct-channel samples per granted count I in the offline solver.
    std::size_t n_outer_samples = 300;
};

/// Frozen common-random-number pool of RIS magnitude sums
/// S_{c,J} = sum_u |h_u^J| for every level J and sub-channel c.
///
/// Sample s draws M cascaded products per sub-channel from the keyed stream
/// (seed, CascadePool, s); coarser levels are pairwise sums of finer ones, so
/// the pool is hierarchically consistent across J. Given h_d, the RIS-aided
/// rate on a sub-channel depends on the cascaded gains only through S_{c,J},
/// whose law does not depend on h_d, so one pool serves every decision.
class CascadePool {
public:
    CascadePool(const SystemConfig& config, const DerivedParams& derived, std::size_t n_samples,
                std::uint64_t seed, unsigned threads = 1);

    /// Pool with caller-provided sums, laid out [level][sample * C + c]
    /// (level 0 unused). Used to build degenerate pools in tests.
    CascadePool(std::size_t n_samples, std::size_t n_channels, std::vector<std::vector<double>> sums,
                bool enabled = true);

    bool enabled() const noexcept { return enabled_; }
    std::size_t size() const noexcept { return n_samples_; }
    std::size_t n_channels() const noexcept { return n_channels_; }
    int max_level() const noexcept { return static_cast<int>(sums_.size()) - 1; }

    double sum(int level, std::size_t sample, std::size_t channel) const
    {
        return sums_[static_cast<std::size_t>(level)][sample * n_channels_ + channel];
    }

private:
    std::size_t n_samples_ = 0;
    std::size_t n_channels_ = 0;
    bool enabled_ = true;
    std::vector<std::vector<double>> sums_;
};

struct ThetaValue {
    double value = 0.0;
    double std_error = 0.0;
};

/// max{T_r R - lambda T_c, -lambda tau}: the option-3 reward of one sample.
/// The first branch wins exactly when R >= lambda.
inline double probe_reward(double rate, double lambda, double coherence_time, double probe_time)
{
    const double transmit = (coherence_time - probe_time) * rate - lambda * coherence_time;
    const double wait = -lambda * probe_time;
    return transmit > wait ? transmit : wait;
}

/// Theta estimates backed by a CascadePool.
class ThetaEstimator {
public:
    ThetaEstimator(const DerivedParams& derived, std::shared_ptr<const CascadePool> pool);

    const DerivedParams& derived() const noexcept { return derived_; }
    const CascadePool& pool() const noexcept { return *pool_; }
    bool ris_available() const noexcept { return pool_->enabled(); }

    /// R_r of every pool sample for schedule b at `level`, conditioned on h_d.
    std::vector<double> rates(const Schedule& b, int level, const Matrix<cplx>& direct) const;

    /// Theta_(b,J)(lambda, h_d): pool mean of probe_reward.
    ThetaValue theta(const Schedule& b, int level, double lambda, const Matrix<cplx>& direct) const;

private:
    DerivedParams derived_;
    std::shared_ptr<const CascadePool> pool_;
};

/// Theta by fresh Monte-Carlo: draws n_samples cascaded realizations for the
/// probed (user, channel) pairs, groups them at `level` and applies the
/// closed-form phases. Independent of CascadePool.
ThetaValue theta_fresh(const Schedule& b, int level, double lambda, const Matrix<cplx>& direct,
                       const SystemConfig& config, const DerivedParams& derived, std::size_t n_samples,
                       Rng& rng);

struct ProbeChoice {
    int level = 0;
    double theta = 0.0;
    double std_error = 0.0;
};

/// argmax_J Theta_(a*,J)(lambda, h_d) with common random numbers across J.
/// Ties keep the lowest level. When the RIS is disabled, theta is -inf.
ProbeChoice best_probe(const ThetaEstimator& estimator, double lambda, const Matrix<cplx>& direct,
                       const Schedule& a_star);

enum class Layer1 { TransmitDirect, Skip, Probe };
enum class Layer2 { TransmitRis, Skip };

const char* to_string(Layer1 action);
const char* to_string(Layer2 action);

struct Decision {
    Layer1 layer1 = Layer1::Skip;
    int probe_level = 0; // set for Probe
    Schedule schedule;   // a* (used for DT or as the probing vector)
    std::optional<Layer2> layer2;
};

struct Layer1Result {
    Decision decision;
    double direct_rate = 0.0; // R_d*
    double theta_bar = 0.0;   // max_J Theta (or -inf)
};

/// First-layer rule at threshold lambda:
///   TransmitDirect if (R_d* - lambda) T_c >= max{theta_bar, 0},
///   Skip           if max{(R_d* - lambda) T_c, theta_bar} < 0,
///   Probe(J*, a*)  otherwise.
/// Throws EmptyGrantSet when `direct` has no rows.
Layer1Result decide_layer1(const ThetaEstimator& estimator, double lambda, const Matrix<cplx>& direct);

/// TransmitRis iff R_r >= lambda.
Layer2 decide_layer2(double lambda, double ris_rate);

/// Which actions the renewal-reward fixed point optimizes over.
struct ActionSet {
    enum class Kind {
        /// Direct DT, skip, or probe at any level then stop/skip.
        Full,
        /// Always probe at `level` after a nonempty RR, then stop/skip.
        ForcedProbe,
    };
    Kind kind = Kind::Full;
    int level = 0;

    static ActionSet full() { return {}; }
    static ActionSet forced_probe(int level) { return {Kind::ForcedProbe, level}; }
};

struct SolverSettings {
    double accuracy = 1e-6;
    /// Step size; 0 selects 1 / (tau_RA + T_c).
    double step = 0.0;
    int max_iterations = 100000;
    double initial_lambda = 1.0;
};

struct OfflineSolution {
    std::string strategy = "PROPOSED";
    double lambda_star = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double step_size = 0.0;
    double accuracy = 0.0;
    std::vector<double> trace; // lambda_0, lambda_1, ...
    std::uint64_t seed = 0;
    std::size_t n_cascade_samples = 0;
    std::size_t n_outer_samples = 0;
    double pmf_sum = 0.0;       // sum of p_I over I = 0..min(S, K)
    std::uint64_t config_hash = 0;
};

class SolverError : public Error {
public:
    SolverError(ErrorKind kind, const std::string& what, OfflineSolution partial)
        : Error(kind, what), partial_(std::move(partial))
    {
    }
    const OfflineSolution& partial() const noexcept { return partial_; }

private:
    OfflineSolution partial_;
};

/// Frozen Monte-Carlo model of G(lambda) = sum_I p_I Lambda_I(lambda) - lambda tau_RA.
///
/// For every granted count I = 1..min(S, K) it holds n_outer direct-channel
/// draws (stream (seed, DirectPool, I, o)), their greedy schedule a*, R_d*,
/// and the pool rates R_r for every level, so G is a deterministic function
/// of lambda.
class FixedPointModel {
public:
    FixedPointModel(const SystemConfig& config, const DerivedParams& derived, const McParams& mc,
                    std::shared_ptr<const CascadePool> pool, std::uint64_t seed, unsigned threads = 1);

    const DerivedParams& derived() const noexcept { return derived_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    int max_granted() const noexcept { return max_granted_; }
    /// sum of p_I over I = 0..max_granted(); below 1 only when S > K.
    double pmf_mass() const noexcept { return pmf_mass_; }

    /// Lambda_I(lambda) for 1 <= granted <= max_granted().
    double lambda_term(int granted, double lambda, const ActionSet& actions) const;

    /// sum_I p_I Lambda_I(lambda) - lambda tau_RA.
    double excess(double lambda, const ActionSet& actions) const;

private:
    struct OuterSample {
        double direct_rate = 0.0;
        std::vector<std::vector<float>> rates; // [level][pool sample]
    };

    DerivedParams derived_;
    bool ris_ = true;
    int max_granted_ = 0;
    double pmf_mass_ = 0.0;
    std::vector<double> weights_;                 // p_I, index I
    std::vector<std::vector<OuterSample>> outer_; // [I][o]
};

/// Lower and upper admissible step sizes: [eps, (2 - eps) / (tau_RA + T_c)].
std::pair<double, double> step_bounds(const DerivedParams& derived, double accuracy);

/// Iterates lambda_{l+1} = lambda_l + alpha G(lambda_l) until
/// |lambda_{l+1} - lambda_l| < accuracy. Throws StepSizeOutOfRange or
/// SolverError(MaxIterationsExceeded) carrying the trace.
OfflineSolution solve_lambda(const FixedPointModel& model, const SolverSettings& settings,
                             const ActionSet& actions = ActionSet::full());

void save_solution(const std::string& path, const OfflineSolution& solution);
OfflineSolution load_solution(const std::string& path);

} // namespace risra
