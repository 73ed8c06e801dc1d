#include "risra/strategy.hpp"

#include <cmath>
#include <fmt/core.h>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "risra/contention.hpp"
#include "risra/error.hpp"
#include "risra/parallel.hpp"

namespace risra {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Welford accumulator: exact zero spread for constant samples.
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    ThetaValue value() const
    {
        const double nd = static_cast<double>(n);
        const double var = n > 1 ? m2 / (nd - 1.0) : 0.0;
        return {mean, std::sqrt(var / nd)};
    }
};

} // namespace

// --- CascadePool -----------------------------------------------------------

CascadePool::CascadePool(const SystemConfig& config, const DerivedParams& derived,
                         std::size_t n_samples, std::uint64_t seed, unsigned threads)
    : n_samples_(n_samples),
      n_channels_(static_cast<std::size_t>(config.n_subchannels)),
      enabled_(config.ris_enabled)
{
    if (n_samples == 0) {
        throw Error(ErrorKind::NonPositiveParameter, "n_cascade_samples must be >= 1");
    }
    const int max_level = derived.max_level;
    sums_.assign(static_cast<std::size_t>(max_level) + 1,
                 std::vector<double>(n_samples * n_channels_, 0.0));
    if (!enabled_) {
        return;
    }
    const auto n_elements = static_cast<std::size_t>(derived.n_elements);
    parallel_for(n_samples, threads, [&](std::size_t s) {
        Rng rng = make_stream(seed, StreamTag::CascadePool, s);
        std::vector<cplx> level_gains(n_elements);
        for (std::size_t c = 0; c < n_channels_; ++c) {
            sample_cascaded(rng, config, derived, level_gains);
            std::size_t width = n_elements;
            for (int level = max_level; level >= 1; --level) {
                if (level < max_level) {
                    width /= 2;
                    for (std::size_t u = 0; u < width; ++u) {
                        level_gains[u] = level_gains[2 * u] + level_gains[2 * u + 1];
                    }
                }
                double total = 0.0;
                for (std::size_t u = 0; u < width; ++u) {
                    total += std::abs(level_gains[u]);
                }
                sums_[static_cast<std::size_t>(level)][s * n_channels_ + c] = total;
            }
        }
    });
}

CascadePool::CascadePool(std::size_t n_samples, std::size_t n_channels,
                         std::vector<std::vector<double>> sums, bool enabled)
    : n_samples_(n_samples), n_channels_(n_channels), enabled_(enabled), sums_(std::move(sums))
{
    if (n_samples == 0 || sums_.size() < 2) {
        throw Error(ErrorKind::NonPositiveParameter, "cascade pool needs samples and levels");
    }
    for (std::size_t level = 1; level < sums_.size(); ++level) {
        if (sums_[level].size() != n_samples * n_channels) {
            throw Error(ErrorKind::Config, "cascade pool level has the wrong size");
        }
    }
}

// --- Theta -----------------------------------------------------------------

ThetaEstimator::ThetaEstimator(const DerivedParams& derived, std::shared_ptr<const CascadePool> pool)
    : derived_(derived), pool_(std::move(pool))
{
    if (pool_->max_level() != derived_.max_level) {
        throw Error(ErrorKind::LevelOutOfRange, "cascade pool levels do not match the configuration");
    }
}

std::vector<double> ThetaEstimator::rates(const Schedule& b, int level, const Matrix<cplx>& direct) const
{
    check_schedule(b, direct.rows(), direct.cols());
    derived_.tau_ce(level); // range check
    if (direct.cols() != pool_->n_channels()) {
        throw Error(ErrorKind::InvalidSchedule, "direct gains and cascade pool disagree on C");
    }
    std::vector<std::size_t> channels;
    std::vector<double> magnitudes;
    for (std::size_t c = 0; c < b.assignment.size(); ++c) {
        if (b.assignment[c] != Schedule::kNone) {
            channels.push_back(c);
            magnitudes.push_back(std::abs(direct(static_cast<std::size_t>(b.assignment[c]), c)));
        }
    }
    const double snr = derived_.mean_snr;
    std::vector<double> out(pool_->size(), 0.0);
    for (std::size_t s = 0; s < out.size(); ++s) {
        double rate = 0.0;
        for (std::size_t i = 0; i < channels.size(); ++i) {
            rate += link_rate(snr, magnitudes[i] + pool_->sum(level, s, channels[i]));
        }
        out[s] = rate;
    }
    return out;
}

ThetaValue ThetaEstimator::theta(const Schedule& b, int level, double lambda,
                                 const Matrix<cplx>& direct) const
{
    const double probe = derived_.tau_ce(level);
    Moments m;
    for (double rate : rates(b, level, direct)) {
        m.add(probe_reward(rate, lambda, derived_.coherence_time, probe));
    }
    return m.value();
}

ThetaValue theta_fresh(const Schedule& b, int level, double lambda, const Matrix<cplx>& direct,
                       const SystemConfig& config, const DerivedParams& derived, std::size_t n_samples,
                       Rng& rng)
{
    check_schedule(b, direct.rows(), direct.cols());
    const double probe = derived.tau_ce(level);
    if (n_samples == 0) {
        throw Error(ErrorKind::NonPositiveParameter, "n_samples must be >= 1");
    }
    const auto groups = std::size_t{1} << level;
    std::vector<cplx> elements(static_cast<std::size_t>(derived.n_elements));
    std::vector<cplx> grouped(groups);
    Moments m;
    for (std::size_t s = 0; s < n_samples; ++s) {
        double rate = 0.0;
        for (std::size_t c = 0; c < b.assignment.size(); ++c) {
            const int user = b.assignment[c];
            if (user == Schedule::kNone) {
                continue;
            }
            sample_cascaded(rng, config, derived, elements);
            group_elements(elements, level, grouped);
            const cplx hd = direct(static_cast<std::size_t>(user), c);
            const auto phases = optimal_phases(hd, grouped);
            rate += link_rate(derived.mean_snr, std::abs(combined_gain(hd, grouped, phases)));
        }
        m.add(probe_reward(rate, lambda, derived.coherence_time, probe));
    }
    return m.value();
}

ProbeChoice best_probe(const ThetaEstimator& estimator, double lambda, const Matrix<cplx>& direct,
                       const Schedule& a_star)
{
    ProbeChoice best{0, kNegInf, 0.0};
    if (!estimator.ris_available()) {
        return best;
    }
    for (int level = 1; level <= estimator.derived().max_level; ++level) {
        const ThetaValue t = estimator.theta(a_star, level, lambda, direct);
        if (t.value > best.theta) {
            best = {level, t.value, t.std_error};
        }
    }
    return best;
}

// --- decisions ---------------------------------------------------------------

const char* to_string(Layer1 action)
{
    switch (action) {
    case Layer1::TransmitDirect: return "TRANSMIT_DIRECT";
    case Layer1::Skip: return "SKIP";
    case Layer1::Probe: return "PROBE";
    }
    return "?";
}

const char* to_string(Layer2 action)
{
    return action == Layer2::TransmitRis ? "TRANSMIT_RIS" : "SKIP";
}

Layer1Result decide_layer1(const ThetaEstimator& estimator, double lambda, const Matrix<cplx>& direct)
{
    Layer1Result out;
    out.decision.schedule = greedy_schedule(direct);
    out.direct_rate = direct_sum_rate(out.decision.schedule, direct, estimator.derived().mean_snr);
    const ProbeChoice probe = best_probe(estimator, lambda, direct, out.decision.schedule);
    out.theta_bar = probe.theta;

    const double direct_reward = (out.direct_rate - lambda) * estimator.derived().coherence_time;
    if (direct_reward >= std::max(out.theta_bar, 0.0)) {
        out.decision.layer1 = Layer1::TransmitDirect;
    } else if (std::max(direct_reward, out.theta_bar) < 0.0) {
        out.decision.layer1 = Layer1::Skip;
    } else {
        out.decision.layer1 = Layer1::Probe;
        out.decision.probe_level = probe.level;
    }
    return out;
}

Layer2 decide_layer2(double lambda, double ris_rate)
{
    return ris_rate >= lambda ? Layer2::TransmitRis : Layer2::Skip;
}

// --- offline solver ----------------------------------------------------------

FixedPointModel::FixedPointModel(const SystemConfig& config, const DerivedParams& derived,
                                 const McParams& mc, std::shared_ptr<const CascadePool> pool,
                                 std::uint64_t seed, unsigned threads)
    : derived_(derived), ris_(pool->enabled())
{
    if (mc.n_outer_samples == 0) {
        throw Error(ErrorKind::NonPositiveParameter, "n_outer_samples must be >= 1");
    }
    max_granted_ = std::min(config.n_preambles, config.n_users);
    const GrantedPmf pmf = granted_pmf_closed_form(config.n_users, config.n_preambles);
    weights_.assign(static_cast<std::size_t>(max_granted_) + 1, 0.0);
    for (int i = 0; i <= max_granted_; ++i) {
        weights_[static_cast<std::size_t>(i)] = pmf.p[static_cast<std::size_t>(i)];
        pmf_mass_ += pmf.p[static_cast<std::size_t>(i)];
    }

    const ThetaEstimator estimator(derived, std::move(pool));
    const std::size_t n_outer = mc.n_outer_samples;
    outer_.assign(static_cast<std::size_t>(max_granted_) + 1, {});
    for (auto& v : outer_) {
        v.resize(n_outer);
    }
    const std::size_t n_tasks = static_cast<std::size_t>(max_granted_) * n_outer;
    parallel_for(n_tasks, threads, [&](std::size_t task) {
        const int granted = static_cast<int>(task / n_outer) + 1;
        const std::size_t o = task % n_outer;
        Rng rng = make_stream(seed, StreamTag::DirectPool, static_cast<std::uint64_t>(granted), o);
        const Matrix<cplx> direct = sample_direct(rng, static_cast<std::size_t>(granted), config, derived);
        const Schedule a_star = greedy_schedule(direct);

        OuterSample& sample = outer_[static_cast<std::size_t>(granted)][o];
        sample.direct_rate = direct_sum_rate(a_star, direct, derived.mean_snr);
        sample.rates.resize(static_cast<std::size_t>(derived.max_level) + 1);
        for (int level = 1; level <= derived.max_level; ++level) {
            const auto r = estimator.rates(a_star, level, direct);
            sample.rates[static_cast<std::size_t>(level)].assign(r.begin(), r.end());
        }
    });
}

double FixedPointModel::lambda_term(int granted, double lambda, const ActionSet& actions) const
{
    if (granted < 1 || granted > max_granted_) {
        throw Error(ErrorKind::Config, fmt::format("granted count {} outside [1, {}]", granted, max_granted_));
    }
    const double tc = derived_.coherence_time;
    const auto theta_of = [&](const OuterSample& sample, int level) {
        const double probe = derived_.probe_time[static_cast<std::size_t>(level)];
        const auto& rates = sample.rates[static_cast<std::size_t>(level)];
        double sum = 0.0;
        for (float r : rates) {
            sum += probe_reward(static_cast<double>(r), lambda, tc, probe);
        }
        return sum / static_cast<double>(rates.size());
    };

    const auto& samples = outer_[static_cast<std::size_t>(granted)];
    double total = 0.0;
    for (const OuterSample& sample : samples) {
        if (actions.kind == ActionSet::Kind::ForcedProbe) {
            total += theta_of(sample, actions.level);
            continue;
        }
        double best = std::max(tc * (sample.direct_rate - lambda), 0.0);
        if (ris_) {
            for (int level = 1; level <= derived_.max_level; ++level) {
                best = std::max(best, theta_of(sample, level));
            }
        }
        total += best;
    }
    return total / static_cast<double>(samples.size());
}

double FixedPointModel::excess(double lambda, const ActionSet& actions) const
{
    if (actions.kind == ActionSet::Kind::ForcedProbe) {
        derived_.tau_ce(actions.level);
    }
    double sum = 0.0;
    for (int i = 1; i <= max_granted_; ++i) {
        sum += weights_[static_cast<std::size_t>(i)] * lambda_term(i, lambda, actions);
    }
    return sum - lambda * derived_.rr_duration;
}

std::pair<double, double> step_bounds(const DerivedParams& derived, double accuracy)
{
    return {accuracy, (2.0 - accuracy) / (derived.rr_duration + derived.coherence_time)};
}

OfflineSolution solve_lambda(const FixedPointModel& model, const SolverSettings& settings,
                             const ActionSet& actions)
{
    if (!(settings.accuracy > 0.0)) {
        throw Error(ErrorKind::NonPositiveParameter, "solver accuracy must be > 0");
    }
    const DerivedParams& d = model.derived();
    const double step = settings.step > 0.0 ? settings.step : 1.0 / (d.rr_duration + d.coherence_time);
    const auto [lo, hi] = step_bounds(d, settings.accuracy);
    if (step < lo || step > hi) {
        throw Error(ErrorKind::StepSizeOutOfRange,
                    fmt::format("step size {} outside the admissible interval [{}, {}]", step, lo, hi));
    }

    OfflineSolution sol;
    sol.step_size = step;
    sol.accuracy = settings.accuracy;
    sol.pmf_sum = model.pmf_mass();
    double lambda = settings.initial_lambda;
    sol.trace.push_back(lambda);
    bool converged = false;
    for (int it = 1; it <= settings.max_iterations; ++it) {
        const double next = lambda + step * model.excess(lambda, actions);
        sol.trace.push_back(next);
        sol.iterations = it;
        const double delta = std::abs(next - lambda);
        lambda = next;
        if (delta < settings.accuracy) {
            converged = true;
            break;
        }
    }
    sol.lambda_star = lambda;
    sol.residual = std::abs(model.excess(lambda, actions));
    if (!converged) {
        throw SolverError(ErrorKind::MaxIterationsExceeded,
                          fmt::format("no convergence after {} iterations (last lambda {})",
                                      settings.max_iterations, lambda),
                          std::move(sol));
    }
    return sol;
}

void save_solution(const std::string& path, const OfflineSolution& s)
{
    nlohmann::json j;
    j["strategy"] = s.strategy;
    j["lambda_star"] = s.lambda_star;
    j["accuracy"] = s.accuracy;
    j["step_size"] = s.step_size;
    j["iterations"] = s.iterations;
    j["residual"] = s.residual;
    j["seed"] = s.seed;
    j["n_cascade_samples"] = s.n_cascade_samples;
    j["n_outer_samples"] = s.n_outer_samples;
    j["pmf_sum"] = s.pmf_sum;
    j["config_hash"] = fmt::format("{:016x}", s.config_hash);
    j["trace"] = s.trace;
    std::ofstream os(path);
    if (!os) {
        throw Error(ErrorKind::Io, fmt::format("cannot write solution file '{}'", path));
    }
    os << j.dump(2) << '\n';
}

OfflineSolution load_solution(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw Error(ErrorKind::Io, fmt::format("cannot read solution file '{}'", path));
    }
    try {
        const nlohmann::json j = nlohmann::json::parse(is);
        OfflineSolution s;
        s.strategy = j.value("strategy", std::string("PROPOSED"));
        s.lambda_star = j.at("lambda_star").get<double>();
        s.accuracy = j.value("accuracy", 0.0);
        s.step_size = j.value("step_size", 0.0);
        s.iterations = j.value("iterations", 0);
        s.residual = j.value("residual", 0.0);
        s.seed = j.value("seed", std::uint64_t{0});
        s.n_cascade_samples = j.value("n_cascade_samples", std::size_t{0});
        s.n_outer_samples = j.value("n_outer_samples", std::size_t{0});
        s.pmf_sum = j.value("pmf_sum", 0.0);
        s.config_hash = std::stoull(j.value("config_hash", std::string("0")), nullptr, 16);
        s.trace = j.value("trace", std::vector<double>{});
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Io, fmt::format("malformed solution file '{}': {}", path, e.what()));
    }
}

} // namespace risra
