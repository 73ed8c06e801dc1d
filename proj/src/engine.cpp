#include "risra/engine.hpp"

#include <bit>
#include <cmath>
#include <fmt/core.h>
#include <limits>
#include <ostream>

#include "risra/contention.hpp"
#include "risra/error.hpp"
#include "risra/parallel.hpp"

namespace risra {

namespace {

// R_r of a probed schedule: fresh cascaded products for every probed
// (user, channel) pair, grouped at `level`, combined under optimal phases.
double probe_rate(const Schedule& schedule, int level, const Matrix<cplx>& direct,
                  const SystemConfig& config, const DerivedParams& derived, Rng& rng)
{
    std::vector<cplx> elements(static_cast<std::size_t>(derived.n_elements));
    std::vector<cplx> grouped(std::size_t{1} << level);
    double rate = 0.0;
    for (std::size_t c = 0; c < schedule.assignment.size(); ++c) {
        const int user = schedule.assignment[c];
        if (user == Schedule::kNone) {
            continue;
        }
        sample_cascaded(rng, config, derived, elements);
        group_elements(elements, level, grouped);
        rate += link_rate(derived.mean_snr,
                          aligned_magnitude(direct(static_cast<std::size_t>(user), c), grouped));
    }
    return rate;
}

void check_skip_cap(const FrameTrace& trace, long skip_cap)
{
    if (trace.n_rr_phases >= skip_cap) {
        throw Error(ErrorKind::SkipCapExceeded,
                    fmt::format("{} consecutive RR phases without data transmission", trace.n_rr_phases));
    }
}

} // namespace

FrameTrace run_frame(const Policy& policy, const SystemConfig& config, const DerivedParams& derived,
                     Rng& rng, long skip_cap)
{
    FrameTrace trace;
    double time = 0.0;
    const double tc = derived.coherence_time;
    for (;;) {
        ++trace.n_rr_phases;
        time += derived.rr_duration;

        const GrantOutcome grant = simulate_rr(rng, config.n_users, config.n_preambles);
        if (grant.n_granted() == 0) {
            ++trace.empty_rr_phases;
            check_skip_cap(trace, skip_cap);
            continue;
        }
        const Matrix<cplx> direct = sample_direct(rng, grant.n_granted(), config, derived);
        const Decision decision = policy.first_layer(direct, derived.mean_snr);

        if (decision.layer1 == Layer1::TransmitDirect) {
            trace.final_kind = Transmission::Direct;
            trace.final_rate = direct_sum_rate(decision.schedule, direct, derived.mean_snr);
            trace.final_users = decision.schedule.n_assigned();
            trace.traffic = trace.final_rate * tc;
            trace.duration = time + tc;
            return trace;
        }
        if (decision.layer1 == Layer1::Probe) {
            const int level = decision.probe_level;
            trace.probes.push_back({trace.n_rr_phases, level});
            const double ris_rate = probe_rate(decision.schedule, level, direct, config, derived, rng);
            if (policy.second_layer(ris_rate) == Layer2::TransmitRis) {
                trace.final_kind = Transmission::Ris;
                trace.final_rate = ris_rate;
                trace.final_level = level;
                trace.final_users = decision.schedule.n_assigned();
                trace.traffic = (tc - derived.tau_ce(level)) * ris_rate;
                trace.duration = time + tc;
                return trace;
            }
            time += derived.tau_ce(level);
        }
        check_skip_cap(trace, skip_cap);
    }
}

namespace {

struct BlockSums {
    std::size_t frames = 0;
    double traffic = 0.0;
    double time = 0.0;
    double traffic_sq = 0.0;
    double time_sq = 0.0;
    double cross = 0.0;
    std::size_t rr_phases = 0;
    std::size_t probes = 0;
    std::size_t ris_frames = 0;

    void add(const FrameTrace& t)
    {
        ++frames;
        traffic += t.traffic;
        time += t.duration;
        traffic_sq += t.traffic * t.traffic;
        time_sq += t.duration * t.duration;
        cross += t.traffic * t.duration;
        rr_phases += static_cast<std::size_t>(t.n_rr_phases);
        probes += t.probes.size();
        ris_frames += t.final_kind == Transmission::Ris ? 1 : 0;
    }

    void merge(const BlockSums& o)
    {
        frames += o.frames;
        traffic += o.traffic;
        time += o.time;
        traffic_sq += o.traffic_sq;
        time_sq += o.time_sq;
        cross += o.cross;
        rr_phases += o.rr_phases;
        probes += o.probes;
        ris_frames += o.ris_frames;
    }
};

constexpr std::size_t kBlockFrames = 512;

} // namespace

SimulationReport run_simulation(const Policy& policy, const SystemConfig& config,
                                const DerivedParams& derived, const SimulationOptions& options)
{
    if (options.n_frames == 0) {
        throw Error(ErrorKind::NonPositiveParameter, "n_frames must be >= 1");
    }
    const std::size_t n_blocks = (options.n_frames + kBlockFrames - 1) / kBlockFrames;
    std::vector<BlockSums> blocks(n_blocks);
    parallel_for(n_blocks, options.threads, [&](std::size_t b) {
        const std::size_t first = b * kBlockFrames;
        const std::size_t last = std::min(options.n_frames, first + kBlockFrames);
        for (std::size_t f = first; f < last; ++f) {
            Rng rng = make_stream(options.seed, StreamTag::Frame, 0, f);
            blocks[b].add(run_frame(policy, config, derived, rng, options.skip_cap));
        }
    });
    BlockSums total;
    for (const auto& b : blocks) {
        total.merge(b);
    }

    SimulationReport r;
    r.strategy = std::string(to_string(policy.kind()));
    r.tx_power_dbm = config.tx_power_dbm;
    r.coherence_time_s = config.coherence_time_s;
    r.n_elements = config.n_elements;
    r.n_frames = total.frames;
    r.total_traffic = total.traffic;
    r.total_time = total.time;
    r.throughput = total.traffic / total.time;
    r.seed = options.seed;
    r.lambda_star_used =
        needs_lambda(policy.kind()) ? policy.lambda() : std::numeric_limits<double>::quiet_NaN();
    r.config_hash = config_hash(config);
    r.total_rr_phases = total.rr_phases;
    r.total_probes = total.probes;

    const double n = static_cast<double>(total.frames);
    r.mean_rr_phases = static_cast<double>(total.rr_phases) / n;
    r.ris_fraction = static_cast<double>(total.ris_frames) / n;
    if (total.frames > 1) {
        // Var of e_i = Y_i - theta T_i, delta method for the ratio estimator.
        const double theta = r.throughput;
        const double mean_time = total.time / n;
        const double ss = total.traffic_sq - 2.0 * theta * total.cross + theta * theta * total.time_sq;
        const double var_e = std::max(0.0, ss / (n - 1.0));
        r.ci_half_width = 1.96 * std::sqrt(var_e / n) / mean_time;
    }
    return r;
}

void write_csv_header(std::ostream& os)
{
    os << "strategy,P_t_dbm,T_c_s,M,n_frames,throughput,ci_half_width,seed,lambda_star_used,config_hash\n";
}

void write_csv_row(std::ostream& os, const SimulationReport& r)
{
    os << fmt::format("{},{:.17g},{:.17g},{},{},{:.17g},{:.17g},{},{:.17g},{:016x}\n", r.strategy,
                      r.tx_power_dbm, r.coherence_time_s, r.n_elements, r.n_frames, r.throughput,
                      r.ci_half_width, r.seed, r.lambda_star_used, r.config_hash);
}

SystemConfig apply_point(const SystemConfig& base, const SweepPoint& point)
{
    SystemConfig c = base;
    c.tx_power_dbm = point.tx_power_dbm;
    c.coherence_time_s = point.coherence_time_s;
    if (point.n_elements <= 0 || !std::has_single_bit(static_cast<unsigned>(point.n_elements))) {
        throw Error(ErrorKind::NonPowerOfTwoElements,
                    fmt::format("sweep point M = {} is not a power of two", point.n_elements));
    }
    c.n_elements = point.n_elements;
    c.max_grouping_level = std::countr_zero(static_cast<unsigned>(point.n_elements));
    return c;
}

std::vector<SweepRow> sweep(const SweepRequest& request)
{
    std::vector<SweepRow> rows;
    for (const SweepPoint& point : request.points) {
        const SystemConfig config = apply_point(request.base, point);
        const DerivedParams derived = validate(config);

        bool any_lambda = false;
        for (StrategyKind kind : request.strategies) {
            any_lambda = any_lambda || needs_lambda(kind);
        }
        std::shared_ptr<const CascadePool> pool;
        std::shared_ptr<const ThetaEstimator> estimator;
        std::optional<FixedPointModel> model;
        if (any_lambda) {
            pool = std::make_shared<CascadePool>(config, derived, request.mc.n_cascade_samples,
                                                 request.sim.seed, request.sim.threads);
            estimator = std::make_shared<ThetaEstimator>(derived, pool);
            model.emplace(config, derived, request.mc, pool, request.sim.seed, request.sim.threads);
        }

        for (StrategyKind kind : request.strategies) {
            SweepRow row;
            row.point = point;
            double lambda = std::numeric_limits<double>::quiet_NaN();
            if (needs_lambda(kind)) {
                OfflineSolution sol = solve_lambda(*model, request.solver, action_set(kind, derived.max_level));
                sol.strategy = std::string(to_string(kind));
                sol.seed = request.sim.seed;
                sol.n_cascade_samples = request.mc.n_cascade_samples;
                sol.n_outer_samples = request.mc.n_outer_samples;
                sol.config_hash = config_hash(config);
                lambda = sol.lambda_star;
                row.solution = std::move(sol);
            }
            const Policy policy(kind, lambda, derived.max_level,
                                kind == StrategyKind::Proposed ? estimator : nullptr);
            row.report = run_simulation(policy, config, derived, request.sim);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace risra
