#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fmt/core.h>
#include <fmt/ostream.h>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "risra/config.hpp"
#include "risra/contention.hpp"
#include "risra/error.hpp"

namespace risra::cli {

namespace {

Settings settings_for(const RunManifest& m)
{
    Settings s = load_settings(m.config_path, m.overrides);
    if (m.seed) {
        s.sim.seed = *m.seed;
    }
    if (m.threads) {
        s.sim.threads = *m.threads;
    }
    if (m.frames) {
        s.sim.n_frames = *m.frames;
    }
    if (m.strategy) {
        s.strategy = parse_strategy(*m.strategy);
    }
    return s;
}

struct Prepared {
    Settings settings;
    DerivedParams derived;
    std::shared_ptr<const CascadePool> pool;
    std::shared_ptr<const ThetaEstimator> estimator;
};

Prepared prepare(const RunManifest& m, bool with_pool)
{
    Prepared p{settings_for(m), {}, nullptr, nullptr};
    p.derived = validate(p.settings.system);
    if (with_pool) {
        p.pool = std::make_shared<CascadePool>(p.settings.system, p.derived, p.settings.mc.n_cascade_samples,
                                               p.settings.sim.seed, p.settings.sim.threads);
        p.estimator = std::make_shared<ThetaEstimator>(p.derived, p.pool);
    }
    return p;
}

OfflineSolution solve_for(const Prepared& p, StrategyKind kind)
{
    const FixedPointModel model(p.settings.system, p.derived, p.settings.mc, p.pool, p.settings.sim.seed,
                                p.settings.sim.threads);
    OfflineSolution sol = solve_lambda(model, p.settings.solver, action_set(kind, p.derived.max_level));
    sol.strategy = std::string(to_string(kind));
    sol.seed = p.settings.sim.seed;
    sol.n_cascade_samples = p.settings.mc.n_cascade_samples;
    sol.n_outer_samples = p.settings.mc.n_outer_samples;
    sol.config_hash = config_hash(p.settings.system);
    return sol;
}

bool file_is_empty(const std::string& path)
{
    std::error_code ec;
    return !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
}

} // namespace

int cmd_solve(const RunManifest& m, std::ostream& out, std::ostream&)
{
    const Prepared p = prepare(m, true);
    const OfflineSolution sol = solve_for(p, p.settings.strategy);
    const std::string path = m.out_path.empty() ? "solution.json" : m.out_path;
    save_solution(path, sol);
    fmt::print(out, "strategy   {}\n", sol.strategy);
    fmt::print(out, "lambda*    {:.10g} bit/s/Hz\n", sol.lambda_star);
    fmt::print(out, "residual   {:.3e}\n", sol.residual);
    fmt::print(out, "iterations {}\n", sol.iterations);
    fmt::print(out, "step size  {:.6g}\n", sol.step_size);
    fmt::print(out, "pmf sum    {:.12f}\n", sol.pmf_sum);
    fmt::print(out, "seed       {}\n", sol.seed);
    fmt::print(out, "written    {}\n", path);
    return kSuccess;
}

int cmd_simulate(const RunManifest& m, std::ostream& out, std::ostream&)
{
    Settings s = settings_for(m);
    const StrategyKind kind = s.strategy;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    if (needs_lambda(kind)) {
        if (m.lambda) {
            lambda = *m.lambda;
        } else if (!m.solution_path.empty()) {
            const OfflineSolution sol = load_solution(m.solution_path);
            if (sol.strategy != to_string(kind)) {
                throw Error(ErrorKind::MissingLambdaStar,
                            fmt::format("solution file '{}' holds the threshold of {}, not {}", m.solution_path,
                                        sol.strategy, to_string(kind)));
            }
            lambda = sol.lambda_star;
        } else {
            throw Error(ErrorKind::MissingLambdaStar,
                        fmt::format("strategy {} needs --solution or --lambda", to_string(kind)));
        }
    }
    const Prepared p = prepare(m, kind == StrategyKind::Proposed);
    const Policy policy(kind, lambda, p.derived.max_level, p.estimator);
    const SimulationReport report = run_simulation(policy, p.settings.system, p.derived, p.settings.sim);

    std::ostringstream row;
    write_csv_row(row, report);
    if (!m.out_path.empty()) {
        const bool header = file_is_empty(m.out_path);
        std::ofstream os(m.out_path, std::ios::app);
        if (!os) {
            throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", m.out_path));
        }
        if (header) {
            write_csv_header(os);
        }
        os << row.str();
    }
    write_csv_header(out);
    out << row.str();
    return kSuccess;
}

int cmd_sweep(const RunManifest& m, std::ostream& out, std::ostream&)
{
    const Settings s = settings_for(m);
    SweepRequest request;
    request.base = s.system;
    request.mc = s.mc;
    request.solver = s.solver;
    request.sim = s.sim;
    request.points = s.sweep_points();
    request.strategies = s.sweep_strategies.empty() ? all_strategies() : s.sweep_strategies;
    const auto rows = sweep(request);

    std::ostringstream table;
    write_csv_header(table);
    for (const auto& row : rows) {
        write_csv_row(table, row.report);
    }
    if (!m.out_path.empty()) {
        std::ofstream os(m.out_path);
        if (!os) {
            throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", m.out_path));
        }
        os << table.str();
    }
    out << table.str();
    return kSuccess;
}

// --- validate ----------------------------------------------------------------

namespace {

struct CheckResult {
    bool pass = false;
    std::string detail;
};

CheckResult check_contention(const Settings& s, std::uint64_t seed)
{
    Rng rng = make_stream(seed, StreamTag::Validation, 1);
    const auto pmf22 = granted_pmf_exact(2, 2, 100000, rng);
    const bool exact_ok = std::abs(pmf22[0] - 0.5) < 0.01 && pmf22[1] == 0.0 && std::abs(pmf22[2] - 0.5) < 0.01;

    const int k = s.system.n_users;
    const int n_pre = s.system.n_preambles;
    const GrantedPmf closed = granted_pmf_closed_form(k, n_pre);
    const bool sum_ok = std::abs(closed.sum - 1.0) <= 1e-6;
    double mass_used = 0.0;
    for (int i = 1; i <= std::min(k, n_pre); ++i) {
        mass_used += closed.p[static_cast<std::size_t>(i)];
    }
    const auto empirical = granted_pmf_exact(k, n_pre, 100000, rng);
    double mean = 0.0;
    for (std::size_t i = 0; i < empirical.size(); ++i) {
        mean += static_cast<double>(i) * empirical[i];
    }
    const double expected = expected_granted(k, n_pre);
    const bool mean_ok = std::abs(mean - expected) <= 0.01 * expected;
    return {exact_ok && sum_ok && mean_ok,
            fmt::format("K=2,S=2 pmf [{:.4f}, {:.4f}, {:.4f}]; p_I sum residual {:.2e}, mass on I>=1 {:.6f}; "
                        "E[K_n] MC {:.4f} vs {:.4f}; TV(closed form, MC) {:.4f}",
                        pmf22[0], pmf22[1], pmf22[2], closed.sum - 1.0, mass_used, mean, expected,
                        total_variation(closed.p, empirical))};
}

CheckResult check_beamforming(std::uint64_t seed)
{
    Rng rng = make_stream(seed, StreamTag::Validation, 2);
    constexpr int kGrid = 16;
    const double step = 2.0 * std::numbers::pi / kGrid;
    double worst_rel = 0.0;
    bool grid_ok = true;
    for (int t = 0; t < 100; ++t) {
        const cplx hd = sample_cscg(rng, 1.0);
        const std::vector<cplx> g{sample_cscg(rng, 1.0), sample_cscg(rng, 1.0)};
        const auto phases = optimal_phases(hd, g);
        const double closed = std::abs(combined_gain(hd, g, phases));
        const double bound = aligned_magnitude(hd, g);
        worst_rel = std::max(worst_rel, std::abs(closed - bound) / bound);
        double best = 0.0;
        for (int a = 0; a < kGrid; ++a) {
            for (int b = 0; b < kGrid; ++b) {
                const std::vector<double> ph{a * step, b * step};
                best = std::max(best, std::abs(combined_gain(hd, g, ph)));
            }
        }
        grid_ok = grid_ok && closed >= best - 1e-12;
    }
    return {grid_ok && worst_rel <= 1e-10,
            fmt::format("100 instances; closed form >= 16x16 grid: {}; max |combined| vs |h_d|+sum|h_u| rel err {:.1e}",
                        grid_ok ? "yes" : "no", worst_rel)};
}

CheckResult check_greedy(std::uint64_t seed)
{
    Matrix<cplx> h(2, 2);
    h(0, 0) = 5.0;
    h(0, 1) = 4.0;
    h(1, 0) = 3.0;
    h(1, 1) = 1.0;
    const Schedule traced = greedy_schedule(h);
    const bool trace_ok = traced.assignment == std::vector<int>{0, 1};

    Rng rng = make_stream(seed, StreamTag::Validation, 3);
    std::uniform_int_distribution<int> dim(1, 8);
    std::size_t bad = 0;
    for (int t = 0; t < 10000; ++t) {
        Matrix<cplx> m(static_cast<std::size_t>(dim(rng)), static_cast<std::size_t>(dim(rng)));
        for (auto& v : m.data()) {
            v = sample_cscg(rng, 1.0);
        }
        const Schedule sch = greedy_schedule(m);
        try {
            check_schedule(sch, m.rows(), m.cols());
        } catch (const Error&) {
            ++bad;
            continue;
        }
        bad += sch.n_assigned() == std::min(m.rows(), m.cols()) ? 0 : 1;
    }
    return {trace_ok && bad == 0,
            fmt::format("hand trace [[5,4],[3,1]] -> {}; invalid schedules in 10^4 random instances: {}",
                        trace_ok ? "u0->c0, u1->c1" : "MISMATCH", bad)};
}

CheckResult check_branch_equivalence(const Prepared& p, std::uint64_t seed)
{
    Rng rng = make_stream(seed, StreamTag::Validation, 4);
    std::size_t violations = 0;
    std::size_t checked = 0;
    const double tc = p.derived.coherence_time;
    for (int t = 0; t < 50; ++t) {
        const auto users = static_cast<std::size_t>(std::min(p.settings.system.n_users, p.settings.system.n_subchannels));
        const Matrix<cplx> hd = sample_direct(rng, users, p.settings.system, p.derived);
        const Schedule a = greedy_schedule(hd);
        const double lambda = std::uniform_real_distribution<double>(0.0, 40.0)(rng);
        for (int level = 1; level <= p.derived.max_level; ++level) {
            const double probe = p.derived.tau_ce(level);
            for (double r : p.estimator->rates(a, level, hd)) {
                const double first = (tc - probe) * r - lambda * tc;
                const bool first_wins = first >= -lambda * probe;
                violations += first_wins == (r >= lambda) || std::abs(r - lambda) < 1e-12 ? 0 : 1;
                ++checked;
            }
        }
    }
    return {violations == 0, fmt::format("{} samples, {} violations of (first branch) <=> R_r >= lambda",
                                         checked, violations)};
}

CheckResult check_monotone_fixed_point(const Prepared& p)
{
    const FixedPointModel model(p.settings.system, p.derived, p.settings.mc, p.pool, p.settings.sim.seed,
                                p.settings.sim.threads);
    const OfflineSolution sol = solve_lambda(model, p.settings.solver);
    std::vector<double> values;
    for (int i = 0; i < 10; ++i) {
        values.push_back(model.excess(sol.lambda_star * 2.0 * i / 9.0, ActionSet::full()));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < values.size(); ++i) {
        decreasing = decreasing && values[i] < values[i - 1];
    }
    const double bound = 2.0 * sol.accuracy * (p.derived.rr_duration + p.derived.coherence_time);
    return {decreasing && sol.residual <= bound,
            fmt::format("lambda* {:.6g} after {} iterations, residual {:.2e} (bound {:.2e}); G strictly "
                        "decreasing on [0, 2 lambda*]: {}",
                        sol.lambda_star, sol.iterations, sol.residual, bound, decreasing ? "yes" : "no")};
}

} // namespace

int cmd_validate(const RunManifest& m, std::ostream& out, std::ostream&)
{
    const Prepared p = prepare(m, true);
    const std::uint64_t seed = p.settings.sim.seed;
    fmt::print(out, "validation seed {} (replay with --seed {})\n", seed, seed);

    const std::vector<std::pair<std::string, std::function<CheckResult()>>> checks{
        {"contention pmf", [&] { return check_contention(p.settings, seed); }},
        {"beamforming grid oracle", [&] { return check_beamforming(seed); }},
        {"greedy trace oracle", [&] { return check_greedy(seed); }},
        {"theta branch equivalence", [&] { return check_branch_equivalence(p, seed); }},
        {"fixed-point monotonicity", [&] { return check_monotone_fixed_point(p); }},
    };
    bool all = true;
    for (const auto& [name, fn] : checks) {
        CheckResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {false, e.what()};
        }
        all = all && r.pass;
        fmt::print(out, "[{}] {}: {}\n", r.pass ? "PASS" : "FAIL", name, r.detail);
    }
    return all ? kSuccess : kValidationFailure;
}

int run(const RunManifest& m, std::ostream& out, std::ostream& err)
{
    try {
        if (m.subcommand == "solve") {
            return cmd_solve(m, out, err);
        }
        if (m.subcommand == "simulate") {
            return cmd_simulate(m, out, err);
        }
        if (m.subcommand == "sweep") {
            return cmd_sweep(m, out, err);
        }
        if (m.subcommand == "validate") {
            return cmd_validate(m, out, err);
        }
        fmt::print(err, "unknown subcommand '{}'\n", m.subcommand);
        return kConfigError;
    } catch (const Error& e) {
        fmt::print(err, "error: {}\n", e.what());
        switch (e.kind()) {
        case ErrorKind::MaxIterationsExceeded:
        case ErrorKind::SkipCapExceeded: return kValidationFailure;
        default: return kConfigError;
        }
    }
}

} // namespace risra::cli
