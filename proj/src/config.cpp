#include "risra/config.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fmt/core.h>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "risra/error.hpp"

namespace risra {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

double to_double(std::string_view v)
{
    const std::string s(v);
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected a number");
    }
    if (used != s.size()) {
        throw std::invalid_argument("expected a number");
    }
    return x;
}

long long to_integer(std::string_view v)
{
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw std::invalid_argument("expected an integer");
    }
    return x;
}

bool to_bool(std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw std::invalid_argument("expected true or false");
}

Vec3 to_vec3(std::string_view v)
{
    const auto parts = split(v, ',');
    if (parts.size() != 3) {
        throw std::invalid_argument("expected three comma-separated coordinates");
    }
    return {to_double(parts[0]), to_double(parts[1]), to_double(parts[2])};
}

template <typename T, typename Fn>
std::vector<T> to_list(std::string_view v, Fn&& convert)
{
    std::vector<T> out;
    if (trim(v).empty()) {
        return out;
    }
    for (auto part : split(v, ',')) {
        out.push_back(static_cast<T>(convert(part)));
    }
    return out;
}

// Tracks which of the two coupled RIS-size keys were given explicitly.
struct SizeKeys {
    bool elements = false;
    bool level = false;
};

struct State {
    Settings& settings;
    SizeKeys size_keys;
};

using Setter = std::function<void(State&, std::string_view)>;

struct Registry {
    std::map<std::string, Setter, std::less<>> setters;
};

const Registry& registry()
{
    static const Registry reg = [] {
        Registry r;
        auto& s = r.setters;
        s["n_users"] = [](State& st, std::string_view v) { st.settings.system.n_users = static_cast<int>(to_integer(v)); };
        s["n_preambles"] = [](State& st, std::string_view v) { st.settings.system.n_preambles = static_cast<int>(to_integer(v)); };
        s["n_subchannels"] = [](State& st, std::string_view v) { st.settings.system.n_subchannels = static_cast<int>(to_integer(v)); };
        s["max_grouping_level"] = [](State& st, std::string_view v) {
            st.settings.system.max_grouping_level = static_cast<int>(to_integer(v));
            st.size_keys.level = true;
        };
        s["n_elements"] = [](State& st, std::string_view v) {
            st.settings.system.n_elements = static_cast<int>(to_integer(v));
            st.size_keys.elements = true;
        };
        s["bs_position"] = [](State& st, std::string_view v) { st.settings.system.bs_position = to_vec3(v); };
        s["ris_position"] = [](State& st, std::string_view v) { st.settings.system.ris_position = to_vec3(v); };
        s["user_position"] = [](State& st, std::string_view v) { st.settings.system.user_position = to_vec3(v); };
        s["pathloss_exp_direct"] = [](State& st, std::string_view v) { st.settings.system.pathloss_exp_direct = to_double(v); };
        s["pathloss_exp_ris"] = [](State& st, std::string_view v) { st.settings.system.pathloss_exp_ris = to_double(v); };
        s["ref_pathloss_db"] = [](State& st, std::string_view v) { st.settings.system.ref_pathloss_db = to_double(v); };
        s["tx_power_dbm"] = [](State& st, std::string_view v) { st.settings.system.tx_power_dbm = to_double(v); };
        s["noise_power_dbm"] = [](State& st, std::string_view v) { st.settings.system.noise_power_dbm = to_double(v); };
        s["coherence_time_s"] = [](State& st, std::string_view v) { st.settings.system.coherence_time_s = to_double(v); };
        s["rr_duration_s"] = [](State& st, std::string_view v) { st.settings.system.rr_duration_s = to_double(v); };
        s["pilot_duration_s"] = [](State& st, std::string_view v) { st.settings.system.pilot_duration_s = to_double(v); };
        s["carrier_freq_hz"] = [](State& st, std::string_view v) { st.settings.system.carrier_freq_hz = to_double(v); };
        s["direct_fading"] = [](State& st, std::string_view v) {
            if (v == "rayleigh") {
                st.settings.system.direct_fading = DirectFading::Rayleigh;
            } else if (v == "constant") {
                st.settings.system.direct_fading = DirectFading::Constant;
            } else {
                throw std::invalid_argument("expected rayleigh or constant");
            }
        };
        s["direct_constant_gain"] = [](State& st, std::string_view v) { st.settings.system.direct_constant_gain = to_double(v); };
        s["ris_enabled"] = [](State& st, std::string_view v) { st.settings.system.ris_enabled = to_bool(v); };

        s["mc_cascade_samples"] = [](State& st, std::string_view v) {
            const auto n = to_integer(v);
            if (n < 1) {
                throw std::invalid_argument("must be >= 1");
            }
            st.settings.mc.n_cascade_samples = static_cast<std::size_t>(n);
        };
        s["mc_outer_samples"] = [](State& st, std::string_view v) {
            const auto n = to_integer(v);
            if (n < 1) {
                throw std::invalid_argument("must be >= 1");
            }
            st.settings.mc.n_outer_samples = static_cast<std::size_t>(n);
        };
        s["solver_accuracy"] = [](State& st, std::string_view v) { st.settings.solver.accuracy = to_double(v); };
        s["solver_step"] = [](State& st, std::string_view v) { st.settings.solver.step = to_double(v); };
        s["solver_max_iterations"] = [](State& st, std::string_view v) { st.settings.solver.max_iterations = static_cast<int>(to_integer(v)); };
        s["solver_initial_lambda"] = [](State& st, std::string_view v) { st.settings.solver.initial_lambda = to_double(v); };

        s["frames"] = [](State& st, std::string_view v) {
            const auto n = to_integer(v);
            if (n < 1) {
                throw std::invalid_argument("must be >= 1");
            }
            st.settings.sim.n_frames = static_cast<std::size_t>(n);
        };
        s["seed"] = [](State& st, std::string_view v) { st.settings.sim.seed = static_cast<std::uint64_t>(to_integer(v)); };
        s["threads"] = [](State& st, std::string_view v) { st.settings.sim.threads = static_cast<unsigned>(std::max(1LL, to_integer(v))); };
        s["skip_cap"] = [](State& st, std::string_view v) { st.settings.sim.skip_cap = static_cast<long>(to_integer(v)); };
        s["strategy"] = [](State& st, std::string_view v) { st.settings.strategy = parse_strategy(v); };

        s["sweep_tx_power_dbm"] = [](State& st, std::string_view v) { st.settings.sweep_tx_power_dbm = to_list<double>(v, to_double); };
        s["sweep_coherence_time_s"] = [](State& st, std::string_view v) { st.settings.sweep_coherence_time_s = to_list<double>(v, to_double); };
        s["sweep_n_elements"] = [](State& st, std::string_view v) { st.settings.sweep_n_elements = to_list<int>(v, to_integer); };
        s["sweep_strategies"] = [](State& st, std::string_view v) { st.settings.sweep_strategies = to_list<StrategyKind>(v, parse_strategy); };
        return r;
    }();
    return reg;
}

void set_key(State& state, std::string_view key, std::string_view value, const std::string& where)
{
    const auto& setters = registry().setters;
    const auto it = setters.find(key);
    if (it == setters.end()) {
        throw Error(ErrorKind::Config, fmt::format("{}: unknown key '{}'", where, key));
    }
    try {
        it->second(state, value);
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, fmt::format("{}: key '{}': {}", where, key, e.what()));
    } catch (const std::exception& e) {
        throw Error(ErrorKind::Config, fmt::format("{}: key '{}': {} (got '{}')", where, key, e.what(), value));
    }
}

void parse_into(std::string_view text, const std::string& source, State& state)
{
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const std::string where = fmt::format("{}:{}", source, line_no);
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::Config, fmt::format("{}: expected 'key = value', got '{}'", where, line));
        }
        set_key(state, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
    }
}

void resolve_size(Settings& settings, const SizeKeys& given)
{
    auto& sys = settings.system;
    if (given.elements && !given.level && sys.n_elements > 0 &&
        std::has_single_bit(static_cast<unsigned>(sys.n_elements))) {
        sys.max_grouping_level = std::countr_zero(static_cast<unsigned>(sys.n_elements));
    } else if (given.level && !given.elements && sys.max_grouping_level > 0 && sys.max_grouping_level < 31) {
        sys.n_elements = 1 << sys.max_grouping_level;
    }
}

} // namespace

std::vector<SweepPoint> Settings::sweep_points() const
{
    const auto tx = sweep_tx_power_dbm.empty() ? std::vector<double>{system.tx_power_dbm} : sweep_tx_power_dbm;
    const auto tc = sweep_coherence_time_s.empty() ? std::vector<double>{system.coherence_time_s}
                                                   : sweep_coherence_time_s;
    const auto m = sweep_n_elements.empty() ? std::vector<int>{system.n_elements} : sweep_n_elements;
    std::vector<SweepPoint> points;
    for (double p : tx) {
        for (double t : tc) {
            for (int e : m) {
                points.push_back({p, t, e});
            }
        }
    }
    return points;
}

void parse_settings(std::string_view text, const std::string& source, Settings& settings)
{
    State state{settings, {}};
    parse_into(text, source, state);
    resolve_size(settings, state.size_keys);
}

void apply_override(Settings& settings, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw Error(ErrorKind::Config, fmt::format("override '{}' is not key=value", assignment));
    }
    State state{settings, {}};
    set_key(state, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)),
            fmt::format("--set {}", assignment));
    resolve_size(settings, state.size_keys);
}

Settings load_settings(const std::string& path, const std::vector<std::string>& overrides)
{
    Settings settings;
    if (!path.empty()) {
        std::ifstream is(path);
        if (!is) {
            throw Error(ErrorKind::Config, fmt::format("cannot open config file '{}'", path));
        }
        std::ostringstream buf;
        buf << is.rdbuf();
        parse_settings(buf.str(), path, settings);
    }
    for (const auto& o : overrides) {
        apply_override(settings, o);
    }
    return settings;
}

std::vector<std::string> known_keys()
{
    std::vector<std::string> keys;
    for (const auto& entry : registry().setters) {
        keys.push_back(entry.first);
    }
    return keys;
}

} // namespace risra
