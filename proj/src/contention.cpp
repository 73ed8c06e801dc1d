#include "risra/contention.hpp"

#include <algorithm>
#include <cmath>

namespace risra {

GrantOutcome simulate_rr(Rng& rng, int n_users, int n_preambles)
{
    std::uniform_int_distribution<int> pick(0, n_preambles - 1);
    std::vector<int> choice(static_cast<std::size_t>(n_users));
    std::vector<int> load(static_cast<std::size_t>(n_preambles), 0);
    for (auto& c : choice) {
        c = pick(rng);
        ++load[static_cast<std::size_t>(c)];
    }
    GrantOutcome out;
    for (int k = 0; k < n_users; ++k) {
        if (load[static_cast<std::size_t>(choice[static_cast<std::size_t>(k)])] == 1) {
            out.granted.push_back(k);
        }
    }
    return out;
}

double expected_granted(int n_users, int n_preambles)
{
    const double k = n_users;
    const double s = n_preambles;
    return k * std::pow((s - 1.0) / s, k - 1.0);
}

double GrantedPmf::mean() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        m += static_cast<double>(i) * p[i];
    }
    return m;
}

namespace {

double log_choose(int n, int k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log(x) with log(0) = -inf, so 0^0 terms can be handled explicitly.
double safe_log(double x) { return x > 0.0 ? std::log(x) : -INFINITY; }

} // namespace

GrantedPmf granted_pmf_closed_form(int n_users, int n_preambles)
{
    const double k = n_users;
    const double s = n_preambles;
    // log of K(S-1)^{K-1} and of S^K - K(S-1)^{K-1}, both relative to S^K.
    double log_success = std::log(k) - k * std::log(s);
    if (n_users > 1) {
        log_success += (k - 1.0) * safe_log(s - 1.0);
    }
    const double success = std::exp(log_success);
    const double log_failure = safe_log(1.0 - success);

    GrantedPmf pmf;
    pmf.p.assign(static_cast<std::size_t>(n_preambles) + 1, 0.0);
    for (int i = 0; i <= n_preambles; ++i) {
        double log_p = log_choose(n_preambles, i);
        if (i > 0) {
            log_p += i * log_success;
        }
        if (n_preambles - i > 0) {
            log_p += (n_preambles - i) * log_failure;
        }
        const double p = std::exp(log_p);
        pmf.p[static_cast<std::size_t>(i)] = std::clamp(std::isfinite(p) ? p : 0.0, 0.0, 1.0);
    }
    for (double p : pmf.p) {
        pmf.sum += p;
    }
    return pmf;
}

std::vector<double> granted_pmf_exact(int n_users, int n_preambles, std::size_t n_mc, Rng& rng)
{
    std::vector<double> pmf(static_cast<std::size_t>(n_preambles) + 1, 0.0);
    for (std::size_t t = 0; t < n_mc; ++t) {
        pmf[simulate_rr(rng, n_users, n_preambles).n_granted()] += 1.0;
    }
    for (auto& p : pmf) {
        p /= static_cast<double>(n_mc);
    }
    return pmf;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b)
{
    const std::size_t n = std::max(a.size(), b.size());
    double tv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        tv += std::abs(x - y);
    }
    return 0.5 * tv;
}

} // namespace risra
