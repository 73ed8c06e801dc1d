#pragma once

#include <cstddef>
#include <vector>

#include "risra/rng.hpp"

namespace risra {

/// Users whose preamble was picked by nobody else in one RR phase.
struct GrantOutcome {
    std::vector<int> granted; // ascending user indices
    std::size_t n_granted() const noexcept { return granted.size(); }
};

/// One RR phase: every user picks one of n_preambles uniformly.
GrantOutcome simulate_rr(Rng& rng, int n_users, int n_preambles);

/// E[K_n] = K ((S-1)/S)^{K-1}.
double expected_granted(int n_users, int n_preambles);

struct GrantedPmf {
    std::vector<double> p; // index I = 0..S
    double sum = 0.0;      // sum of the entries after clamping
    double mean() const;
};

/// Closed form used by the offline solver,
///   p_I = C(S,I) K^I (S-1)^{I(K-1)} (S^K - K(S-1)^{K-1})^{S-I} / S^{KS},
/// evaluated in log space. Treats the S per-preamble success events as
/// independent, so it is only an approximation of simulate_rr.
GrantedPmf granted_pmf_closed_form(int n_users, int n_preambles);

/// Empirical pmf of the granted count from n_mc simulated RR phases.
std::vector<double> granted_pmf_exact(int n_users, int n_preambles, std::size_t n_mc, Rng& rng);

double total_variation(const std::vector<double>& a, const std::vector<double>& b);

} // namespace risra
