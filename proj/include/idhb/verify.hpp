#pragma once

#include "idhb/harness.hpp"
#include "idhb/theory.hpp"

#include <string>
#include <vector>

namespace idhb {

// One referee property, machine-checkable: measured behavior against the
// theory oracles or a frozen fixture.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string details;
};

struct VerifyOptions {
    int instances = 100;       // randomized-instance suites
    int mc_runs = 200;         // Monte-Carlo run count (confidence referee)
    int compare_seeds = 30;    // seeds of the comparison suite
    int jobs = 0;              // worker cap for seed sweeps
    std::uint64_t seed = 173; // master seed of the randomized suites
};

// Bracket arithmetic tables for R=16 -> 32 (eta=2) and 9 -> 27 (eta=3).
CheckResult check_bracket_tables();

// deepen(mode=d) with replayed sampler equals a fresh run at R_t: incumbent
// and every survivor set bit-exact, plus the charged-pull identity
// charged(dID) = charged(fresh) - sum of reused levels.
CheckResult check_did_equivalence(int instances, std::uint64_t seed);

// Every bracket of every mode stays within B = (s_max+1) R_t.
CheckResult check_budget_cap(int instances, std::uint64_t seed);

// Sufficient budget: B >= z_{ID-SH} forces an eps/2-optimal return from all
// three variants.
CheckResult check_sufficient_budget_referee(int instances, std::uint64_t seed);

// A budget below z is outside the guarantee's premise; the referee reports
// "guarantee not applicable" rather than a failure.
CheckResult check_budget_applicability_gate();

// Pull ratios: ledger(xID) <= ledger(SH) exactly, and the closed-form
// fractions bound the measured ratios in exact rational arithmetic; spot
// values 0.625 and 0.95 reproduced.
CheckResult check_pull_bound_referee(int instances, std::uint64_t seed);

// Confidence condition: sampling branch = 5 at (alpha .5, delta .1, eta 2)
// exactly, and the empirical eps-optimal frequency over seeded runs clears
// 1 - delta minus the 95% binomial margin. The budget branch is evaluated
// and reported as stated.
CheckResult check_confidence_referee(int mc_runs, std::uint64_t seed);

// Comparison suite over 30 seeds: mean incumbent gap <= 0.01 per mode and
// mean deepen-phase budget ratio < 1 with ordering e <= p <= d.
CheckResult check_figure_surrogate(int seeds, int jobs);

// Save/load round-trip byte identity and deepen-after-reload equality for
// all modes.
CheckResult check_persistence(int seeds, std::uint64_t seed);

// The shipped crossing instance separates the three policies pairwise.
CheckResult check_distinction_witness();

// Measured SH pulls respect the closed-form lower bound on random instances.
CheckResult check_sh_lower_bound(int instances, std::uint64_t seed);

// Clamped pull-ratio fractions are nonincreasing in n_tilde.
CheckResult check_clamp_monotonicity();

// Named suite ("default" runs everything).
std::vector<CheckResult> run_verify_suite(const std::string& suite,
                                          const VerifyOptions& opt);

} // namespace idhb
