#pragma once

#include "idhb/core.hpp"

#include <utility>

namespace idhb {

// Exact rational on int64 with __int128 intermediates. The pull-ratio bounds
// have integer inputs, so evaluating them here keeps the referee comparisons
// free of rounding.
struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1; // > 0, gcd(num, den) == 1

    static Rat of(std::int64_t n, std::int64_t d);
    static Rat whole(std::int64_t n) { return Rat{n, 1}; }

    Rat operator+(const Rat& o) const;
    Rat operator-(const Rat& o) const;
    Rat operator*(const Rat& o) const;
    Rat operator/(const Rat& o) const;
    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rat& o) const;
    bool operator<=(const Rat& o) const { return *this < o || *this == o; }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// The instance a theory oracle referees: sorted limit losses, the declared
// envelope, and the SH parameterization the bounds are stated for.
struct InstanceSpec {
    std::vector<double> nu; // nondecreasing
    Envelope envelope = Envelope::power(1.0, 1.0);
    int eta = 2;
    Level R = 1;
    int rounds = 0;          // s
    std::int64_t n_tilde = 0;
    double eps = 0.1;
};

// Evaluated bound quantities for one instance.
struct BoundReport {
    double z_id_sh = 0.0;
    double eid_fraction_raw = 0.0;
    double eid_fraction_clamped = 0.0;
    double pdid_fraction_raw = 0.0;
    double pdid_fraction_clamped = 0.0;
    std::pair<double, double> min_size_terms{0.0, 0.0}; // (sampling, budget)
    double gamma_bar_inv = 0.0;
};

// Smallest integer L with eta^L >= n.
int ceil_log(int eta, std::int64_t n);

// Sufficient budget for an eps/2-optimal return from any of the three
// iterative-deepening SH variants:
//   eta * ceil(log_eta n) * max_{i=2..n} i * (1 + min{R, gamma^-1(max{eps/4, (nu_i-nu_1)/2})})
// n < 2 is a domain error; nu must be nondecreasing.
double z_id_sh(const InstanceSpec& spec);

// Per-bracket variant of the first factor (the form used inside the ID-HB
// budget derivation): ceil(log_eta n) is evaluated at the bracket pool size.
double z_id_sh_bracket_form(const InstanceSpec& spec, std::int64_t bracket_pool);

struct BoundFraction {
    Rat raw;
    Rat clamped; // min(1, max(0, raw))
};

// Worst-case fraction of SH pulls the efficient variant needs.
BoundFraction eid_pull_bound(std::int64_t n, std::int64_t n_tilde, int s, Level R,
                             int eta);

// Same for the preserving/discarding variants.
BoundFraction pdid_pull_bound(std::int64_t n, std::int64_t n_tilde, int s, Level R,
                              int eta);

// Lower bound on the pulls of a fresh SH run (denominator of both ratios).
Rat sh_pull_lower_bound(std::int64_t n, int s, Level R, int eta);

// ceil(log_{1-alpha}(delta)): sample count that contains an eps-optimal
// config with probability >= 1-delta when the eps-optimal proportion of the
// search space is alpha.
std::int64_t sample_size_for_confidence(double alpha, double delta);

struct BudgetConditionResult {
    bool holds = false;           // R dominates both branches
    double sampling_branch = 0.0; // ceil(log_{1-alpha} delta) * (eta-1) + 1
    double budget_branch = 0.0;
    double gamma_bar_inv = 0.0;
    double budget_sum_exact = 0.0; // pre-estimate: sum_s eta*ceil(log_eta n_s)*max_i(...)
};

// Evaluates both branches of the ID-HB budget condition. bracket_limits[s]
// holds the sorted limit losses of bracket s (s = 0..floor(log_eta R)).
// R < eta is a domain error (log_eta log_eta R is not meaningful there).
BudgetConditionResult deepening_budget_condition(int eta, Level R, double alpha, double delta,
                          const std::vector<std::vector<double>>& bracket_limits,
                          const Envelope& env, double eps);

// All bound quantities for one instance in a single report. The budget
// condition is evaluated with the instance's own limits as the (single)
// bracket.
BoundReport make_bound_report(const InstanceSpec& spec, double alpha, double delta);

} // namespace idhb
