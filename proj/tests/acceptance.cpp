// Acceptance suite: one machine-checked line per criterion, each run at its
// stated scale and time budget. Exit status is nonzero if any criterion
// fails.

#include "idhb/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

namespace {

struct Criterion {
    int number;
    const char* title;
    double time_budget_s;
    std::function<idhb::CheckResult()> run;
};

} // namespace

int main() {
    using namespace idhb;
    namespace chrono = std::chrono;
    const std::uint64_t seed = 173;

    const Criterion criteria[] = {
        {1, "bracket arithmetic tables", 1.0, [] { return check_bracket_tables(); }},
        {2, "dID-HB equivalence over randomized instances", 30.0,
         [&] { return check_did_equivalence(100, seed); }},
        {3, "per-bracket budget cap, every mode", 30.0,
         [&] { return check_budget_cap(100, seed + 1); }},
        {4, "sufficient-budget eps/2-optimality referee", 30.0,
         [&] { return check_sufficient_budget_referee(100, seed + 2); }},
        {5, "pull-ratio bound referee with exact spot values", 30.0,
         [&] { return check_pull_bound_referee(100, seed + 3); }},
        {6, "confidence referee (sampling branch + Monte-Carlo)", 120.0,
         [&] { return check_confidence_referee(200, seed + 4); }},
        {7, "30-seed comparison: quality gap and budget ordering", 120.0,
         [] { return check_figure_surrogate(30, 0); }},
        {8, "persistence round-trip and deepen-after-reload", 30.0,
         [&] { return check_persistence(20, seed + 5); }},
        {9, "variant-distinction witness (frozen fixture)", 1.0,
         [] { return check_distinction_witness(); }},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        auto t0 = chrono::steady_clock::now();
        CheckResult res;
        try {
            res = c.run();
        } catch (const std::exception& e) {
            res = CheckResult{c.title, false, std::string("exception: ") + e.what()};
        }
        double secs = chrono::duration<double>(chrono::steady_clock::now() - t0).count();
        bool in_budget = secs <= c.time_budget_s;
        bool pass = res.pass && in_budget;
        if (!pass) ++failures;
        std::printf("%s criterion %d (%s): %s [%.2fs / %.0fs]%s\n",
                    pass ? "PASS" : "FAIL", c.number, c.title, res.details.c_str(),
                    secs, c.time_budget_s, in_budget ? "" : " TIME BUDGET EXCEEDED");
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
