#pragma once

#include "idhb/hyperband.hpp"

#include <string>

namespace idhb {

// Four-way strategy comparison over seeds. Mode "ih" is the
// discard-and-restart baseline: a fresh run at R_t = eta * R0.
struct CompareConfig {
    BenchmarkSpec benchmark = BenchmarkSpec::synthetic(SamplerSpec{});
    Level R0 = 16;
    int eta = 2;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> modes = {"ih", "e", "p", "d"};
    // Replay on: the baseline consumes the same config stream as the
    // deepenings (old configs first, then the fresh draws), making every
    // comparison paired and the dID equivalence exact. Off: the baseline
    // samples independently by continuing the stream.
    bool replay = true;
    int jobs = 0; // OpenMP worker cap; 0 = library default
};

struct ComparisonRow {
    std::uint64_t seed = 0;
    std::string mode;
    double incumbent_loss = 0.0;
    std::int64_t budget_deepen = 0;  // charged during this phase only
    std::int64_t budget_lineage = 0; // cumulative over the lineage
    std::int64_t reused_evals = 0;   // cache hits during the phase
};

// All rows for one seed, in canonical mode order (ih, e, p, d).
std::vector<ComparisonRow> compare_one_seed(const CompareConfig& cfg,
                                            std::uint64_t seed);

// Seeds run in an OpenMP worker pool with fully isolated run state; output
// is ordered by (seed, mode) and identical to the serial path byte for byte.
std::vector<ComparisonRow> run_comparison(const CompareConfig& cfg);

// Single-threaded reference implementation kept for testing and benchmarks.
std::vector<ComparisonRow> run_comparison_serial(const CompareConfig& cfg);

// CSV with the binding header seed,mode,incumbent_loss,budget_deepen,
// budget_lineage,reused_evals.
std::string rows_to_csv(const std::vector<ComparisonRow>& rows);

struct ModeAggregate {
    std::string mode;
    double mean_incumbent = 0.0;
    double mean_gap_vs_ih = 0.0;     // mean |incumbent(mode) - incumbent(ih)|
    double mean_budget_deepen = 0.0;
    double mean_budget_ratio = 0.0;  // vs the ih deepen-phase budget
    double mean_reused = 0.0;
};

// Per-mode means over seeds; gap/ratio columns need ih rows and are NaN
// otherwise.
std::vector<ModeAggregate> aggregate_rows(const std::vector<ComparisonRow>& rows);

std::string aggregate_to_csv(const std::vector<ModeAggregate>& agg);
std::string aggregate_to_table(const std::vector<ModeAggregate>& agg);

// Fresh-run baseline used by the harness: replayed pools when `replay`,
// otherwise an independent continuation of the sampler stream.
RunState run_ih_baseline(const RunState& prev, const RunState& any_deepened,
                         bool replay);

} // namespace idhb
