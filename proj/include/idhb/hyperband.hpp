#pragma once

#include "idhb/bench.hpp"
#include "idhb/core.hpp"
#include "idhb/rng.hpp"
#include "idhb/sh.hpp"

#include <optional>

namespace idhb {

struct HbParams {
    Level R = 1;
    int eta = 2;

    int s_max() const;                    // floor(log_eta R)
    std::int64_t budget() const;          // B = (s_max + 1) * R
    std::int64_t pool_size(int s) const;  // n_s = ceil((s_max+1) * eta^s / (s+1))
    Level start_level(int s) const;       // r_s = R / eta^s
    void validate() const;                // R >= 1, eta >= 2, eta^s_max | R
};

// One SH iteration inside a bracket, as recorded in the run state: the level,
// every (config, loss) read at that level, and the promotion decision.
struct IterationRecord {
    Level level = 1;
    std::vector<std::pair<ConfigId, double>> losses; // id ascending
    std::vector<ConfigId> promoted;                  // id ascending
    std::vector<ConfigId> discarded;                 // id ascending
    std::int64_t prescribed = 0;                     // pull prescription |S_i|
};

struct BracketState {
    int s = 0;
    std::int64_t n_start = 0;
    Level r_start = 1;
    std::vector<IterationRecord> iterations; // i = 0..s
    std::int64_t charged = 0;                // ledger units spent in this bracket

    // Pool entering iteration i: promoted(i-1), or promoted(0) u discarded(0)
    // for i = 0.
    std::vector<ConfigId> alive(int i) const;
};

struct Incumbent {
    ConfigId config = -1;
    double loss = 0.0;
    Level level = 1;   // the config's highest evaluated level
    int bracket_s = 0; // bracket of observation
};

enum class DeepenMode { Efficient, Preserving, Discarding };

char mode_letter(DeepenMode m);
DeepenMode mode_from_letter(char c); // 'e' | 'p' | 'd', else invalid_argument

// Full Hyperband state of one lineage step. Completed states are immutable;
// deepen() copies, never mutates its input.
struct RunState {
    int t = 0; // lineage index: 0 = fresh run, +1 per deepening
    Level R_t = 1;
    int eta = 2;
    SplitMixRng rng;
    std::vector<BracketState> brackets; // execution order s_max..0
    EvaluationCache cache;
    PullLedger ledger; // cumulative across the lineage
    std::int64_t next_config_id = 0;
    CurveTable configs;
    BenchmarkSpec benchmark;
    std::map<ConfigId, ConfigId> tabular_source; // internal id -> grid row
    std::int64_t phase_start_total = 0;          // ledger total when this phase began
    std::int64_t phase_reused = 0;               // cache hits during this phase
    std::optional<Incumbent> lineage_best;       // best across all phases

    HbParams params() const { return {R_t, eta}; }
    std::int64_t phase_charged() const { return ledger.total() - phase_start_total; }
};

// Fresh Hyperband run: for s = s_max..0 samples n_s configs and runs classic
// SH with start level r_s over s rounds.
RunState run_hb(HbParams params, const BenchmarkSpec& bench, std::uint64_t seed);

// Same, but starting from an explicit stream position (e.g. an independent
// baseline that continues a previous run's sampler).
RunState run_hb_with_rng(HbParams params, const BenchmarkSpec& bench,
                         SplitMixRng rng);

// Fresh Hyperband over predetermined per-bracket pools (curves already
// materialized). This is the replayed IH-HB baseline of the comparison
// harness and the dID equivalence oracle's reference side.
struct ReplayPlan {
    std::vector<std::vector<ConfigId>> pools; // one per bracket, s_max..0 order
    CurveTable curves;
};
RunState run_hb_replay(HbParams params, const ReplayPlan& plan,
                       const BenchmarkSpec& bench, SplitMixRng rng_snapshot);

// Continue a completed run with max size eta * R_{t-1}. For each new bracket
// s > 0 the old bracket s-1 supplies the survivor chain and the cache
// supplies its losses; delta = n_t - n_{t-1} fresh configs are appended after
// the old ones. Bracket 0 is entirely fresh.
RunState deepen(const RunState& prev, DeepenMode mode);

// Configuration minimizing the recorded loss at its own highest evaluated
// level, over this state's brackets; ties broken by smaller id. Error when
// nothing was recorded.
Incumbent incumbent(const RunState& state);

// Per-bracket winner (first element of the final promoted set by loss).
std::optional<ConfigId> bracket_winner(const BracketState& b);

// True when every bracket s carries its full s+1 iterations.
bool is_complete(const RunState& state);

} // namespace idhb
