#pragma once

#include "idhb/core.hpp"

namespace idhb {

// Inputs of one Successive Halving invocation. Levels are r, r*eta, ...,
// r*eta^s = R; exact divisibility is required so that cached old-run losses
// line up with the new rounds.
struct ShInputs {
    std::vector<ConfigId> fresh_arms; // S, in sampling order
    Level r = 1;                      // base level
    int eta = 2;
    int rounds = 0;                   // s: number of halving rounds
    Level R = 1;                      // max level, R = r * eta^s
};

// State handed over from a previous run: the survivor chain C_0 >= C_1 >= ...
// pools[k] is the set alive entering old round k; the last entry is the old
// run's final output set. Members of pools[k] for k <= s-1 must be cached at
// exactly r*eta^k (asserted, not coerced).
struct OldShState {
    std::vector<std::vector<ConfigId>> pools;

    bool empty() const { return pools.empty(); }
    std::int64_t promoted_count() const {
        return pools.empty() ? 0 : static_cast<std::int64_t>(pools.front().size());
    }
    // C_k, or the empty set when k is past the recorded chain.
    const std::vector<ConfigId>& pool(std::size_t k) const;
};

// Everything one round did, for tests and for the bracket record.
struct ShRound {
    Level level = 1;
    std::vector<ConfigId> pool;      // arms whose loss at `level` was read
    std::vector<ConfigId> kept;      // this round's top-k output (loss asc, id asc)
    std::vector<ConfigId> promoted;  // survivors into the next round (kept + protected)
    std::vector<ConfigId> discarded; // pool \ kept
    std::int64_t charged = 0;        // ledger units added this round
    // |S_k|: the round's pull prescription (the quota side for eID, the
    // survivor chain otherwise). Sum(prescribed * level) is the quantity the
    // bracket budget bounds; the ledger can sit below it (cache reuse) or,
    // at a deepening's final round, above it (old survivors re-evaluated at
    // the new top level, a cost that belongs to the larger run).
    std::int64_t prescribed = 0;
};

struct ShTrace {
    std::vector<ShRound> rounds;
    std::vector<ConfigId> final_set; // last round's promoted set
    // Member of final_set minimizing its deepest cached loss (tie: smaller
    // id). For the fresh-chain variants this is the final round's top
    // selection; for eID it lets a protected arm win on the loss it already
    // earned, without a new pull.
    ConfigId winner = -1;
    double winner_loss = 0.0;
    std::int64_t charged = 0; // total ledger units added by this call
};

// Classic Successive Halving: n_k = floor(n/eta^k) survivors evaluated at
// r_k = r*eta^k, keep the best floor(n/eta^(k+1)) (never fewer than one).
ShTrace run_sh(const ShInputs& in, CoreHandles& h);

// Efficient variant: only the fresh-side quota floor(n/eta^k) - floor(nt/eta^k)
// is ever pulled; previously promoted arms are protected until the final
// round, where S_s and C_s compete at the new top level.
ShTrace run_eid_sh(const ShInputs& in, const OldShState& old, CoreHandles& h);

// Discarding variant: old and fresh arms form one pool and every prior
// decision is revisable; the cache alone makes old evaluations free.
ShTrace run_did_sh(const ShInputs& in, const OldShState& old, CoreHandles& h);

// Preserving variant: like dID, but the round-k selection pool is S_k u C_k,
// so arms the continued run discarded at this level re-enter contention.
ShTrace run_pid_sh(const ShInputs& in, const OldShState& old, CoreHandles& h);

} // namespace idhb
