#include "idhb/sh.hpp"

#include <algorithm>

namespace idhb {

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t v = 1;
    for (int i = 0; i < exp; ++i) v *= base;
    return v;
}

std::vector<ConfigId> sorted_unique(std::vector<ConfigId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<ConfigId> union_ids(const std::vector<ConfigId>& a,
                                const std::vector<ConfigId>& b) {
    std::vector<ConfigId> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<ConfigId> diff_ids(const std::vector<ConfigId>& a,
                               const std::vector<ConfigId>& b) {
    std::vector<ConfigId> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

void validate_inputs(const ShInputs& in) {
    if (in.eta < 2) throw std::invalid_argument("sh: eta must be >= 2");
    if (in.r < 1) throw std::invalid_argument("sh: base level r must be >= 1");
    if (in.rounds < 0) throw std::invalid_argument("sh: rounds must be >= 0");
    if (in.r * ipow(in.eta, in.rounds) != in.R)
        throw std::invalid_argument("sh: R must equal r * eta^s");
}

// Old pools must be nested, and the arms a round compares from the cache —
// the members of C_k \ C_{k+1}, the previous run's discards at that level —
// must be cached at exactly r*eta^k. Arms protected past round k are never
// read there (deeper lineages legitimately lack their upper levels), so they
// are not checked. Violations indicate caller bugs and are rejected, not
// repaired.
void validate_old_state(const ShInputs& in, const OldShState& old,
                        const EvaluationCache& cache) {
    if (old.empty()) return;
    std::vector<std::vector<ConfigId>> pools;
    pools.reserve(old.pools.size());
    for (const auto& p : old.pools) pools.push_back(sorted_unique(p));
    for (std::size_t k = 0; k + 1 < pools.size(); ++k) {
        for (ConfigId c : pools[k + 1])
            if (!std::binary_search(pools[k].begin(), pools[k].end(), c))
                throw std::invalid_argument(
                    "sh: old pools are not nested (config " + std::to_string(c) +
                    " enters round " + std::to_string(k + 1) + " from nowhere)");
    }
    std::size_t aligned = std::min(pools.size(),
                                   static_cast<std::size_t>(in.rounds));
    static const std::vector<ConfigId> kNone;
    for (std::size_t k = 0; k < aligned; ++k) {
        Level level = in.r * ipow(in.eta, static_cast<int>(k));
        const auto& next = k + 1 < pools.size() ? pools[k + 1] : kNone;
        for (ConfigId c : pools[k]) {
            if (std::binary_search(next.begin(), next.end(), c)) continue;
            if (!cache.contains(c, level))
                throw std::invalid_argument(
                    "sh: old config " + std::to_string(c) +
                    " has no cached loss at aligned level " + std::to_string(level));
        }
    }
}

std::map<ConfigId, double> read_pool(const std::vector<ConfigId>& pool,
                                     Level level, CoreHandles& h) {
    std::map<ConfigId, double> losses;
    for (ConfigId c : pool) losses[c] = evaluate(c, level, h);
    return losses;
}

ShRound make_round(Level level, std::vector<ConfigId> pool,
                   std::vector<ConfigId> kept,
                   const std::vector<ConfigId>& protected_arms,
                   std::int64_t charged, std::int64_t prescribed) {
    ShRound rd;
    rd.level = level;
    rd.prescribed = prescribed;
    rd.pool = std::move(pool);
    rd.kept = std::move(kept);
    std::vector<ConfigId> kept_sorted = sorted_unique(rd.kept);
    rd.promoted = union_ids(kept_sorted, protected_arms);
    rd.discarded = diff_ids(rd.pool, rd.promoted);
    rd.charged = charged;
    return rd;
}

ShTrace finish(std::vector<ShRound> rounds, std::int64_t charged,
               const EvaluationCache& cache) {
    ShTrace tr;
    tr.rounds = std::move(rounds);
    tr.charged = charged;
    if (tr.rounds.empty()) return tr;
    tr.final_set = tr.rounds.back().promoted;
    for (ConfigId c : tr.final_set) {
        auto obs = cache.deepest(c);
        if (!obs)
            throw ContractError("final survivor " + std::to_string(c) +
                                " has no cached evaluation");
        if (tr.winner < 0 || obs->second < tr.winner_loss) {
            tr.winner = c;
            tr.winner_loss = obs->second;
        }
    }
    return tr;
}

// Old arms join a final-round selection only where the cache already holds
// their loss at the top level; a deepening never pays to re-audition them.
std::vector<ConfigId> cached_at(const std::vector<ConfigId>& arms, Level level,
                                const EvaluationCache& cache) {
    std::vector<ConfigId> out;
    for (ConfigId c : arms)
        if (cache.contains(c, level)) out.push_back(c);
    return out;
}

} // namespace

const std::vector<ConfigId>& OldShState::pool(std::size_t k) const {
    static const std::vector<ConfigId> kEmpty;
    return k < pools.size() ? pools[k] : kEmpty;
}

ShTrace run_sh(const ShInputs& in, CoreHandles& h) {
    validate_inputs(in);
    if (in.fresh_arms.empty()) throw std::invalid_argument("run_sh: empty arm set");
    std::vector<ConfigId> alive = sorted_unique(in.fresh_arms);
    if (alive.size() != in.fresh_arms.size())
        throw std::invalid_argument("run_sh: duplicate arm ids");
    const std::int64_t n = static_cast<std::int64_t>(alive.size());

    std::vector<ShRound> rounds;
    std::int64_t charged_total = 0;
    for (int k = 0; k <= in.rounds; ++k) {
        Level level = in.r * ipow(in.eta, k);
        std::int64_t before = h.ledger.total();
        auto losses = read_pool(alive, level, h);
        std::int64_t keep_n = std::max<std::int64_t>(1, n / ipow(in.eta, k + 1));
        auto kept = top_k(alive, losses, keep_n);
        std::int64_t charged = h.ledger.total() - before;
        charged_total += charged;
        rounds.push_back(make_round(level, alive, kept, {}, charged,
                                    static_cast<std::int64_t>(alive.size())));
        alive = rounds.back().promoted;
    }
    return finish(std::move(rounds), charged_total, h.cache);
}

ShTrace run_eid_sh(const ShInputs& in, const OldShState& old, CoreHandles& h) {
    validate_inputs(in);
    validate_old_state(in, old, h.cache);
    std::vector<ConfigId> fresh = sorted_unique(in.fresh_arms);
    if (fresh.size() != in.fresh_arms.size())
        throw std::invalid_argument("run_eid_sh: duplicate arm ids");
    const std::vector<ConfigId> c0 = sorted_unique(old.pool(0));
    for (ConfigId c : fresh)
        if (std::binary_search(c0.begin(), c0.end(), c))
            throw std::invalid_argument("run_eid_sh: fresh arm " + std::to_string(c) +
                                        " already in the old pool");
    const std::int64_t n_tilde = static_cast<std::int64_t>(c0.size());
    const std::int64_t n = static_cast<std::int64_t>(fresh.size()) + n_tilde;
    if (n == 0) throw std::invalid_argument("run_eid_sh: empty arm set");

    std::vector<ShRound> rounds;
    std::int64_t charged_total = 0;
    std::vector<ConfigId> quota_side = fresh; // S_k: the arms pulled each round
    for (int k = 0; k <= in.rounds; ++k) {
        Level level = in.r * ipow(in.eta, k);
        const std::vector<ConfigId> ck = sorted_unique(old.pool(k));
        const std::vector<ConfigId> ck1 =
            k < in.rounds ? sorted_unique(old.pool(k + 1)) : std::vector<ConfigId>{};

        std::vector<ConfigId> pool;
        std::vector<ConfigId> protected_arms;
        std::int64_t keep_n = 0;
        if (k < in.rounds) {
            // Old arms discarded at this very level re-enter; arms already
            // promoted past it (C_{k+1}) are protected and not compared.
            pool = union_ids(quota_side, diff_ids(ck, ck1));
            protected_arms = ck1;
            std::int64_t denom = ipow(in.eta, k + 1);
            keep_n = n / denom - n_tilde / denom;
            if (keep_n == 0 && ck1.empty())
                keep_n = 1; // nothing protected to carry the round; mirrors run_sh
        } else {
            // Final round: protected arms stay promoted and contend for the
            // returned winner on their deepest cached loss; the selection at
            // the top level itself admits them only when that loss is
            // already paid for.
            pool = union_ids(quota_side, cached_at(ck, level, h.cache));
            protected_arms = ck;
            keep_n = std::max<std::int64_t>(1, n / ipow(in.eta, in.rounds + 1));
        }

        std::int64_t prescribed = static_cast<std::int64_t>(quota_side.size());
        std::int64_t before = h.ledger.total();
        auto losses = read_pool(pool, level, h);
        auto kept = top_k(pool, losses, keep_n);
        std::int64_t charged = h.ledger.total() - before;
        charged_total += charged;
        rounds.push_back(make_round(level, std::move(pool), kept, protected_arms,
                                    charged, prescribed));
        quota_side = sorted_unique(rounds.back().kept);
    }
    return finish(std::move(rounds), charged_total, h.cache);
}

ShTrace run_did_sh(const ShInputs& in, const OldShState& old, CoreHandles& h) {
    validate_inputs(in);
    validate_old_state(in, old, h.cache);
    std::vector<ConfigId> fresh = sorted_unique(in.fresh_arms);
    const std::vector<ConfigId> c0 = sorted_unique(old.pool(0));
    for (ConfigId c : fresh)
        if (std::binary_search(c0.begin(), c0.end(), c))
            throw std::invalid_argument("run_did_sh: fresh arm " + std::to_string(c) +
                                        " already in the old pool");
    std::vector<ConfigId> alive = union_ids(fresh, c0);
    if (alive.empty()) throw std::invalid_argument("run_did_sh: empty arm set");
    const std::int64_t n = static_cast<std::int64_t>(alive.size());

    std::vector<ShRound> rounds;
    std::int64_t charged_total = 0;
    for (int k = 0; k <= in.rounds; ++k) {
        Level level = in.r * ipow(in.eta, k);
        const std::vector<ConfigId> ck = sorted_unique(old.pool(k));
        std::int64_t before = h.ledger.total();
        // Pull the arms the cache cannot supply, then read the whole pool.
        for (ConfigId c : diff_ids(alive, ck)) evaluate(c, level, h);
        auto losses = read_pool(alive, level, h);
        std::int64_t keep_n = std::max<std::int64_t>(1, n / ipow(in.eta, k + 1));
        auto kept = top_k(alive, losses, keep_n);
        std::int64_t charged = h.ledger.total() - before;
        charged_total += charged;
        rounds.push_back(make_round(level, alive, kept, {}, charged,
                                    static_cast<std::int64_t>(alive.size())));
        alive = rounds.back().promoted;
    }
    return finish(std::move(rounds), charged_total, h.cache);
}

ShTrace run_pid_sh(const ShInputs& in, const OldShState& old, CoreHandles& h) {
    validate_inputs(in);
    validate_old_state(in, old, h.cache);
    std::vector<ConfigId> fresh = sorted_unique(in.fresh_arms);
    const std::vector<ConfigId> c0 = sorted_unique(old.pool(0));
    for (ConfigId c : fresh)
        if (std::binary_search(c0.begin(), c0.end(), c))
            throw std::invalid_argument("run_pid_sh: fresh arm " + std::to_string(c) +
                                        " already in the old pool");
    std::vector<ConfigId> chain = union_ids(fresh, c0); // S_k
    if (chain.empty()) throw std::invalid_argument("run_pid_sh: empty arm set");
    const std::int64_t n = static_cast<std::int64_t>(chain.size());

    std::vector<ShRound> rounds;
    std::int64_t charged_total = 0;
    for (int k = 0; k <= in.rounds; ++k) {
        Level level = in.r * ipow(in.eta, k);
        const std::vector<ConfigId> ck = sorted_unique(old.pool(k));
        // Already evaluated old arms at this level return to contention; at
        // the final round only those whose top-level loss the cache already
        // holds (the chain is pulled there either way).
        std::vector<ConfigId> pool =
            k < in.rounds ? union_ids(chain, ck)
                          : union_ids(chain, cached_at(ck, level, h.cache));
        std::int64_t before = h.ledger.total();
        auto losses = read_pool(pool, level, h);
        std::int64_t keep_n = std::max<std::int64_t>(1, n / ipow(in.eta, k + 1));
        std::int64_t prescribed = static_cast<std::int64_t>(chain.size());
        auto kept = top_k(pool, losses, keep_n);
        std::int64_t charged = h.ledger.total() - before;
        charged_total += charged;
        rounds.push_back(make_round(level, std::move(pool), kept, {}, charged,
                                    prescribed));
        chain = rounds.back().promoted;
    }
    return finish(std::move(rounds), charged_total, h.cache);
}

} // namespace idhb
