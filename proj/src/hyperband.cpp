#include "idhb/hyperband.hpp"

#include <algorithm>

namespace idhb {

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t v = 1;
    for (int i = 0; i < exp; ++i) v *= base;
    return v;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::vector<ConfigId> union_sorted(std::vector<ConfigId> a,
                                   const std::vector<ConfigId>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

} // namespace

// --- HbParams -----------------------------------------------------------------

int HbParams::s_max() const {
    int s = 0;
    while (ipow(eta, s + 1) <= R) ++s;
    return s;
}

std::int64_t HbParams::budget() const { return (s_max() + 1) * R; }

std::int64_t HbParams::pool_size(int s) const {
    return ceil_div(static_cast<std::int64_t>(s_max() + 1) * ipow(eta, s), s + 1);
}

Level HbParams::start_level(int s) const { return R / ipow(eta, s); }

void HbParams::validate() const {
    if (R < 1) throw std::invalid_argument("hyperband: R must be >= 1");
    if (eta < 2) throw std::invalid_argument("hyperband: eta must be >= 2");
    if (R % ipow(eta, s_max()) != 0)
        throw std::invalid_argument(
            "hyperband: R must be divisible by eta^s_max so that every bracket's "
            "start level r_s = R/eta^s is an integer resource count");
}

// --- BracketState ---------------------------------------------------------------

std::vector<ConfigId> BracketState::alive(int i) const {
    if (i < 0 || i >= static_cast<int>(iterations.size()))
        throw std::out_of_range("bracket iteration out of range");
    if (i == 0)
        return union_sorted(iterations[0].promoted, iterations[0].discarded);
    return iterations[i - 1].promoted;
}

char mode_letter(DeepenMode m) {
    switch (m) {
    case DeepenMode::Efficient: return 'e';
    case DeepenMode::Preserving: return 'p';
    case DeepenMode::Discarding: return 'd';
    }
    throw std::logic_error("unreachable");
}

DeepenMode mode_from_letter(char c) {
    switch (c) {
    case 'e': return DeepenMode::Efficient;
    case 'p': return DeepenMode::Preserving;
    case 'd': return DeepenMode::Discarding;
    default:
        throw std::invalid_argument(std::string("unknown deepening mode '") + c +
                                    "' (expected e, p or d)");
    }
}

// --- sampling -------------------------------------------------------------------

namespace {

// Draws `count` new configs into the state, continuing its rng stream.
// Synthetic draws consume three stream values each; tabular draws pick
// uniformly among the grid rows not sampled so far.
std::vector<ConfigId> sample_fresh(RunState& st, std::int64_t count,
                                   const TabularBenchmark* grid) {
    std::vector<ConfigId> out;
    out.reserve(static_cast<std::size_t>(count));
    if (st.benchmark.kind == BenchmarkSpec::Kind::Synthetic) {
        for (std::int64_t i = 0; i < count; ++i) {
            ConfigId id = st.next_config_id++;
            st.configs.add(id, draw_curve(st.benchmark.sampler, st.rng));
            out.push_back(id);
        }
        return out;
    }
    std::vector<ConfigId> remaining;
    {
        std::vector<ConfigId> used;
        used.reserve(st.tabular_source.size());
        for (const auto& [internal, row] : st.tabular_source) used.push_back(row);
        std::sort(used.begin(), used.end());
        for (ConfigId row : grid->config_ids())
            if (!std::binary_search(used.begin(), used.end(), row))
                remaining.push_back(row);
    }
    if (count > static_cast<std::int64_t>(remaining.size()))
        throw std::runtime_error(
            "sampler exhausted: benchmark has only " +
            std::to_string(remaining.size()) + " unsampled configs, need " +
            std::to_string(count));
    for (std::int64_t i = 0; i < count; ++i) {
        std::int64_t idx = st.rng.uniform_int(static_cast<std::int64_t>(remaining.size()));
        ConfigId row = remaining[static_cast<std::size_t>(idx)];
        remaining.erase(remaining.begin() + idx);
        ConfigId id = st.next_config_id++;
        st.configs.add(id, grid->curve_for(row));
        st.tabular_source[id] = row;
        out.push_back(id);
    }
    return out;
}

BracketState record_bracket(const RunState& st, int s, std::int64_t n_start,
                            Level r_start, const ShTrace& trace) {
    BracketState b;
    b.s = s;
    b.n_start = n_start;
    b.r_start = r_start;
    b.charged = trace.charged;
    for (const ShRound& rd : trace.rounds) {
        IterationRecord rec;
        rec.level = rd.level;
        for (ConfigId c : rd.pool) {
            const double* v = st.cache.find(c, rd.level);
            if (!v) throw std::logic_error("pool read missing from cache");
            rec.losses.emplace_back(c, *v);
        }
        rec.promoted = rd.promoted;
        rec.discarded = rd.discarded;
        rec.prescribed = rd.prescribed;
        b.iterations.push_back(std::move(rec));
    }
    return b;
}

void refresh_lineage_best(RunState& st) {
    Incumbent phase = incumbent(st);
    if (!st.lineage_best || phase.loss < st.lineage_best->loss ||
        (phase.loss == st.lineage_best->loss && phase.config < st.lineage_best->config))
        st.lineage_best = phase;
}

std::optional<TabularBenchmark> load_grid_if_needed(const BenchmarkSpec& bench) {
    if (bench.kind != BenchmarkSpec::Kind::Tabular) return std::nullopt;
    return load_tabular(bench.path);
}

} // namespace

// --- run_hb ---------------------------------------------------------------------

RunState run_hb(HbParams params, const BenchmarkSpec& bench, std::uint64_t seed) {
    return run_hb_with_rng(params, bench, SplitMixRng{seed, 0});
}

RunState run_hb_with_rng(HbParams params, const BenchmarkSpec& bench,
                         SplitMixRng rng) {
    params.validate();
    RunState st;
    st.t = 0;
    st.R_t = params.R;
    st.eta = params.eta;
    st.rng = rng;
    st.benchmark = bench;
    auto grid = load_grid_if_needed(bench);

    CoreHandles h{st.configs, st.cache, st.ledger};
    for (int s = params.s_max(); s >= 0; --s) {
        std::int64_t n_s = params.pool_size(s);
        Level r_s = params.start_level(s);
        auto pool = sample_fresh(st, n_s, grid ? &*grid : nullptr);
        ShInputs in{pool, r_s, params.eta, s, params.R};
        ShTrace tr = run_sh(in, h);
        st.brackets.push_back(record_bracket(st, s, n_s, r_s, tr));
    }
    refresh_lineage_best(st);
    return st;
}

RunState run_hb_replay(HbParams params, const ReplayPlan& plan,
                       const BenchmarkSpec& bench, SplitMixRng rng_snapshot) {
    params.validate();
    if (plan.pools.size() != static_cast<std::size_t>(params.s_max() + 1))
        throw std::invalid_argument("replay plan: expected one pool per bracket");
    RunState st;
    st.t = 0;
    st.R_t = params.R;
    st.eta = params.eta;
    st.rng = rng_snapshot;
    st.benchmark = bench;
    st.configs = plan.curves;
    for (const auto& [id, curve] : plan.curves.entries())
        st.next_config_id = std::max(st.next_config_id, id + 1);

    CoreHandles h{st.configs, st.cache, st.ledger};
    for (int s = params.s_max(); s >= 0; --s) {
        const auto& pool = plan.pools[static_cast<std::size_t>(params.s_max() - s)];
        if (static_cast<std::int64_t>(pool.size()) != params.pool_size(s))
            throw std::invalid_argument("replay plan: pool size mismatch in bracket " +
                                        std::to_string(s));
        ShInputs in{pool, params.start_level(s), params.eta, s, params.R};
        ShTrace tr = run_sh(in, h);
        st.brackets.push_back(record_bracket(st, s, params.pool_size(s),
                                             params.start_level(s), tr));
    }
    refresh_lineage_best(st);
    return st;
}

// --- deepen ---------------------------------------------------------------------

RunState deepen(const RunState& prev, DeepenMode mode) {
    if (!is_complete(prev))
        throw std::invalid_argument("deepen: previous run state is incomplete");
    RunState st = prev;
    st.t = prev.t + 1;
    st.R_t = prev.R_t * prev.eta;
    st.brackets.clear();
    st.phase_start_total = st.ledger.total();
    st.cache.hits = 0;
    st.phase_reused = 0;

    HbParams params{st.R_t, st.eta};
    params.validate();
    const int s_max = params.s_max();
    {
        HbParams prev_params{prev.R_t, prev.eta};
        if (s_max != prev_params.s_max() + 1)
            throw std::logic_error("deepen: s_max did not advance by one");
    }
    auto grid = load_grid_if_needed(st.benchmark);

    CoreHandles h{st.configs, st.cache, st.ledger};
    for (int s = s_max; s >= 0; --s) {
        std::int64_t n_t = params.pool_size(s);
        Level r_s = params.start_level(s);
        if (s == 0) {
            auto pool = sample_fresh(st, n_t, grid ? &*grid : nullptr);
            ShInputs in{pool, r_s, st.eta, 0, params.R};
            ShTrace tr = run_sh(in, h);
            st.brackets.push_back(record_bracket(st, 0, n_t, r_s, tr));
            continue;
        }
        // Old pool size from the bracket arithmetic, cross-checked against
        // what the old run actually recorded for its bracket s-1.
        std::int64_t n_tm1 = ceil_div(ipow(st.eta, s - 1) * s_max, s);
        auto old_it = std::find_if(prev.brackets.begin(), prev.brackets.end(),
                                   [&](const BracketState& b) { return b.s == s - 1; });
        if (old_it == prev.brackets.end())
            throw std::invalid_argument("deepen: previous run lacks bracket " +
                                        std::to_string(s - 1));
        if (n_tm1 != old_it->n_start)
            throw std::logic_error("deepen: old pool size formula drift (expected " +
                                   std::to_string(old_it->n_start) + ", got " +
                                   std::to_string(n_tm1) + ")");
        OldShState old;
        old.pools.push_back(old_it->alive(0));
        for (int i = 0; i < static_cast<int>(old_it->iterations.size()); ++i)
            old.pools.push_back(old_it->iterations[static_cast<std::size_t>(i)].promoted);

        std::int64_t delta = n_t - n_tm1;
        if (delta < 0)
            throw std::logic_error("deepen: negative fresh quota in bracket " +
                                   std::to_string(s));
        auto fresh = sample_fresh(st, delta, grid ? &*grid : nullptr);
        ShInputs in{fresh, r_s, st.eta, s, params.R};
        ShTrace tr;
        switch (mode) {
        case DeepenMode::Efficient: tr = run_eid_sh(in, old, h); break;
        case DeepenMode::Preserving: tr = run_pid_sh(in, old, h); break;
        case DeepenMode::Discarding: tr = run_did_sh(in, old, h); break;
        }
        st.brackets.push_back(record_bracket(st, s, n_t, r_s, tr));
    }
    st.phase_reused = st.cache.hits;
    refresh_lineage_best(st);
    return st;
}

// --- incumbent --------------------------------------------------------------------

Incumbent incumbent(const RunState& state) {
    struct Best {
        Level level;
        double loss;
        int bracket_s;
    };
    std::map<ConfigId, Best> per_config;
    for (const BracketState& b : state.brackets) {
        for (const IterationRecord& rec : b.iterations)
            for (const auto& [id, loss] : rec.losses) {
                auto it = per_config.find(id);
                if (it == per_config.end() || rec.level > it->second.level)
                    per_config[id] = Best{rec.level, loss, b.s};
            }
        // Final survivors count at their deepest evaluation even when this
        // phase never re-read them (eID-protected arms carry the loss they
        // earned in the previous run).
        if (!b.iterations.empty())
            for (ConfigId id : b.iterations.back().promoted)
                if (auto obs = state.cache.deepest(id)) {
                    auto it = per_config.find(id);
                    if (it == per_config.end() || obs->first > it->second.level)
                        per_config[id] = Best{obs->first, obs->second, b.s};
                }
    }
    if (per_config.empty())
        throw std::invalid_argument("incumbent: no evaluations recorded");
    const std::pair<const ConfigId, Best>* best = nullptr;
    for (const auto& entry : per_config)
        if (!best || entry.second.loss < best->second.loss)
            best = &entry; // map order: equal losses resolve to the smaller id
    return Incumbent{best->first, best->second.loss, best->second.level,
                     best->second.bracket_s};
}

std::optional<ConfigId> bracket_winner(const BracketState& b) {
    if (b.iterations.empty()) return std::nullopt;
    const IterationRecord& last = b.iterations.back();
    if (last.promoted.empty()) return std::nullopt;
    // Smallest recorded loss at the final level among the promoted set.
    ConfigId best = -1;
    double best_loss = 0.0;
    for (const auto& [id, loss] : last.losses) {
        if (!std::binary_search(last.promoted.begin(), last.promoted.end(), id))
            continue;
        if (best < 0 || loss < best_loss) {
            best = id;
            best_loss = loss;
        }
    }
    return best < 0 ? std::nullopt : std::optional<ConfigId>(best);
}

bool is_complete(const RunState& state) {
    if (state.brackets.empty()) return false;
    HbParams params{state.R_t, state.eta};
    std::vector<bool> seen(static_cast<std::size_t>(params.s_max() + 1), false);
    for (const BracketState& b : state.brackets) {
        if (b.s < 0 || b.s > params.s_max()) return false;
        if (b.iterations.size() != static_cast<std::size_t>(b.s) + 1) return false;
        seen[static_cast<std::size_t>(b.s)] = true;
    }
    return std::all_of(seen.begin(), seen.end(), [](bool x) { return x; });
}

} // namespace idhb
