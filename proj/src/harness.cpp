#include "idhb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace idhb {

namespace {

const std::vector<std::string> kCanonicalModes = {"ih", "e", "p", "d"};

void validate_config(const CompareConfig& cfg) {
    if (cfg.R0 < 1) throw std::invalid_argument("compare: R0 must be >= 1");
    if (cfg.eta < 2) throw std::invalid_argument("compare: eta must be >= 2");
    std::set<std::uint64_t> seen(cfg.seeds.begin(), cfg.seeds.end());
    if (seen.size() != cfg.seeds.size())
        throw std::invalid_argument("compare: seeds must be distinct");
    std::set<std::string> modes(cfg.modes.begin(), cfg.modes.end());
    if (modes.size() != cfg.modes.size())
        throw std::invalid_argument("compare: modes must be distinct");
    for (const auto& m : cfg.modes)
        if (std::find(kCanonicalModes.begin(), kCanonicalModes.end(), m) ==
            kCanonicalModes.end())
            throw std::invalid_argument("compare: unknown mode '" + m + "'");
}

bool wants(const CompareConfig& cfg, const std::string& m) {
    return std::find(cfg.modes.begin(), cfg.modes.end(), m) != cfg.modes.end();
}

} // namespace

RunState run_ih_baseline(const RunState& prev, const RunState& any_deepened,
                         bool replay) {
    HbParams params{prev.R_t * prev.eta, prev.eta};
    if (!replay)
        return run_hb_with_rng(params, prev.benchmark, prev.rng);
    ReplayPlan plan;
    plan.curves = any_deepened.configs;
    for (const BracketState& b : any_deepened.brackets)
        plan.pools.push_back(b.alive(0)); // old configs first: ids are in sampling order
    return run_hb_replay(params, plan, prev.benchmark, any_deepened.rng);
}

std::vector<ComparisonRow> compare_one_seed(const CompareConfig& cfg,
                                            std::uint64_t seed) {
    BenchmarkSpec bench = cfg.benchmark;
    if (bench.kind == BenchmarkSpec::Kind::Synthetic) bench.sampler.seed = seed;
    RunState prev = run_hb(HbParams{cfg.R0, cfg.eta}, bench, seed);

    // All modes continue the stream from the same position, so their fresh
    // draws coincide; one deepening is enough to know the merged pools.
    RunState deepened_d = deepen(prev, DeepenMode::Discarding);

    std::vector<ComparisonRow> rows;
    for (const std::string& m : kCanonicalModes) {
        if (!wants(cfg, m)) continue;
        ComparisonRow row;
        row.seed = seed;
        row.mode = m;
        if (m == "ih") {
            RunState ih = run_ih_baseline(prev, deepened_d, cfg.replay);
            row.incumbent_loss = incumbent(ih).loss;
            row.budget_deepen = ih.ledger.total();
            row.budget_lineage = prev.ledger.total() + ih.ledger.total();
            row.reused_evals = 0;
        } else {
            const RunState st = m == "d" ? deepened_d
                                         : deepen(prev, mode_from_letter(m[0]));
            row.incumbent_loss = incumbent(st).loss;
            row.budget_deepen = st.phase_charged();
            row.budget_lineage = st.ledger.total();
            row.reused_evals = st.phase_reused;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::vector<ComparisonRow> flatten(std::vector<std::vector<ComparisonRow>> per_seed) {
    std::vector<ComparisonRow> rows;
    for (auto& chunk : per_seed)
        for (auto& row : chunk) rows.push_back(std::move(row));
    return rows;
}

} // namespace

std::vector<ComparisonRow> run_comparison_serial(const CompareConfig& cfg) {
    validate_config(cfg);
    std::vector<std::vector<ComparisonRow>> per_seed(cfg.seeds.size());
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
        per_seed[i] = compare_one_seed(cfg, cfg.seeds[i]);
    return flatten(std::move(per_seed));
}

std::vector<ComparisonRow> run_comparison(const CompareConfig& cfg) {
    validate_config(cfg);
    std::vector<std::vector<ComparisonRow>> per_seed(cfg.seeds.size());
#ifdef _OPENMP
    const int n = static_cast<int>(cfg.seeds.size());
    if (cfg.jobs > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(cfg.jobs)
        for (int i = 0; i < n; ++i)
            per_seed[static_cast<std::size_t>(i)] =
                compare_one_seed(cfg, cfg.seeds[static_cast<std::size_t>(i)]);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i)
            per_seed[static_cast<std::size_t>(i)] =
                compare_one_seed(cfg, cfg.seeds[static_cast<std::size_t>(i)]);
    }
#else
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
        per_seed[i] = compare_one_seed(cfg, cfg.seeds[i]);
#endif
    return flatten(std::move(per_seed));
}

std::string rows_to_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "seed,mode,incumbent_loss,budget_deepen,budget_lineage,reused_evals\n";
    for (const ComparisonRow& r : rows) {
        out += std::to_string(r.seed);
        out += ',';
        out += r.mode;
        out += ',';
        out += format_double(r.incumbent_loss);
        out += ',';
        out += std::to_string(r.budget_deepen);
        out += ',';
        out += std::to_string(r.budget_lineage);
        out += ',';
        out += std::to_string(r.reused_evals);
        out += '\n';
    }
    return out;
}

std::vector<ModeAggregate> aggregate_rows(const std::vector<ComparisonRow>& rows) {
    std::map<std::uint64_t, double> ih_incumbent;
    std::map<std::uint64_t, std::int64_t> ih_budget;
    for (const auto& r : rows)
        if (r.mode == "ih") {
            ih_incumbent[r.seed] = r.incumbent_loss;
            ih_budget[r.seed] = r.budget_deepen;
        }
    std::vector<ModeAggregate> out;
    for (const std::string& m : kCanonicalModes) {
        std::size_t count = 0, paired = 0;
        double inc = 0.0, gap = 0.0, budget = 0.0, ratio = 0.0, reused = 0.0;
        for (const auto& r : rows) {
            if (r.mode != m) continue;
            ++count;
            inc += r.incumbent_loss;
            budget += static_cast<double>(r.budget_deepen);
            reused += static_cast<double>(r.reused_evals);
            auto it = ih_incumbent.find(r.seed);
            if (it != ih_incumbent.end()) {
                ++paired;
                gap += std::abs(r.incumbent_loss - it->second);
                ratio += static_cast<double>(r.budget_deepen) /
                         static_cast<double>(ih_budget.at(r.seed));
            }
        }
        if (count == 0) continue;
        ModeAggregate agg;
        agg.mode = m;
        agg.mean_incumbent = inc / static_cast<double>(count);
        agg.mean_budget_deepen = budget / static_cast<double>(count);
        agg.mean_reused = reused / static_cast<double>(count);
        agg.mean_gap_vs_ih = paired ? gap / static_cast<double>(paired)
                                    : std::numeric_limits<double>::quiet_NaN();
        agg.mean_budget_ratio = paired ? ratio / static_cast<double>(paired)
                                       : std::numeric_limits<double>::quiet_NaN();
        out.push_back(agg);
    }
    return out;
}

std::string aggregate_to_csv(const std::vector<ModeAggregate>& agg) {
    std::string out =
        "mode,mean_incumbent,mean_gap_vs_ih,mean_budget_deepen,mean_budget_ratio,"
        "mean_reused\n";
    for (const auto& a : agg) {
        out += a.mode;
        out += ',';
        out += format_double(a.mean_incumbent);
        out += ',';
        out += format_double(a.mean_gap_vs_ih);
        out += ',';
        out += format_double(a.mean_budget_deepen);
        out += ',';
        out += format_double(a.mean_budget_ratio);
        out += ',';
        out += format_double(a.mean_reused);
        out += '\n';
    }
    return out;
}

std::string aggregate_to_table(const std::vector<ModeAggregate>& agg) {
    std::ostringstream os;
    os << "mode  mean_incumbent  gap_vs_ih  budget_deepen  budget_ratio  reused\n";
    for (const auto& a : agg) {
        os << a.mode << (a.mode.size() == 1 ? "     " : "    ");
        os << format_double(a.mean_incumbent) << "  " << format_double(a.mean_gap_vs_ih)
           << "  " << format_double(a.mean_budget_deepen) << "  "
           << format_double(a.mean_budget_ratio) << "  " << format_double(a.mean_reused)
           << "\n";
    }
    return os.str();
}

} // namespace idhb
