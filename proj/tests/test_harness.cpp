#include "idhb/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace idhb;

namespace {

CompareConfig small_config(int seeds) {
    CompareConfig cfg;
    cfg.R0 = 8;
    cfg.eta = 2;
    cfg.replay = true;
    for (int i = 0; i < seeds; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
    return cfg;
}

} // namespace

TEST_SUITE("harness") {
    TEST_CASE("parallel sweep is byte-identical to the serial reference") {
        CompareConfig cfg = small_config(10);
        auto serial = run_comparison_serial(cfg);
        auto parallel = run_comparison(cfg);
        CHECK(rows_to_csv(serial) == rows_to_csv(parallel));
        cfg.jobs = 3;
        CHECK(rows_to_csv(run_comparison(cfg)) == rows_to_csv(serial));
    }

    TEST_CASE("reruns are deterministic") {
        CompareConfig cfg = small_config(6);
        CHECK(rows_to_csv(run_comparison(cfg)) == rows_to_csv(run_comparison(cfg)));
    }

    TEST_CASE("empty seed list yields a header-only CSV") {
        CompareConfig cfg = small_config(0);
        auto rows = run_comparison(cfg);
        CHECK(rows.empty());
        CHECK(rows_to_csv(rows) ==
              "seed,mode,incumbent_loss,budget_deepen,budget_lineage,reused_evals\n");
    }

    TEST_CASE("with replay, every dID row matches the ih incumbent exactly") {
        auto rows = run_comparison(small_config(12));
        std::map<std::uint64_t, double> ih;
        for (const auto& r : rows)
            if (r.mode == "ih") ih[r.seed] = r.incumbent_loss;
        int matched = 0;
        for (const auto& r : rows)
            if (r.mode == "d") {
                CHECK(r.incumbent_loss == ih.at(r.seed));
                ++matched;
            }
        CHECK(matched == 12);
    }

    TEST_CASE("deepen-phase budgets beat the baseline row by row; reuse is counted") {
        auto rows = run_comparison(small_config(12));
        std::map<std::uint64_t, std::int64_t> ih;
        for (const auto& r : rows)
            if (r.mode == "ih") ih[r.seed] = r.budget_deepen;
        for (const auto& r : rows) {
            if (r.mode == "ih") {
                CHECK(r.reused_evals == 0);
                CHECK(r.budget_lineage > r.budget_deepen); // lineage adds the old run
                continue;
            }
            CHECK(r.budget_deepen < ih.at(r.seed));
            CHECK(r.reused_evals > 0);
            CHECK(r.budget_lineage >= r.budget_deepen);
        }
    }

    TEST_CASE("modes subset and row ordering are honored") {
        CompareConfig cfg = small_config(3);
        cfg.modes = {"e", "ih"};
        auto rows = run_comparison(cfg);
        REQUIRE(rows.size() == 6);
        // Canonical order within each seed: ih before e.
        CHECK(rows[0].mode == "ih");
        CHECK(rows[1].mode == "e");
        CHECK(rows[0].seed == 0);
        CHECK(rows[2].seed == 1);
    }

    TEST_CASE("aggregates: paired gaps and ratios") {
        auto rows = run_comparison(small_config(8));
        auto agg = aggregate_rows(rows);
        REQUIRE(agg.size() == 4);
        for (const auto& a : agg) {
            if (a.mode == "ih") {
                CHECK(a.mean_gap_vs_ih == 0.0);
                CHECK(a.mean_budget_ratio == 1.0);
            } else {
                CHECK(a.mean_budget_ratio < 1.0);
                CHECK(std::isfinite(a.mean_gap_vs_ih));
            }
            if (a.mode == "d") CHECK(a.mean_gap_vs_ih == 0.0);
        }
        std::string csv = aggregate_to_csv(agg);
        CHECK(csv.find("mode,mean_incumbent") == 0);
    }

    TEST_CASE("replay off still produces a full comparison") {
        CompareConfig cfg = small_config(4);
        cfg.replay = false;
        auto rows = run_comparison(cfg);
        CHECK(rows.size() == 16);
        for (const auto& r : rows) CHECK(r.budget_deepen > 0);
    }

    TEST_CASE("configuration validation") {
        CompareConfig dup = small_config(2);
        dup.seeds = {1, 1};
        CHECK_THROWS_AS(run_comparison(dup), std::invalid_argument);
        CompareConfig bad = small_config(2);
        bad.modes = {"ih", "zz"};
        CHECK_THROWS_AS(run_comparison(bad), std::invalid_argument);
        CompareConfig dup_mode = small_config(2);
        dup_mode.modes = {"e", "e"};
        CHECK_THROWS_AS(run_comparison(dup_mode), std::invalid_argument);
    }
}
