#include "idhb/bench.hpp"
#include "idhb/sh.hpp"

#include <doctest.h>

#include <algorithm>

using namespace idhb;

namespace {

struct Fixture {
    CurveTable oracle;
    EvaluationCache cache;
    PullLedger ledger;
    CoreHandles handles{oracle, cache, ledger};
};

std::vector<ConfigId> ids(ConfigId lo, ConfigId hi) {
    std::vector<ConfigId> v;
    for (ConfigId i = lo; i < hi; ++i) v.push_back(i);
    return v;
}

// Survivor chain C_0..C_{new_rounds} of an already-run trace.
OldShState chain_of(std::vector<ConfigId> pool0, const ShTrace& tr, int new_rounds) {
    std::sort(pool0.begin(), pool0.end());
    OldShState old;
    old.pools.push_back(std::move(pool0));
    for (int k = 0; k < new_rounds && k < static_cast<int>(tr.rounds.size()); ++k)
        old.pools.push_back(tr.rounds[static_cast<std::size_t>(k)].promoted);
    return old;
}

// Four-arm worked instance: constant limits .1/.2/.3/.4, old run
// promoted {1,2} at level 1 and {1} at level 2, fresh arms {3,4}.
struct WorkedExample {
    Fixture f;
    OldShState old;
    ShInputs in;
    WorkedExample() {
        f.oracle.add(1, LossCurve::constant(0.1));
        f.oracle.add(2, LossCurve::constant(0.2));
        f.oracle.add(3, LossCurve::constant(0.3));
        f.oracle.add(4, LossCurve::constant(0.4));
        f.cache.put(1, 1, 0.1);
        f.cache.put(2, 1, 0.2);
        f.cache.put(1, 2, 0.1);
        old.pools = {{1, 2}, {1}};
        in = ShInputs{{3, 4}, 1, 2, 1, 2};
    }
};

} // namespace

TEST_SUITE("sh.run_sh") {
    TEST_CASE("four constant arms: winner is the best limit, pulls 12") {
        Fixture f;
        double nus[] = {0.1, 0.2, 0.3, 0.4};
        for (ConfigId c = 0; c < 4; ++c) f.oracle.add(c, LossCurve::constant(nus[c]));
        ShTrace tr = run_sh(ShInputs{ids(0, 4), 1, 2, 2, 4}, f.handles);
        CHECK(tr.winner == 0);
        CHECK(tr.charged == 12); // 4*1 + 2*2 + 1*4
        CHECK(f.ledger.total() == 12);
        CHECK(tr.rounds.size() == 3);
        CHECK(tr.rounds[0].prescribed == 4);
        CHECK(tr.rounds[1].prescribed == 2);
        CHECK(tr.rounds[2].prescribed == 1);
    }

    TEST_CASE("single arm survives every round") {
        Fixture f;
        f.oracle.add(0, LossCurve::constant(0.5));
        ShTrace tr = run_sh(ShInputs{{0}, 1, 2, 3, 8}, f.handles);
        CHECK(tr.winner == 0);
        CHECK(tr.charged == 1 + 2 + 4 + 8);
    }

    TEST_CASE("crossing curves: SH cannot revise the first-level decision") {
        Fixture f;
        f.oracle.add(0, LossCurve::constant(0.5));
        f.oracle.add(1, LossCurve::crossing(0.9, 0.1, 2)); // limit-best, early loser
        ShTrace tr = run_sh(ShInputs{{0, 1}, 1, 2, 1, 2}, f.handles);
        CHECK(tr.winner == 0);
        CHECK(f.oracle.limit(1) < f.oracle.limit(0));
    }

    TEST_CASE("argument errors") {
        Fixture f;
        f.oracle.add(0, LossCurve::constant(0.1));
        CHECK_THROWS_AS(run_sh(ShInputs{{}, 1, 2, 1, 2}, f.handles),
                        std::invalid_argument);
        CHECK_THROWS_AS(run_sh(ShInputs{{0, 0}, 1, 2, 1, 2}, f.handles),
                        std::invalid_argument);
        CHECK_THROWS_AS(run_sh(ShInputs{{0}, 1, 2, 1, 4}, f.handles),
                        std::invalid_argument); // R != r*eta^s
        CHECK_THROWS_AS(run_sh(ShInputs{{0}, 1, 1, 1, 1}, f.handles),
                        std::invalid_argument); // eta < 2
    }
}

TEST_SUITE("sh.eid") {
    TEST_CASE("spec worked example: charged 4, old champion wins") {
        WorkedExample w;
        ShTrace tr = run_eid_sh(w.in, w.old, w.f.handles);
        CHECK(tr.winner == 1);
        CHECK(tr.charged == 4); // {3,4}@1 + {2}@2
        // Round 0 keeps floor(4/2)-floor(2/2)=1 of {2,3,4}.
        CHECK(tr.rounds[0].kept == std::vector<ConfigId>{2});
        CHECK(tr.rounds[0].promoted == std::vector<ConfigId>{1, 2});
    }

    TEST_CASE("empty old state reduces to run_sh exactly") {
        SplitMixRng rng{31, 0};
        for (int trial = 0; trial < 25; ++trial) {
            Fixture a, b;
            std::int64_t n = 2 + rng.uniform_int(10);
            for (ConfigId c = 0; c < n; ++c) {
                LossCurve curve = LossCurve::power(rng.next_double(),
                                                   rng.next_double(), 1.0);
                a.oracle.add(c, curve);
                b.oracle.add(c, curve);
            }
            ShInputs in{ids(0, n), 1, 2, 2, 4};
            ShTrace sh = run_sh(in, a.handles);
            ShTrace eid = run_eid_sh(in, OldShState{}, b.handles);
            CHECK(sh.winner == eid.winner);
            CHECK(sh.charged == eid.charged);
            REQUIRE(sh.rounds.size() == eid.rounds.size());
            for (std::size_t k = 0; k < sh.rounds.size(); ++k)
                CHECK(sh.rounds[k].promoted == eid.rounds[k].promoted);
        }
    }

    TEST_CASE("no fresh arms: zero charged pulls, old bookkeeping proceeds") {
        Fixture f;
        for (ConfigId c = 0; c < 4; ++c)
            f.oracle.add(c, LossCurve::constant(0.1 * static_cast<double>(c + 1)));
        ShTrace old_tr = run_sh(ShInputs{ids(0, 4), 1, 2, 1, 2}, f.handles);
        OldShState old = chain_of(ids(0, 4), old_tr, 2);
        std::int64_t before = f.ledger.total();
        ShTrace tr = run_eid_sh(ShInputs{{}, 1, 2, 2, 4}, old, f.handles);
        CHECK(f.ledger.total() == before); // everything came from the cache
        for (const ShRound& rd : tr.rounds) CHECK(rd.charged == 0);
        CHECK(tr.winner == 0); // old champion at its deepest cached level
        // Quota formula gives n_k = 0 every round.
        for (const ShRound& rd : tr.rounds) CHECK(rd.prescribed == 0);
    }

    TEST_CASE("old promotions are never displaced before the final round") {
        SplitMixRng rng{77, 0};
        for (int trial = 0; trial < 30; ++trial) {
            Fixture f;
            std::int64_t n_tilde = 2 + rng.uniform_int(6);
            std::int64_t n = n_tilde + 2 + rng.uniform_int(8);
            for (ConfigId c = 0; c < n; ++c)
                f.oracle.add(c, LossCurve::power(rng.next_double(),
                                                 rng.next_double(), 1.0));
            int s = 2;
            ShTrace old_tr = run_sh(ShInputs{ids(0, n_tilde), 1, 2, s - 1, 2},
                                    f.handles);
            OldShState old = chain_of(ids(0, n_tilde), old_tr, s);
            ShTrace tr = run_eid_sh(ShInputs{ids(n_tilde, n), 1, 2, s, 4}, old,
                                    f.handles);
            for (int k = 0; k < s; ++k) {
                const auto& ck1 = old.pool(static_cast<std::size_t>(k) + 1);
                const auto& promoted = tr.rounds[static_cast<std::size_t>(k)].promoted;
                for (ConfigId c : ck1)
                    CHECK(std::binary_search(promoted.begin(), promoted.end(), c));
            }
        }
    }

    TEST_CASE("fresh-side survivor counts follow the quota formula") {
        Fixture f;
        for (ConfigId c = 0; c < 16; ++c)
            f.oracle.add(c, LossCurve::constant(0.01 * static_cast<double>(c)));
        ShTrace old_tr = run_sh(ShInputs{ids(0, 8), 1, 2, 2, 4}, f.handles);
        OldShState old = chain_of(ids(0, 8), old_tr, 3);
        ShTrace tr = run_eid_sh(ShInputs{ids(8, 16), 1, 2, 3, 8}, old, f.handles);
        // n=16, nt=8: quotas 8,4,2,1.
        CHECK(tr.rounds[0].prescribed == 8);
        CHECK(tr.rounds[1].prescribed == 4);
        CHECK(tr.rounds[2].prescribed == 2);
        CHECK(tr.rounds[3].prescribed == 1);
    }

    TEST_CASE("misaligned cache and overlapping pools are rejected") {
        WorkedExample w;
        ShInputs bad = w.in;
        bad.fresh_arms = {2, 3}; // 2 already sits in C_0
        CHECK_THROWS_AS(run_eid_sh(bad, w.old, w.f.handles), std::invalid_argument);

        Fixture g;
        g.oracle.add(0, LossCurve::constant(0.1));
        g.oracle.add(1, LossCurve::constant(0.2));
        OldShState old;
        old.pools = {{0}};
        // 0 was discarded at round 0 by the old run, but carries no cached
        // loss at the aligned level.
        CHECK_THROWS_AS(run_eid_sh(ShInputs{{1}, 1, 2, 1, 2}, old, g.handles),
                        std::invalid_argument);

        OldShState tangled;
        tangled.pools = {{0}, {1}}; // not nested
        g.cache.put(0, 1, 0.1);
        CHECK_THROWS_AS(run_eid_sh(ShInputs{{1}, 1, 2, 1, 2}, tangled, g.handles),
                        std::invalid_argument);
    }
}

TEST_SUITE("sh.did") {
    TEST_CASE("spec worked example: charged 4, winner 1") {
        WorkedExample w;
        ShTrace tr = run_did_sh(w.in, w.old, w.f.handles);
        CHECK(tr.winner == 1);
        CHECK(tr.charged == 4); // {3,4}@1 fresh + {2}@2 fresh; 1@2 cached
        CHECK(tr.rounds[0].promoted == std::vector<ConfigId>{1, 2});
        CHECK(tr.rounds[1].promoted == std::vector<ConfigId>{1});
    }

    TEST_CASE("equivalence: identical survivor sets and winner as fresh SH on the merged pool") {
        SplitMixRng rng{913, 0};
        for (int trial = 0; trial < 60; ++trial) {
            std::int64_t n_tilde = 1 + rng.uniform_int(8);
            std::int64_t n = n_tilde + 1 + rng.uniform_int(10);
            int s = 1 + static_cast<int>(rng.uniform_int(3));
            CurveTable curves;
            for (ConfigId c = 0; c < n; ++c)
                curves.add(c, LossCurve::power(rng.next_double(), rng.next_double(),
                                               1.0));
            Level r = 1 + rng.uniform_int(2);
            Level R = r;
            for (int i = 0; i < s; ++i) R *= 2;

            EvaluationCache did_cache;
            PullLedger old_ledger;
            CoreHandles old_h{curves, did_cache, old_ledger};
            ShTrace old_tr = run_sh(ShInputs{ids(0, n_tilde), r, 2, s - 1, R / 2},
                                    old_h);
            OldShState old = chain_of(ids(0, n_tilde), old_tr, s);
            std::int64_t cached_levels = 0;
            for (const auto& [key, loss] : did_cache.entries()) cached_levels += key.second;

            PullLedger did_ledger;
            CoreHandles did_h{curves, did_cache, did_ledger};
            ShTrace did = run_did_sh(ShInputs{ids(n_tilde, n), r, 2, s, R}, old, did_h);

            EvaluationCache fresh_cache;
            PullLedger fresh_ledger;
            CoreHandles fresh_h{curves, fresh_cache, fresh_ledger};
            ShTrace fresh = run_sh(ShInputs{ids(0, n), r, 2, s, R}, fresh_h);

            CHECK(did.winner == fresh.winner);
            REQUIRE(did.rounds.size() == fresh.rounds.size());
            for (std::size_t k = 0; k < did.rounds.size(); ++k)
                CHECK(did.rounds[k].promoted == fresh.rounds[k].promoted);
            // Charged pulls differ exactly by the old run's cached evaluations
            // that the merged run re-reads.
            std::int64_t reused = 0;
            for (const ShRound& rd : did.rounds)
                for (ConfigId c : rd.pool)
                    if (c < n_tilde && old_tr.rounds.size() > 0) {
                        // reused iff the old run evaluated (c, rd.level)
                        bool was_old = false;
                        for (const ShRound& ord : old_tr.rounds)
                            if (ord.level == rd.level &&
                                std::binary_search(ord.pool.begin(), ord.pool.end(), c))
                                was_old = true;
                        if (was_old) reused += rd.level;
                    }
            CHECK(did.charged == fresh.charged - reused);
        }
    }

    TEST_CASE("empty old state reduces to run_sh") {
        Fixture a, b;
        for (ConfigId c = 0; c < 5; ++c) {
            LossCurve curve = LossCurve::power(0.05 * static_cast<double>(c), 0.3, 1.0);
            a.oracle.add(c, curve);
            b.oracle.add(c, curve);
        }
        ShInputs in{ids(0, 5), 1, 2, 2, 4};
        ShTrace sh = run_sh(in, a.handles);
        ShTrace did = run_did_sh(in, OldShState{}, b.handles);
        CHECK(sh.winner == did.winner);
        CHECK(sh.charged == did.charged);
    }

    TEST_CASE("adversarial: fresh arms beat every old arm, full price afterwards") {
        Fixture f;
        for (ConfigId c = 0; c < 4; ++c)
            f.oracle.add(c, LossCurve::constant(0.5 + 0.1 * static_cast<double>(c)));
        for (ConfigId c = 4; c < 8; ++c)
            f.oracle.add(c, LossCurve::constant(0.01 * static_cast<double>(c)));
        ShTrace old_tr = run_sh(ShInputs{ids(0, 4), 1, 2, 1, 2}, f.handles);
        OldShState old = chain_of(ids(0, 4), old_tr, 2);
        std::int64_t before = f.ledger.total();
        ShTrace tr = run_did_sh(ShInputs{ids(4, 8), 1, 2, 2, 4}, old, f.handles);
        for (ConfigId c : tr.rounds[0].promoted) CHECK(c >= 4);
        // Rounds 1 and 2 run entirely on fresh arms: 4@1 + 4@2 + 2@4.
        CHECK(f.ledger.total() - before == 4 + 8 + 8);
    }
}

TEST_SUITE("sh.pid") {
    TEST_CASE("spec worked example: winner 1, identical charges to dID") {
        WorkedExample w;
        ShTrace tr = run_pid_sh(w.in, w.old, w.f.handles);
        CHECK(tr.winner == 1);
        CHECK(tr.charged == 4);
    }

    TEST_CASE("re-admits an old arm the continued run discarded; dID cannot") {
        DistinctionInstance d = distinction_instance();
        EvaluationCache base_cache;
        PullLedger base_ledger;
        CoreHandles base{d.curves, base_cache, base_ledger};
        ShTrace old_tr = run_sh(ShInputs{d.old_arms, d.r, d.eta, d.rounds - 1,
                                         d.R / d.eta},
                                base);
        OldShState old = chain_of(d.old_arms, old_tr, d.rounds);
        ShInputs in{d.fresh_arms, d.r, d.eta, d.rounds, d.R};

        EvaluationCache pc = base_cache;
        PullLedger pl;
        CoreHandles ph{d.curves, pc, pl};
        ShTrace pid = run_pid_sh(in, old, ph);

        EvaluationCache dc = base_cache;
        PullLedger dl;
        CoreHandles dh{d.curves, dc, dl};
        ShTrace did = run_did_sh(in, old, dh);

        // Arm 1 sits in C_1, was dropped from the merged chain at level 1,
        // and is limit-best from level 2 on.
        const auto& pid_kept = pid.rounds[1].promoted;
        const auto& did_kept = did.rounds[1].promoted;
        CHECK(std::binary_search(pid_kept.begin(), pid_kept.end(), ConfigId{1}));
        CHECK(!std::binary_search(did_kept.begin(), did_kept.end(), ConfigId{1}));
        CHECK(pid.winner == 1);
        CHECK(did.winner == 0);
    }

    TEST_CASE("empty old state reduces to run_sh") {
        Fixture a, b;
        for (ConfigId c = 0; c < 6; ++c) {
            LossCurve curve = LossCurve::power(0.1 * static_cast<double>(c), 0.5, 1.0);
            a.oracle.add(c, curve);
            b.oracle.add(c, curve);
        }
        ShInputs in{ids(0, 6), 1, 2, 2, 4};
        ShTrace sh = run_sh(in, a.handles);
        ShTrace pid = run_pid_sh(in, OldShState{}, b.handles);
        CHECK(sh.winner == pid.winner);
        CHECK(sh.charged == pid.charged);
    }
}

TEST_SUITE("sh.properties") {
    TEST_CASE("no variant ever charges more than fresh SH on the merged pool") {
        SplitMixRng rng{2024, 0};
        for (int trial = 0; trial < 50; ++trial) {
            std::int64_t n_tilde = 1 + rng.uniform_int(8);
            std::int64_t n = n_tilde + 1 + rng.uniform_int(12);
            int eta = rng.next_double() < 0.5 ? 2 : 3;
            int s = 1 + static_cast<int>(rng.uniform_int(3));
            Level r = 1 + rng.uniform_int(2);
            Level R = r;
            for (int i = 0; i < s; ++i) R *= eta;
            CurveTable curves;
            for (ConfigId c = 0; c < n; ++c)
                curves.add(c, LossCurve::power(rng.next_double(), rng.next_double(),
                                               1.0));
            EvaluationCache old_cache;
            PullLedger old_ledger;
            CoreHandles oh{curves, old_cache, old_ledger};
            ShTrace old_tr = run_sh(ShInputs{ids(0, n_tilde), r, eta, s - 1, R / eta},
                                    oh);
            OldShState old = chain_of(ids(0, n_tilde), old_tr, s);

            EvaluationCache sh_cache;
            PullLedger sh_ledger;
            CoreHandles sh_h{curves, sh_cache, sh_ledger};
            run_sh(ShInputs{ids(0, n), r, eta, s, R}, sh_h);

            ShInputs in{ids(n_tilde, n), r, eta, s, R};
            for (int variant = 0; variant < 3; ++variant) {
                EvaluationCache cache = old_cache;
                PullLedger ledger;
                CoreHandles h{curves, cache, ledger};
                if (variant == 0) run_eid_sh(in, old, h);
                if (variant == 1) run_did_sh(in, old, h);
                if (variant == 2) run_pid_sh(in, old, h);
                CHECK(ledger.total() <= sh_ledger.total());
            }
        }
    }
}
