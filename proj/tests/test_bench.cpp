#include "idhb/bench.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace idhb;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("idhb_bench_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::filesystem::path write_file(const TempDir& dir, const std::string& name,
                                 const std::string& text) {
    auto p = dir.path / name;
    std::ofstream out(p);
    out << text;
    return p;
}

} // namespace

TEST_SUITE("bench.sampler") {
    TEST_CASE("deterministic under the seed") {
        SamplerSpec spec;
        spec.seed = 404;
        auto a = sample_configs(spec, 64);
        auto b = sample_configs(spec, 64);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].first == b[i].first);
            CHECK(a[i].second == b[i].second);
        }
        CHECK(sample_configs(spec, 0).empty());
    }

    TEST_CASE("empirical eps-optimal fraction tracks alpha") {
        SamplerSpec spec;
        spec.alpha = 0.5;
        spec.seed = 7;
        auto configs = sample_configs(spec, 10000);
        int optimal = 0;
        for (const auto& [id, curve] : configs)
            if (curve.limit() - spec.nu_star <= spec.eps) ++optimal;
        double fraction = optimal / 10000.0;
        CHECK(std::abs(fraction - spec.alpha) <= 0.02);
    }

    TEST_CASE("invalid parameters are domain errors") {
        SamplerSpec bad;
        bad.alpha = 1.5;
        CHECK_THROWS_AS(sample_configs(bad, 1), std::domain_error);
        SamplerSpec bad2;
        bad2.eps = 0.0;
        CHECK_THROWS_AS(sample_configs(bad2, 1), std::domain_error);
    }

    TEST_CASE("every draw satisfies the declared envelope at every level") {
        SamplerSpec spec;
        spec.seed = 99;
        Envelope env = envelope_for(spec);
        for (const auto& [id, curve] : sample_configs(spec, 200))
            for (Level j = 1; j <= 64; ++j)
                CHECK(std::abs(curve.at(j) - curve.limit()) <= env.gamma(j) + 1e-15);
    }

    TEST_CASE("envelope spot value and constant-family degenerate case") {
        CHECK(envelope_for(1.0, 1.0).gamma(4) == 0.25);
        Envelope zero = envelope_for(0.0, 1.0);
        CHECK(zero.gamma(10) == 0.0);
        CHECK(envelope_inverse(zero, 0.3, 50) == 1);
    }
}

TEST_SUITE("bench.budget_fraction") {
    TEST_CASE("documented examples") {
        CHECK(budget_to_fraction(8, 32) == 0.25);
        CHECK(budget_to_fraction(16, 16) == 1.0);
        CHECK(budget_to_fraction(1, 16) == 0.0625);
        CHECK_THROWS_AS(budget_to_fraction(0, 16), std::invalid_argument);
        CHECK_THROWS_AS(budget_to_fraction(17, 16), std::invalid_argument);
    }
}

TEST_SUITE("bench.tabular") {
    TEST_CASE("well-formed 3x5 grid loads with 15 cells") {
        TempDir dir;
        std::string text = "# comment line\nconfig_id,fidelity,loss\n";
        for (int c = 0; c < 3; ++c)
            for (int f = 1; f <= 5; ++f)
                text += std::to_string(c) + "," + std::to_string(f) + ",0." +
                        std::to_string(c + f) + "\n";
        TabularBenchmark tb = load_tabular(write_file(dir, "ok.csv", text));
        CHECK(tb.cell_count() == 15);
        CHECK(tb.r_cap() == 5);
        CHECK(tb.loss(2, 3) == 0.5);
        CHECK_THROWS_AS(tb.loss(9, 1), std::out_of_range);
        CHECK_THROWS_AS(tb.loss(0, 7), std::domain_error);
    }

    TEST_CASE("missing cell names the config and fidelity") {
        TempDir dir;
        auto p = write_file(dir, "ragged.csv",
                            "config_id,fidelity,loss\n0,1,0.5\n0,2,0.4\n1,1,0.6\n");
        try {
            load_tabular(p);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            std::string msg = e.what();
            CHECK(msg.find("config 1") != std::string::npos);
            CHECK(msg.find("fidelity 2") != std::string::npos);
        }
    }

    TEST_CASE("duplicate cell reports both line numbers") {
        TempDir dir;
        auto p = write_file(dir, "dup.csv",
                            "config_id,fidelity,loss\n0,1,0.5\n0,1,0.4\n");
        try {
            load_tabular(p);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 3);
            CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
        }
    }

    TEST_CASE("non-numeric loss reports the line") {
        TempDir dir;
        auto p = write_file(dir, "bad.csv",
                            "config_id,fidelity,loss\n0,1,not_a_number\n");
        try {
            load_tabular(p);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
        }
    }

    TEST_CASE("header and field-count validation") {
        TempDir dir;
        CHECK_THROWS_AS(load_tabular(write_file(dir, "h.csv", "id,fid,loss\n0,1,0.5\n")),
                        ParseError);
        CHECK_THROWS_AS(
            load_tabular(write_file(dir, "f.csv", "config_id,fidelity,loss\n0,1\n")),
            ParseError);
        CHECK_THROWS_AS(load_tabular(dir.path / "missing.csv"), ParseError);
    }

    TEST_CASE("generated benchmark matches the analytic curves exactly") {
        TempDir dir;
        SamplerSpec spec;
        spec.seed = 21;
        auto p = dir.path / "gen.csv";
        write_tabular(spec, 12, 8, p, false);
        TabularBenchmark tb = load_tabular(p);
        CHECK(tb.config_ids().size() == 12);
        CHECK(tb.r_cap() == 8);
        auto analytic = sample_configs(spec, 12);
        for (const auto& [id, curve] : analytic)
            for (Level f = 1; f <= 8; ++f)
                CHECK(tb.loss(id, f) == curve.at(f)); // bit-exact round-trip

        // Refuses to overwrite without force, succeeds with it.
        CHECK_THROWS(write_tabular(spec, 12, 8, p, false));
        write_tabular(spec, 12, 8, p, true);

        // Exporting a loaded grid again is the identity on values.
        TabularBenchmark tb2 = load_tabular(p);
        for (ConfigId id : tb2.config_ids())
            CHECK(tb2.curve_for(id) == tb.curve_for(id));
    }

    TEST_CASE("size zero writes a header-only file") {
        TempDir dir;
        auto p = dir.path / "empty.csv";
        write_tabular(SamplerSpec{}, 0, 4, p, false);
        TabularBenchmark tb = load_tabular(p);
        CHECK(tb.cell_count() == 0);
    }
}

TEST_SUITE("bench.distinction") {
    TEST_CASE("shipped instance has the documented shape") {
        DistinctionInstance d = distinction_instance();
        CHECK(d.curves.size() == 8);
        CHECK(d.old_arms.size() == 4);
        CHECK(d.fresh_arms.size() == 4);
        CHECK(d.r * 4 == d.R);
        // Arm 1 crosses arm 0 between levels 1 and 2.
        CHECK(d.curves.loss(1, 1) > d.curves.loss(0, 1));
        CHECK(d.curves.loss(1, 2) < d.curves.loss(0, 2));
    }
}
