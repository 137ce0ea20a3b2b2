#include "idhb/harness.hpp"
#include "idhb/state_io.hpp"
#include "idhb/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace idhb;

// "synthetic", "synthetic:alpha=0.5,eps=0.1,...", or a tabular CSV path.
BenchmarkSpec parse_benchmark(const std::string& text) {
    if (text == "synthetic") return BenchmarkSpec::synthetic(SamplerSpec{});
    if (text.rfind("synthetic:", 0) == 0) {
        SamplerSpec sp;
        std::string args = text.substr(10);
        std::istringstream is(args);
        std::string kv;
        while (std::getline(is, kv, ',')) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("benchmark spec: expected key=value, got '" +
                                            kv + "'");
            std::string key = kv.substr(0, eq);
            double val = std::stod(kv.substr(eq + 1));
            if (key == "alpha") sp.alpha = val;
            else if (key == "eps") sp.eps = val;
            else if (key == "nu_star") sp.nu_star = val;
            else if (key == "span") sp.worse_span = val;
            else if (key == "cmax") sp.c_max = val;
            else if (key == "p") sp.p = val;
            else
                throw std::invalid_argument("benchmark spec: unknown key '" + key + "'");
        }
        return BenchmarkSpec::synthetic(sp);
    }
    return BenchmarkSpec::tabular(text);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string summary_line(const RunState& st) {
    Incumbent inc = incumbent(st);
    std::ostringstream os;
    os << "t=" << st.t << " R_t=" << st.R_t << " incumbent=" << inc.config
       << " loss=" << format_double(inc.loss) << " level=" << inc.level
       << " budget_total=" << st.ledger.total()
       << " budget_phase=" << st.phase_charged()
       << " reused=" << st.phase_reused;
    return os.str();
}

int cmd_run(const std::string& benchmark, Level R, int eta, std::uint64_t seed,
            const std::string& out_dir) {
    BenchmarkSpec bench = parse_benchmark(benchmark);
    if (bench.kind == BenchmarkSpec::Kind::Synthetic) bench.sampler.seed = seed;
    RunState st = run_hb(HbParams{R, eta}, bench, seed);
    std::filesystem::create_directories(out_dir);
    auto path = std::filesystem::path(out_dir) /
                ("state_R" + std::to_string(st.R_t) + "_seed" + std::to_string(seed) +
                 ".json");
    save_state_file(st, path);
    std::cout << summary_line(st) << " state=" << path.string() << "\n";
    return 0;
}

int cmd_deepen(const std::string& state_path, const std::string& mode,
               const std::string& out_dir) {
    if (mode.size() != 1)
        throw std::invalid_argument("mode must be one of e, p, d");
    RunState prev = load_state_file(state_path);
    RunState st = deepen(prev, mode_from_letter(mode[0]));
    std::filesystem::create_directories(out_dir);
    auto path = std::filesystem::path(out_dir) /
                ("state_R" + std::to_string(st.R_t) + "_t" + std::to_string(st.t) +
                 "_" + mode + ".json");
    save_state_file(st, path);
    std::cout << "mode=" << mode << " " << summary_line(st)
              << " reused_evals=" << st.phase_reused << " state=" << path.string()
              << "\n";
    return 0;
}

int cmd_compare(const std::string& benchmark, Level R0, int eta, int seeds,
                const std::string& modes_csv, const std::string& replay,
                const std::string& out_dir, int jobs) {
    CompareConfig cfg;
    cfg.benchmark = parse_benchmark(benchmark);
    cfg.R0 = R0;
    cfg.eta = eta;
    for (int i = 0; i < seeds; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
    cfg.modes.clear();
    std::istringstream is(modes_csv);
    std::string m;
    while (std::getline(is, m, ',')) cfg.modes.push_back(m);
    if (replay == "on") cfg.replay = true;
    else if (replay == "off") cfg.replay = false;
    else throw std::invalid_argument("--replay must be on or off");
    cfg.jobs = jobs;

    auto rows = run_comparison(cfg);
    std::filesystem::create_directories(out_dir);
    write_text(std::filesystem::path(out_dir) / "comparison.csv", rows_to_csv(rows));
    auto agg = aggregate_rows(rows);
    write_text(std::filesystem::path(out_dir) / "aggregate.csv", aggregate_to_csv(agg));
    std::cout << aggregate_to_table(agg);
    return 0;
}

int cmd_verify(const std::string& suite, int runs, int jobs) {
    VerifyOptions opt;
    opt.instances = runs;
    opt.mc_runs = std::max(runs, 200);
    opt.jobs = jobs;
    auto results = run_verify_suite(suite, opt);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.details
                  << "\n";
        all_pass &= r.pass;
    }
    return all_pass ? 0 : 4;
}

int cmd_gen_bench(double alpha, double eps, std::int64_t n, Level r_cap,
                  const std::string& out, bool force, std::uint64_t seed) {
    SamplerSpec sp;
    sp.alpha = alpha;
    sp.eps = eps;
    sp.seed = seed;
    write_tabular(sp, n, r_cap, out, force);
    std::cout << "wrote " << n << " configs x " << r_cap << " fidelities to " << out
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperband with iterative-deepening continuation"};
    app.require_subcommand(1);

    std::string benchmark = "synthetic";
    std::int64_t R = 16;
    int eta = 2;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    auto* run = app.add_subcommand("run", "fresh Hyperband run, writes a state file");
    run->add_option("--benchmark", benchmark, "synthetic[:k=v,...] or tabular CSV path");
    run->add_option("--R", R, "max size R")->required();
    run->add_option("--eta", eta, "halving factor")->required();
    run->add_option("--seed", seed, "sampler seed")->required();
    run->add_option("--out", out_dir, "output directory")->required();

    std::string state_path, mode;
    auto* deepen_cmd = app.add_subcommand("deepen", "continue a run at eta*R");
    deepen_cmd->add_option("--state", state_path, "run-state file")->required();
    deepen_cmd->add_option("--mode", mode, "e | p | d")->required();
    deepen_cmd->add_option("--out", out_dir, "output directory")->required();

    std::int64_t R0 = 16;
    int seeds = 30, jobs = 0;
    std::string modes_csv = "ih,e,p,d", replay = "on";
    auto* compare = app.add_subcommand("compare", "four-way strategy comparison");
    compare->add_option("--R0", R0, "initial max size")->required();
    compare->add_option("--eta", eta, "halving factor")->required();
    compare->add_option("--seeds", seeds, "number of seeds")->required();
    compare->add_option("--modes", modes_csv, "subset of ih,e,p,d")->required();
    compare->add_option("--replay", replay, "on | off")->required();
    compare->add_option("--out", out_dir, "output directory")->required();
    compare->add_option("--benchmark", benchmark, "benchmark spec");
    compare->add_option("--jobs", jobs, "worker cap (0 = default)");

    std::string suite = "default";
    int runs = 100;
    auto* verify = app.add_subcommand("verify", "run theory referees");
    verify->add_option("--suite", suite, "default | brackets | equivalence | budget | "
                                         "optimality | pullbounds | confidence | figure | "
                                         "persistence | distinction | shbound | monotone")
        ->required();
    verify->add_option("--runs", runs, "instances / MC runs")->required();
    verify->add_option("--jobs", jobs, "worker cap (0 = default)");

    double alpha = 0.5, eps = 0.1;
    std::int64_t n = 16, r_cap = 16;
    std::string out_file = "bench.csv";
    bool force = false;
    auto* gen = app.add_subcommand("gen-bench", "materialize a synthetic tabular benchmark");
    gen->add_option("--alpha", alpha, "eps-optimal proportion")->required();
    gen->add_option("--eps", eps, "optimality gap")->required();
    gen->add_option("--n", n, "config count")->required();
    gen->add_option("--Rcap", r_cap, "max fidelity")->required();
    gen->add_option("--out", out_file, "output CSV")->required();
    gen->add_flag("--force", force, "overwrite an existing file");
    gen->add_option("--seed", seed, "sampler seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(run)) return cmd_run(benchmark, R, eta, seed, out_dir);
        if (app.got_subcommand(deepen_cmd)) return cmd_deepen(state_path, mode, out_dir);
        if (app.got_subcommand(compare))
            return cmd_compare(benchmark, R0, eta, seeds, modes_csv, replay, out_dir,
                               jobs);
        if (app.got_subcommand(verify)) return cmd_verify(suite, runs, jobs);
        if (app.got_subcommand(gen))
            return cmd_gen_bench(alpha, eps, n, r_cap, out_file, force, seed);
    } catch (const StateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
