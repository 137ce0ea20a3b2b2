#pragma once

#include "idhb/core.hpp"
#include "idhb/rng.hpp"

#include <filesystem>
#include <optional>

namespace idhb {

// ---------------------------------------------------------------------------
// Synthetic curve families

// Parameters of one power curve ell(t) = nu + c * t^(-p).
struct PowerCurveSpec {
    double nu = 0.0;
    double c = 0.0;  // >= 0
    double p = 1.0;  // > 0
    LossCurve curve() const { return LossCurve::power(nu, c, p); }
};

// Step curve that ranks differently at small vs large t: early_loss before
// the crossover, late_loss (= nu) from it on.
struct CrossingCurveSpec {
    double early_loss = 0.0;
    double late_loss = 0.0;
    Level crossover = 1;
    LossCurve curve() const {
        return LossCurve::crossing(early_loss, late_loss, crossover);
    }
};

// Assumption-2 sampler: a draw is eps-optimal (nu in [nu_star, nu_star+eps))
// with probability alpha, otherwise nu is uniform in [nu_star+eps,
// nu_star+worse_span]. c ~ U[0, c_max], p fixed. Every draw satisfies the
// family envelope gamma(j) = c_max * j^(-p).
struct SamplerSpec {
    double alpha = 0.5;
    double nu_star = 0.0;
    double eps = 0.1;
    double worse_span = 1.0; // suboptimal limits live in (nu_star+eps, nu_star+worse_span]
    double c_max = 1.0;
    double p = 1.0;
    std::uint64_t seed = 0;

    friend bool operator==(const SamplerSpec&, const SamplerSpec&) = default;
};

// One draw from the family; consumes exactly three stream values.
LossCurve draw_curve(const SamplerSpec& spec, SplitMixRng& rng);

// `count` independent draws with ids 0..count-1, deterministic under
// spec.seed. Invalid alpha is a domain error.
std::vector<std::pair<ConfigId, LossCurve>> sample_configs(const SamplerSpec& spec,
                                                           std::int64_t count);

// Envelope dominating every curve the family can produce.
Envelope envelope_for(const SamplerSpec& spec);
Envelope envelope_for(double c_max, double p_min);

// ---------------------------------------------------------------------------
// Tabular benchmarks

// Exact fidelity grid loaded from CSV (`config_id,fidelity,loss`, `#`
// comments). Rectangular: every config has a loss at every grid fidelity.
// Lookups are exact; interpolation is forbidden.
class TabularBenchmark {
public:
    static TabularBenchmark from_cells(
        std::vector<std::tuple<ConfigId, Level, double>> cells);

    const std::vector<ConfigId>& config_ids() const { return config_ids_; }
    const std::vector<Level>& fidelities() const { return fidelities_; }
    Level r_cap() const { return fidelities_.empty() ? 0 : fidelities_.back(); }
    std::size_t cell_count() const { return cells_.size(); }

    // std::out_of_range for unknown configs, std::domain_error off-grid.
    double loss(ConfigId id, Level fidelity) const;

    // The config's full row as a table curve.
    LossCurve curve_for(ConfigId id) const;

private:
    std::vector<ConfigId> config_ids_;
    std::vector<Level> fidelities_;
    std::map<std::pair<ConfigId, Level>, double> cells_;
};

// Parse failure with the offending line, where one is known.
struct ParseError : std::runtime_error {
    ParseError(std::string msg, int line_no = 0)
        : std::runtime_error(line_no > 0
                                 ? "line " + std::to_string(line_no) + ": " + msg
                                 : std::move(msg)),
          line(line_no) {}
    int line;
};

TabularBenchmark load_tabular(const std::filesystem::path& path);

// Materialize `count` sampler draws onto a dense fidelity grid 1..r_cap and
// write them in the tabular CSV format. Refuses to overwrite unless `force`.
void write_tabular(const SamplerSpec& spec, std::int64_t count, Level r_cap,
                   const std::filesystem::path& path, bool force);

// r / R_t, for benchmarks whose fidelity is a training-set fraction.
double budget_to_fraction(Level r, Level R_t);

// ---------------------------------------------------------------------------
// Benchmark descriptor (what a run draws its configs from)

struct BenchmarkSpec {
    enum class Kind { Synthetic, Tabular };
    Kind kind = Kind::Synthetic;
    SamplerSpec sampler;        // synthetic only (seed field unused here)
    std::filesystem::path path; // tabular only

    static BenchmarkSpec synthetic(SamplerSpec s) {
        BenchmarkSpec b;
        b.kind = Kind::Synthetic;
        b.sampler = s;
        return b;
    }
    static BenchmarkSpec tabular(std::filesystem::path p) {
        BenchmarkSpec b;
        b.kind = Kind::Tabular;
        b.path = std::move(p);
        return b;
    }
};

// ---------------------------------------------------------------------------
// Shipped fixture: eight hand-built curves on levels {1,2,4} whose deepening
// outcomes separate the three promotion policies (used by tests and the
// acceptance suite).

struct DistinctionInstance {
    CurveTable curves;            // ids 0..7; 0..3 are the old run's arms
    std::vector<ConfigId> old_arms;
    std::vector<ConfigId> fresh_arms;
    int eta = 2;
    Level r = 1;
    int rounds = 2;
    Level R = 4;
};

DistinctionInstance distinction_instance();

} // namespace idhb
