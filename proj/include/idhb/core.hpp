#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace idhb {

// A configuration ("arm") is identified by a non-negative integer assigned in
// sampling order within a run lineage, so sorting by id reproduces sampling
// order and gives deterministic tie-breaking everywhere.
using ConfigId = std::int64_t;

// Resource units of one evaluation (epochs, fraction steps, ...). Level t
// means the arm was trained/evaluated with t units; cost charged equals t.
using Level = std::int64_t;

// Thrown when a caller breaks an API contract (missing loss in top_k,
// rebinding a cache key, ...). Distinct from bad user input.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Loss curves

// Deterministic loss sequence ell(t) of one arm, converging to a limit nu.
// Three families cover everything the library needs:
//   power    : ell(t) = nu + c * t^(-p), the Assumption-1 workhorse
//   crossing : ell(t) = early for t < t_x, late for t >= t_x  (rank flips)
//   table    : explicit (level, loss) grid, exact lookups only
class LossCurve {
public:
    enum class Kind { Power, Crossing, Table };

    static LossCurve power(double nu, double c, double p);
    static LossCurve constant(double nu) { return power(nu, 0.0, 1.0); }
    static LossCurve crossing(double early_loss, double late_loss, Level t_x);
    static LossCurve table(std::vector<std::pair<Level, double>> grid);

    // Loss after t resource units, t >= 1. Table curves throw
    // std::domain_error for levels off the grid.
    double at(Level t) const;

    // Limit value nu.
    double limit() const;

    Kind kind() const { return kind_; }

    // Family parameters, exposed for serialization.
    double nu() const { return nu_; }
    double c() const { return c_; }
    double p() const { return p_; }
    double early_loss() const { return early_; }
    Level crossover() const { return t_x_; }
    const std::vector<std::pair<Level, double>>& grid() const { return grid_; }

    friend bool operator==(const LossCurve&, const LossCurve&) = default;

private:
    LossCurve() = default;
    Kind kind_ = Kind::Power;
    double nu_ = 0.0, c_ = 0.0, p_ = 1.0; // power
    double early_ = 0.0;                  // crossing
    Level t_x_ = 1;                       // crossing
    std::vector<std::pair<Level, double>> grid_; // table, sorted by level
};

// The arms known to one run lineage: id -> curve. Immutable entries; acts as
// the loss oracle behind evaluate().
class CurveTable {
public:
    void add(ConfigId id, LossCurve curve);
    bool contains(ConfigId id) const { return curves_.count(id) != 0; }
    const LossCurve& at(ConfigId id) const; // std::out_of_range if unknown
    double loss(ConfigId id, Level t) const { return at(id).at(t); }
    double limit(ConfigId id) const { return at(id).limit(); }
    std::size_t size() const { return curves_.size(); }
    const std::map<ConfigId, LossCurve>& entries() const { return curves_; }

private:
    std::map<ConfigId, LossCurve> curves_;
};

// ---------------------------------------------------------------------------
// Convergence envelope

// Nonincreasing gamma with gamma(j) >= sup_i |ell_{i,j} - nu_i| over the
// instance's arms.
class Envelope {
public:
    explicit Envelope(std::function<double(Level)> gamma)
        : gamma_(std::move(gamma)) {}

    // gamma(j) = c_max * j^(-p_min); c_max = 0 gives the constant-curve
    // envelope gamma == 0.
    static Envelope power(double c_max, double p_min);

    double gamma(Level j) const { return gamma_(j); }

private:
    std::function<double(Level)> gamma_;
};

// Generalized inverse: smallest integer j in [1, cap] with gamma(j) <= y,
// or cap if no such j exists (realizes min{R, gamma^-1(y)}).
// y <= 0 is a domain error. Monotone binary search.
Level envelope_inverse(const Envelope& env, double y, Level cap);

// ---------------------------------------------------------------------------
// Pull accounting

// Append-only record of every charged evaluation. total() is the quantity
// the pull-ratio bounds cap.
class PullLedger {
public:
    void charge(ConfigId config, Level level);
    std::int64_t total() const { return total_; }
    std::size_t size() const { return entries_.size(); }
    std::span<const std::pair<ConfigId, Level>> entries() const { return entries_; }

private:
    std::vector<std::pair<ConfigId, Level>> entries_;
    std::int64_t total_ = 0;
};

// Deterministic memo of evaluations: (config, level) -> loss. A key is never
// rebound to a different value.
class EvaluationCache {
public:
    using Key = std::pair<ConfigId, Level>;

    bool contains(ConfigId c, Level l) const { return map_.count({c, l}) != 0; }
    // nullptr when absent.
    const double* find(ConfigId c, Level l) const;
    // The config's deepest cached evaluation, or nullopt.
    std::optional<std::pair<Level, double>> deepest(ConfigId c) const;
    // ContractError on rebind to a different value.
    void put(ConfigId c, Level l, double loss);
    std::size_t size() const { return map_.size(); }
    const std::map<Key, double>& entries() const { return map_; }

    // Cache hits observed by evaluate() since the last reset; the harness
    // reads this as the reused-evaluation count of a deepening phase.
    std::int64_t hits = 0;

private:
    std::map<Key, double> map_;
};

// The mutable per-run state every SH/HB routine works against. One triple
// belongs to exactly one run and is mutated single-threaded.
struct CoreHandles {
    const CurveTable& oracle;
    EvaluationCache& cache;
    PullLedger& ledger;
};

// Evaluate `config` at `level`. Cached -> returns the memoized loss and
// charges nothing; otherwise queries the oracle, charges `level` units and
// memoizes. Unknown config -> std::out_of_range; level < 1 or off a table
// grid -> std::domain_error.
double evaluate(ConfigId config, Level level, CoreHandles& h);

// The k candidates with smallest loss, ties broken by smaller id; output
// sorted (loss asc, id asc). Every candidate must have a loss in `losses`
// (ContractError otherwise). Returns min(k, |candidates|) ids.
std::vector<ConfigId> top_k(const std::vector<ConfigId>& candidates,
                            const std::map<ConfigId, double>& losses,
                            std::int64_t k);

// Shortest round-trip decimal form of a double (std::to_chars). All text
// output (CSV, tabular files) goes through this so reruns are byte-identical
// and parsing recovers the exact value.
std::string format_double(double v);

} // namespace idhb
