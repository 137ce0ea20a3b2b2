#include "idhb/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace idhb {

// --- LossCurve --------------------------------------------------------------

LossCurve LossCurve::power(double nu, double c, double p) {
    if (c < 0.0) throw std::invalid_argument("power curve: c must be >= 0");
    if (p <= 0.0) throw std::invalid_argument("power curve: p must be > 0");
    LossCurve lc;
    lc.kind_ = Kind::Power;
    lc.nu_ = nu;
    lc.c_ = c;
    lc.p_ = p;
    return lc;
}

LossCurve LossCurve::crossing(double early_loss, double late_loss, Level t_x) {
    if (t_x < 1) throw std::invalid_argument("crossing curve: t_x must be >= 1");
    LossCurve lc;
    lc.kind_ = Kind::Crossing;
    lc.early_ = early_loss;
    lc.nu_ = late_loss;
    lc.t_x_ = t_x;
    return lc;
}

LossCurve LossCurve::table(std::vector<std::pair<Level, double>> grid) {
    if (grid.empty()) throw std::invalid_argument("table curve: empty grid");
    std::sort(grid.begin(), grid.end());
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i].first == grid[i - 1].first)
            throw std::invalid_argument("table curve: duplicate level " +
                                        std::to_string(grid[i].first));
    LossCurve lc;
    lc.kind_ = Kind::Table;
    lc.grid_ = std::move(grid);
    lc.nu_ = lc.grid_.back().second; // limit: value at the deepest level
    return lc;
}

double LossCurve::at(Level t) const {
    if (t < 1) throw std::domain_error("loss curve: level must be >= 1");
    switch (kind_) {
    case Kind::Power:
        if (c_ == 0.0) return nu_;
        if (p_ == 1.0) return nu_ + c_ / static_cast<double>(t);
        return nu_ + c_ * std::pow(static_cast<double>(t), -p_);
    case Kind::Crossing:
        return t < t_x_ ? early_ : nu_;
    case Kind::Table: {
        auto it = std::lower_bound(grid_.begin(), grid_.end(),
                                   std::make_pair(t, -1.0));
        if (it == grid_.end() || it->first != t)
            throw std::domain_error("table curve: level " + std::to_string(t) +
                                    " is not on the fidelity grid");
        return it->second;
    }
    }
    throw std::logic_error("unreachable");
}

double LossCurve::limit() const { return nu_; }

// --- CurveTable -------------------------------------------------------------

void CurveTable::add(ConfigId id, LossCurve curve) {
    if (id < 0) throw std::invalid_argument("config id must be non-negative");
    auto [it, inserted] = curves_.emplace(id, std::move(curve));
    if (!inserted)
        throw ContractError("config " + std::to_string(id) + " already registered");
}

const LossCurve& CurveTable::at(ConfigId id) const {
    auto it = curves_.find(id);
    if (it == curves_.end())
        throw std::out_of_range("unknown config " + std::to_string(id));
    return it->second;
}

// --- Envelope ---------------------------------------------------------------

Envelope Envelope::power(double c_max, double p_min) {
    if (c_max < 0.0) throw std::invalid_argument("envelope: c_max must be >= 0");
    if (p_min <= 0.0) throw std::invalid_argument("envelope: p_min must be > 0");
    return Envelope([c_max, p_min](Level j) {
        if (c_max == 0.0) return 0.0;
        if (p_min == 1.0) return c_max / static_cast<double>(j);
        return c_max * std::pow(static_cast<double>(j), -p_min);
    });
}

Level envelope_inverse(const Envelope& env, double y, Level cap) {
    if (y <= 0.0) throw std::domain_error("envelope_inverse: y must be > 0");
    if (cap < 1) throw std::invalid_argument("envelope_inverse: cap must be >= 1");
    if (env.gamma(cap) > y) return cap; // no admissible j <= cap
    // gamma nonincreasing: binary search the smallest j with gamma(j) <= y.
    Level lo = 1, hi = cap;
    while (lo < hi) {
        Level mid = lo + (hi - lo) / 2;
        if (env.gamma(mid) <= y)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

// --- PullLedger / EvaluationCache -------------------------------------------

void PullLedger::charge(ConfigId config, Level level) {
    if (level < 1) throw std::invalid_argument("ledger: level must be >= 1");
    entries_.emplace_back(config, level);
    total_ += level;
}

const double* EvaluationCache::find(ConfigId c, Level l) const {
    auto it = map_.find({c, l});
    return it == map_.end() ? nullptr : &it->second;
}

std::optional<std::pair<Level, double>> EvaluationCache::deepest(ConfigId c) const {
    auto it = map_.upper_bound({c, std::numeric_limits<Level>::max()});
    if (it == map_.begin()) return std::nullopt;
    --it;
    if (it->first.first != c) return std::nullopt;
    return std::make_pair(it->first.second, it->second);
}

void EvaluationCache::put(ConfigId c, Level l, double loss) {
    auto [it, inserted] = map_.emplace(Key{c, l}, loss);
    if (!inserted && it->second != loss)
        throw ContractError("cache rebind for config " + std::to_string(c) +
                            " at level " + std::to_string(l));
}

// --- evaluate / top_k -------------------------------------------------------

double evaluate(ConfigId config, Level level, CoreHandles& h) {
    if (level < 1) throw std::domain_error("evaluate: level must be >= 1");
    if (const double* hit = h.cache.find(config, level)) {
        ++h.cache.hits;
        return *hit;
    }
    double loss = h.oracle.loss(config, level); // may throw; charge only on success
    h.ledger.charge(config, level);
    h.cache.put(config, level, loss);
    return loss;
}

std::vector<ConfigId> top_k(const std::vector<ConfigId>& candidates,
                            const std::map<ConfigId, double>& losses,
                            std::int64_t k) {
    if (k < 0) throw std::invalid_argument("top_k: k must be >= 0");
    std::vector<std::pair<double, ConfigId>> ranked;
    ranked.reserve(candidates.size());
    for (ConfigId c : candidates) {
        auto it = losses.find(c);
        if (it == losses.end())
            throw ContractError("top_k: no loss for candidate " + std::to_string(c));
        ranked.emplace_back(it->second, c);
    }
    std::sort(ranked.begin(), ranked.end()); // (loss asc, id asc)
    std::size_t keep = std::min<std::size_t>(ranked.size(),
                                             static_cast<std::size_t>(k));
    std::vector<ConfigId> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back(ranked[i].second);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace idhb
