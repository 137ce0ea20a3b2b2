#include "idhb/bench.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>

namespace idhb {

namespace {

void validate_sampler(const SamplerSpec& s) {
    if (!(s.alpha > 0.0 && s.alpha < 1.0))
        throw std::domain_error("sampler: alpha must lie in (0,1)");
    if (s.eps <= 0.0) throw std::domain_error("sampler: eps must be > 0");
    if (s.worse_span <= s.eps)
        throw std::domain_error("sampler: worse_span must exceed eps");
    if (s.c_max < 0.0) throw std::domain_error("sampler: c_max must be >= 0");
    if (s.p <= 0.0) throw std::domain_error("sampler: p must be > 0");
}

} // namespace

LossCurve draw_curve(const SamplerSpec& spec, SplitMixRng& rng) {
    validate_sampler(spec);
    double u_branch = rng.next_double();
    double u_nu = rng.next_double();
    double u_c = rng.next_double();
    double nu = u_branch < spec.alpha
                    ? spec.nu_star + spec.eps * u_nu
                    : spec.nu_star + spec.eps + (spec.worse_span - spec.eps) * u_nu;
    return LossCurve::power(nu, spec.c_max * u_c, spec.p);
}

std::vector<std::pair<ConfigId, LossCurve>> sample_configs(const SamplerSpec& spec,
                                                           std::int64_t count) {
    validate_sampler(spec);
    if (count < 0) throw std::invalid_argument("sample_configs: count must be >= 0");
    SplitMixRng rng{spec.seed, 0};
    std::vector<std::pair<ConfigId, LossCurve>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (ConfigId id = 0; id < count; ++id)
        out.emplace_back(id, draw_curve(spec, rng));
    return out;
}

Envelope envelope_for(const SamplerSpec& spec) {
    return Envelope::power(spec.c_max, spec.p);
}

Envelope envelope_for(double c_max, double p_min) {
    return Envelope::power(c_max, p_min);
}

// --- TabularBenchmark --------------------------------------------------------

TabularBenchmark TabularBenchmark::from_cells(
    std::vector<std::tuple<ConfigId, Level, double>> cells) {
    TabularBenchmark tb;
    for (const auto& [id, fid, loss] : cells) {
        if (fid < 1) throw ParseError("fidelity must be >= 1");
        auto [it, inserted] = tb.cells_.emplace(std::make_pair(id, fid), loss);
        (void)it;
        if (!inserted)
            throw ParseError("duplicate cell (config " + std::to_string(id) +
                             ", fidelity " + std::to_string(fid) + ")");
        tb.config_ids_.push_back(id);
        tb.fidelities_.push_back(fid);
    }
    auto dedup = [](auto& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(tb.config_ids_);
    dedup(tb.fidelities_);
    for (ConfigId id : tb.config_ids_)
        for (Level fid : tb.fidelities_)
            if (tb.cells_.count({id, fid}) == 0)
                throw ParseError("ragged grid: missing cell (config " +
                                 std::to_string(id) + ", fidelity " +
                                 std::to_string(fid) + ")");
    return tb;
}

double TabularBenchmark::loss(ConfigId id, Level fidelity) const {
    if (!std::binary_search(config_ids_.begin(), config_ids_.end(), id))
        throw std::out_of_range("tabular: unknown config " + std::to_string(id));
    auto it = cells_.find({id, fidelity});
    if (it == cells_.end())
        throw std::domain_error("tabular: fidelity " + std::to_string(fidelity) +
                                " is not on the grid");
    return it->second;
}

LossCurve TabularBenchmark::curve_for(ConfigId id) const {
    if (!std::binary_search(config_ids_.begin(), config_ids_.end(), id))
        throw std::out_of_range("tabular: unknown config " + std::to_string(id));
    std::vector<std::pair<Level, double>> grid;
    grid.reserve(fidelities_.size());
    for (Level fid : fidelities_) grid.emplace_back(fid, cells_.at({id, fid}));
    return LossCurve::table(std::move(grid));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& tok, const char* what, int line_no) {
    std::int64_t v = 0;
    std::string t = trim(tok);
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw ParseError(std::string("expected integer ") + what + ", got '" + tok + "'",
                         line_no);
    return v;
}

double parse_num(const std::string& tok, const char* what, int line_no) {
    double v = 0.0;
    std::string t = trim(tok);
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw ParseError(std::string("expected number ") + what + ", got '" + tok + "'",
                         line_no);
    return v;
}

} // namespace

TabularBenchmark load_tabular(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::vector<std::tuple<ConfigId, Level, double>> cells;
    std::int64_t dup_guard_line = 0;
    std::map<std::pair<ConfigId, Level>, int> first_line_of;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t != "config_id,fidelity,loss")
                throw ParseError("expected header 'config_id,fidelity,loss', got '" +
                                 t + "'", line_no);
            header_seen = true;
            continue;
        }
        auto fields = split_csv(t);
        if (fields.size() != 3)
            throw ParseError("expected 3 fields, got " +
                             std::to_string(fields.size()), line_no);
        ConfigId id = parse_int(fields[0], "config_id", line_no);
        Level fid = parse_int(fields[1], "fidelity", line_no);
        double loss = parse_num(fields[2], "loss", line_no);
        if (fid < 1) throw ParseError("fidelity must be >= 1", line_no);
        auto [it, inserted] = first_line_of.emplace(std::make_pair(id, fid), line_no);
        if (!inserted) {
            dup_guard_line = it->second;
            throw ParseError("duplicate cell (config " + std::to_string(id) +
                                 ", fidelity " + std::to_string(fid) +
                                 "), first seen on line " +
                                 std::to_string(dup_guard_line),
                             line_no);
        }
        cells.emplace_back(id, fid, loss);
    }
    if (!header_seen) throw ParseError("missing header 'config_id,fidelity,loss'");
    return TabularBenchmark::from_cells(std::move(cells));
}

void write_tabular(const SamplerSpec& spec, std::int64_t count, Level r_cap,
                   const std::filesystem::path& path, bool force) {
    if (r_cap < 1) throw std::invalid_argument("write_tabular: r_cap must be >= 1");
    if (count < 0) throw std::invalid_argument("write_tabular: count must be >= 0");
    if (!force && std::filesystem::exists(path))
        throw std::runtime_error("refusing to overwrite " + path.string() +
                                 " (use --force)");
    auto configs = sample_configs(spec, count);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# synthetic benchmark: alpha=" << format_double(spec.alpha)
        << " eps=" << format_double(spec.eps)
        << " c_max=" << format_double(spec.c_max)
        << " p=" << format_double(spec.p)
        << " seed=" << spec.seed << "\n";
    out << "config_id,fidelity,loss\n";
    for (const auto& [id, curve] : configs)
        for (Level fid = 1; fid <= r_cap; ++fid)
            out << id << "," << fid << "," << format_double(curve.at(fid)) << "\n";
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

double budget_to_fraction(Level r, Level R_t) {
    if (R_t < 1) throw std::invalid_argument("budget_to_fraction: R_t must be >= 1");
    if (r < 1 || r > R_t)
        throw std::invalid_argument("budget_to_fraction: r must lie in [1, R_t]");
    return static_cast<double>(r) / static_cast<double>(R_t);
}

// --- distinction fixture ------------------------------------------------------

DistinctionInstance distinction_instance() {
    DistinctionInstance d;
    auto tab = [](std::initializer_list<double> losses) {
        std::vector<std::pair<Level, double>> grid;
        Level level = 1;
        for (double v : losses) {
            grid.emplace_back(level, v);
            level *= 2;
        }
        return LossCurve::table(std::move(grid));
    };
    // Old arms. 0 rides an early lead that fades. 1 is the old champion:
    // weak at level 1, dominant from level 2 on — the merged pool drops it
    // at the first level, so only policies that consult the old state can
    // bring it back.
    d.curves.add(0, tab({0.10, 0.20, 0.40}));
    d.curves.add(1, tab({0.15, 0.05, 0.04}));
    d.curves.add(2, tab({0.60, 0.60, 0.60}));
    d.curves.add(3, tab({0.70, 0.70, 0.70}));
    // Fresh arms. 4-6 look strong at level 1 and stall immediately.
    d.curves.add(4, tab({0.05, 0.50, 0.45}));
    d.curves.add(5, tab({0.08, 0.55, 0.55}));
    d.curves.add(6, tab({0.09, 0.58, 0.58}));
    d.curves.add(7, tab({0.90, 0.90, 0.90}));
    d.old_arms = {0, 1, 2, 3};
    d.fresh_arms = {4, 5, 6, 7};
    return d;
}

} // namespace idhb
