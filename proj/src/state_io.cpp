#include "idhb/state_io.hpp"

#include <fstream>
#include <json.hpp>

namespace idhb {

namespace {

using Json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

Json curve_to_json(ConfigId id, const LossCurve& c) {
    switch (c.kind()) {
    case LossCurve::Kind::Power:
        return Json::array({id, "power", c.nu(), c.c(), c.p()});
    case LossCurve::Kind::Crossing:
        return Json::array({id, "crossing", c.early_loss(), c.limit(), c.crossover()});
    case LossCurve::Kind::Table: {
        Json grid = Json::array();
        for (const auto& [level, loss] : c.grid())
            grid.push_back(Json::array({level, loss}));
        return Json::array({id, "table", std::move(grid)});
    }
    }
    throw std::logic_error("unreachable");
}

std::pair<ConfigId, LossCurve> curve_from_json(const Json& j) {
    if (!j.is_array() || j.size() < 2 || !j[0].is_number_integer() || !j[1].is_string())
        throw StateError("malformed entry in section 'configs'");
    ConfigId id = j[0].get<ConfigId>();
    std::string kind = j[1].get<std::string>();
    if (kind == "power") {
        if (j.size() != 5) throw StateError("malformed power curve in 'configs'");
        return {id, LossCurve::power(j[2].get<double>(), j[3].get<double>(),
                                     j[4].get<double>())};
    }
    if (kind == "crossing") {
        if (j.size() != 5) throw StateError("malformed crossing curve in 'configs'");
        return {id, LossCurve::crossing(j[2].get<double>(), j[3].get<double>(),
                                        j[4].get<Level>())};
    }
    if (kind == "table") {
        if (j.size() != 3 || !j[2].is_array())
            throw StateError("malformed table curve in 'configs'");
        std::vector<std::pair<Level, double>> grid;
        for (const auto& cell : j[2])
            grid.emplace_back(cell.at(0).get<Level>(), cell.at(1).get<double>());
        return {id, LossCurve::table(std::move(grid))};
    }
    throw StateError("unknown curve kind '" + kind + "' in 'configs'");
}

const Json& require(const Json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end())
        throw StateError("missing section '" + std::string(field) + "'");
    return *it;
}

Json build_document(const RunState& st) {
    Json doc;
    doc["format_version"] = kStateFormatVersion;
    doc["t"] = st.t;
    doc["eta"] = st.eta;
    doc["R_t"] = st.R_t;
    doc["rng"] = Json{{"algorithm_name", SplitMixRng::kAlgorithmName},
                      {"seed", st.rng.seed},
                      {"position", st.rng.position}};
    Json brackets = Json::array();
    for (const BracketState& b : st.brackets) {
        Json iterations = Json::array();
        for (const IterationRecord& rec : b.iterations) {
            Json losses = Json::array();
            for (const auto& [id, loss] : rec.losses)
                losses.push_back(Json::array({id, loss}));
            iterations.push_back(Json{{"r_i", rec.level},
                                      {"losses", std::move(losses)},
                                      {"promoted", rec.promoted},
                                      {"discarded", rec.discarded},
                                      {"pulled", rec.prescribed}});
        }
        brackets.push_back(Json{{"s", b.s},
                                {"n_s", b.n_start},
                                {"r_s", b.r_start},
                                {"iterations", std::move(iterations)},
                                {"charged", b.charged}});
    }
    doc["brackets"] = std::move(brackets);
    Json ledger = Json::array();
    for (const auto& [id, level] : st.ledger.entries())
        ledger.push_back(Json::array({id, level}));
    doc["ledger"] = std::move(ledger);
    doc["next_config_id"] = st.next_config_id;

    if (st.benchmark.kind == BenchmarkSpec::Kind::Synthetic) {
        const SamplerSpec& sp = st.benchmark.sampler;
        doc["benchmark"] = Json{{"kind", "synthetic"},
                                {"alpha", sp.alpha},
                                {"nu_star", sp.nu_star},
                                {"eps", sp.eps},
                                {"worse_span", sp.worse_span},
                                {"c_max", sp.c_max},
                                {"p", sp.p}};
    } else {
        doc["benchmark"] = Json{{"kind", "tabular"},
                                {"path", st.benchmark.path.string()}};
    }
    Json configs = Json::array();
    for (const auto& [id, curve] : st.configs.entries())
        configs.push_back(curve_to_json(id, curve));
    doc["configs"] = std::move(configs);
    Json cache = Json::array();
    for (const auto& [key, loss] : st.cache.entries())
        cache.push_back(Json::array({key.first, key.second, loss}));
    doc["cache"] = std::move(cache);
    Json tabular_source = Json::array();
    for (const auto& [id, row] : st.tabular_source)
        tabular_source.push_back(Json::array({id, row}));
    doc["tabular_source"] = std::move(tabular_source);
    doc["phase"] = Json{{"start_total", st.phase_start_total},
                        {"reused", st.phase_reused}};
    if (st.lineage_best)
        doc["lineage_best"] = Json{{"config", st.lineage_best->config},
                                   {"loss", st.lineage_best->loss},
                                   {"level", st.lineage_best->level},
                                   {"bracket", st.lineage_best->bracket_s}};
    else
        doc["lineage_best"] = nullptr;
    return doc;
}

} // namespace

std::string save_state(const RunState& state) {
    Json doc = build_document(state);
    doc["checksum"] = hex64(fnv1a(doc.dump(2)));
    return doc.dump(2) + "\n";
}

RunState load_state(const std::string& document) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw StateError(std::string("state document is not valid JSON (") +
                         e.what() + ")");
    }
    if (!doc.is_object()) throw StateError("state document is not a JSON object");

    int version = require(doc, "format_version").get<int>();
    if (version != kStateFormatVersion)
        throw StateError("unsupported format_version " + std::to_string(version) +
                         " (expected " + std::to_string(kStateFormatVersion) + ")");

    // Verify the checksum against the canonical re-serialization.
    std::string stored = require(doc, "checksum").get<std::string>();
    Json body = doc;
    body.erase("checksum");
    if (hex64(fnv1a(body.dump(2))) != stored)
        throw StateError("checksum failure: document was modified or truncated");

    RunState st;
    st.t = require(doc, "t").get<int>();
    st.eta = require(doc, "eta").get<int>();
    st.R_t = require(doc, "R_t").get<Level>();
    const Json& rng = require(doc, "rng");
    std::string algo = require(rng, "algorithm_name").get<std::string>();
    if (algo != SplitMixRng::kAlgorithmName)
        throw StateError("unknown rng algorithm '" + algo + "'");
    st.rng.seed = require(rng, "seed").get<std::uint64_t>();
    st.rng.position = require(rng, "position").get<std::uint64_t>();

    for (const Json& jb : require(doc, "brackets")) {
        BracketState b;
        b.s = require(jb, "s").get<int>();
        b.n_start = require(jb, "n_s").get<std::int64_t>();
        b.r_start = require(jb, "r_s").get<Level>();
        b.charged = require(jb, "charged").get<std::int64_t>();
        for (const Json& ji : require(jb, "iterations")) {
            IterationRecord rec;
            rec.level = require(ji, "r_i").get<Level>();
            for (const Json& jl : require(ji, "losses"))
                rec.losses.emplace_back(jl.at(0).get<ConfigId>(), jl.at(1).get<double>());
            rec.promoted = require(ji, "promoted").get<std::vector<ConfigId>>();
            rec.discarded = require(ji, "discarded").get<std::vector<ConfigId>>();
            rec.prescribed = require(ji, "pulled").get<std::int64_t>();
            b.iterations.push_back(std::move(rec));
        }
        st.brackets.push_back(std::move(b));
    }
    for (const Json& jl : require(doc, "ledger"))
        st.ledger.charge(jl.at(0).get<ConfigId>(), jl.at(1).get<Level>());
    st.next_config_id = require(doc, "next_config_id").get<std::int64_t>();

    const Json& jbench = require(doc, "benchmark");
    std::string kind = require(jbench, "kind").get<std::string>();
    if (kind == "synthetic") {
        SamplerSpec sp;
        sp.alpha = require(jbench, "alpha").get<double>();
        sp.nu_star = require(jbench, "nu_star").get<double>();
        sp.eps = require(jbench, "eps").get<double>();
        sp.worse_span = require(jbench, "worse_span").get<double>();
        sp.c_max = require(jbench, "c_max").get<double>();
        sp.p = require(jbench, "p").get<double>();
        st.benchmark = BenchmarkSpec::synthetic(sp);
    } else if (kind == "tabular") {
        st.benchmark = BenchmarkSpec::tabular(require(jbench, "path").get<std::string>());
    } else {
        throw StateError("unknown benchmark kind '" + kind + "'");
    }

    for (const Json& jc : require(doc, "configs")) {
        auto [id, curve] = curve_from_json(jc);
        st.configs.add(id, std::move(curve));
    }
    for (const Json& jc : require(doc, "cache"))
        st.cache.put(jc.at(0).get<ConfigId>(), jc.at(1).get<Level>(),
                     jc.at(2).get<double>());
    for (const Json& jt : require(doc, "tabular_source"))
        st.tabular_source[jt.at(0).get<ConfigId>()] = jt.at(1).get<ConfigId>();
    const Json& phase = require(doc, "phase");
    st.phase_start_total = require(phase, "start_total").get<std::int64_t>();
    st.phase_reused = require(phase, "reused").get<std::int64_t>();
    const Json& lb = require(doc, "lineage_best");
    if (!lb.is_null())
        st.lineage_best = Incumbent{require(lb, "config").get<ConfigId>(),
                                    require(lb, "loss").get<double>(),
                                    require(lb, "level").get<Level>(),
                                    require(lb, "bracket").get<int>()};
    return st;
}

void save_state_file(const RunState& state, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << save_state(state);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

RunState load_state_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StateError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return load_state(text);
}

} // namespace idhb
