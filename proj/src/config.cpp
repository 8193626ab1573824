#include "semiflow/config.hpp"

#include <fstream>
#include <sstream>

#include "semiflow/presets.hpp"

namespace semiflow {

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex;
    for (int i = 15; i >= 0; --i) os << ((h >> (4 * i)) & 0xf);
    return os.str();
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
    throw ConfigError("config schema: " + msg);
}

MapSpec parse_map(const json& j, std::string& name_out) {
    if (j.is_string()) {
        name_out = j.get<std::string>();
        return map_preset(name_out);
    }
    if (!j.is_object()) fail("'map' must be a preset name or an object");
    name_out = "custom";
    MapSpec spec;
    spec.name = "custom";
    if (!j.contains("intervals") || !j["intervals"].is_array())
        fail("'map.intervals' must be an array of [lo, hi] pairs");
    for (const auto& iv : j["intervals"]) {
        if (!iv.is_array() || iv.size() != 2) fail("bad interval entry");
        spec.intervals.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    if (!j.contains("branches") || !j["branches"].is_array())
        fail("'map.branches' must be an array");
    for (const auto& b : j["branches"]) {
        if (!b.is_object()) fail("bad branch entry");
        BranchSpec bs;
        if (!b.contains("to") || !b.contains("from"))
            fail("branch needs 'to' (target interval) and 'from' (domain)");
        bs.target = b["to"].get<int>();
        bs.domain = b["from"].get<int>();
        const std::string fam = b.value("family", std::string("affine"));
        if (fam == "affine") {
            bs.family = BranchFamily::Affine;
        } else if (fam == "perturbed") {
            bs.family = BranchFamily::Perturbed;
            bs.eps = b.value("eps", 0.0);
        } else {
            fail("branch family must be 'affine' or 'perturbed'");
        }
        if (!b.contains("scale") || !b.contains("shift"))
            fail("branch needs 'scale' and 'shift'");
        bs.scale = b["scale"].get<double>();
        bs.shift = b["shift"].get<double>();
        spec.branches.push_back(bs);
    }
    spec.alpha = j.value("alpha", 0.5);
    return spec;
}

std::vector<double> parse_grid(const json& j, const char* what) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) out.push_back(v.get<double>());
        return out;
    }
    if (j.is_object()) {
        if (!j.contains("start") || !j.contains("stop") || !j.contains("count"))
            fail(std::string(what) + " object needs start/stop/count");
        const double a = j["start"].get<double>();
        const double b = j["stop"].get<double>();
        const int n = j["count"].get<int>();
        if (n < 1) fail(std::string(what) + " count must be >= 1");
        for (int i = 0; i < n; ++i)
            out.push_back(n == 1 ? a : a + (b - a) * i / double(n - 1));
        return out;
    }
    fail(std::string(what) + " must be an array or {start, stop, count}");
}

} // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) fail("top level must be an object");
    ExperimentConfig cfg;
    cfg.schema_version = j.value("schema_version", 1);
    if (cfg.schema_version != 1) fail("unsupported schema_version");

    if (!j.contains("map")) fail("missing 'map'");
    cfg.map_spec = parse_map(j["map"], cfg.map_name);

    if (j.contains("roof")) {
        if (!j["roof"].is_string()) fail("'roof' must be a preset name");
        cfg.roof_name = j["roof"].get<std::string>();
    }
    roof_preset(cfg.roof_name);  // validates the name

    cfg.grid_m = j.value("grid_m", 1025);
    if (cfg.grid_m < 2) fail("grid_m must be >= 2");
    if (j.contains("alpha")) cfg.map_spec.alpha = j["alpha"].get<double>();
    if (cfg.map_spec.alpha <= 0.0 || cfg.map_spec.alpha > 1.0)
        fail("alpha must lie in (0, 1]");

    if (j.contains("observables")) {
        cfg.observables.clear();
        for (const auto& o : j["observables"])
            cfg.observables.push_back(o.get<std::string>());
    }
    if (cfg.observables.empty()) fail("at least one observable is required");

    if (j.contains("t_grid")) cfg.t_grid = parse_grid(j["t_grid"], "t_grid");
    if (j.contains("b_grid")) cfg.b_grid = parse_grid(j["b_grid"], "b_grid");
    cfg.noise_floor = j.value("noise_floor", 1e-7);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.out_dir = j.value("out_dir", std::string("out"));

    // Canonical dump (nlohmann objects are key-sorted) drives the hash.
    nlohmann::json canon = j;
    canon["schema_version"] = cfg.schema_version;
    cfg.canonical = canon;
    cfg.config_hash = fnv1a_hex(canon.dump());
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config JSON parse error: " + std::string(e.what()));
    }
    return parse_config(j);
}

ExperimentConfig preset_config(const std::string& name) {
    const auto dash = name.find('-');
    if (dash == std::string::npos)
        throw ConfigError("preset must be '<map>-<roof>', e.g. "
                          "'doub2-quadratic'");
    nlohmann::json j;
    j["map"] = name.substr(0, dash);
    j["roof"] = name.substr(dash + 1);
    j["t_grid"] = {{"start", 0.0}, {"stop", 40.0}, {"count", 161}};
    j["b_grid"] = {10.0, 30.0, 100.0, 300.0, 1000.0};
    return parse_config(j);
}

} // namespace semiflow
