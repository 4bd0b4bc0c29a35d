// SPDX-License-Identifier: Apache-2.0
#include "rrce/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rrce {

using nlohmann::json;

std::string to_string(Command c)
{
    switch (c) {
    case Command::Design: return "design";
    case Command::Estimate: return "estimate";
    case Command::Sweep: return "sweep";
    case Command::Identities: return "identities";
    }
    return "sweep";
}

Command parse_command(const std::string& s)
{
    if (s == "design") return Command::Design;
    if (s == "estimate") return Command::Estimate;
    if (s == "sweep") return Command::Sweep;
    if (s == "identities") return Command::Identities;
    throw ConfigError("unknown command '" + s + "' (expected design, estimate, sweep or identities)");
}

std::vector<double> default_grid(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::Dimension: return default_dimension_sweep().grid;
    case SweepAxis::SnrDb: return {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    case SweepAxis::InrDb: return {0.0, 5.0, 10.0, 15.0, 20.0};
    case SweepAxis::SeparationDeg: return {2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0};
    }
    return {};
}

namespace {

// Strict view of a JSON object: every key must be consumed exactly by a
// getter, anything left over is reported as unknown.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw ConfigError("config: '" + where() + "' must be an object");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    void mark(const std::string& key) { seen_.insert(key); }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, double def)
    {
        seen_.insert(key);
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_number()) {
            throw type_error(key, "number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw ConfigError("config: key '" + child(key) + "' must be finite");
        }
        return d;
    }

    std::optional<double> optional_number(const std::string& key, std::optional<double> def)
    {
        seen_.insert(key);
        if (!j_.contains(key)) {
            return def;
        }
        if (j_.at(key).is_null()) {
            return std::nullopt;
        }
        return number(key, 0.0);
    }

    long long integer(const std::string& key, long long def)
    {
        seen_.insert(key);
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_number_integer()) {
            throw type_error(key, "integer");
        }
        return v.get<long long>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def)
    {
        seen_.insert(key);
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            throw type_error(key, "non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool def)
    {
        seen_.insert(key);
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_boolean()) {
            throw type_error(key, "boolean");
        }
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& def)
    {
        seen_.insert(key);
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_string()) {
            throw type_error(key, "string");
        }
        return v.get<std::string>();
    }

    std::vector<std::string> strings(const std::string& key, const std::vector<std::string>& def)
    {
        seen_.insert(key);
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_array()) {
            throw type_error(key, "array of strings");
        }
        std::vector<std::string> out;
        for (const json& e : v) {
            if (!e.is_string()) {
                throw type_error(key, "array of strings");
            }
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& def)
    {
        seen_.insert(key);
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_array()) {
            throw type_error(key, "array of numbers");
        }
        std::vector<double> out;
        for (const json& e : v) {
            if (!e.is_number()) {
                throw type_error(key, "array of numbers");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (seen_.count(it.key()) == 0) {
                throw ConfigError("config: unknown key '" + child(it.key()) + "'");
            }
        }
    }

private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    ConfigError type_error(const std::string& key, const std::string& expected) const
    {
        return ConfigError("config: key '" + child(key) + "' expected " + expected);
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

AngularSector parse_sector(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError("config: key '" + path + "' expected [lo_deg, hi_deg]");
    }
    return AngularSector{v[0].get<double>(), v[1].get<double>()};
}

GroupSpec parse_group(const json& j, const std::string& path)
{
    Reader r(j, path);
    GroupSpec g;
    g.id = static_cast<int>(r.integer("id", 0));
    g.num_users = static_cast<Index>(r.integer("num_users", 1));
    const bool has_mpcs = r.has("mpcs");
    const bool has_sectors = r.has("sectors");
    if (has_mpcs == has_sectors) {
        throw ConfigError("config: '" + path + "' needs exactly one of 'mpcs' or 'sectors'");
    }
    if (has_sectors) {
        const json& s = r.raw("sectors");
        if (!s.is_array() || s.empty()) {
            throw ConfigError("config: key '" + r.child("sectors") + "' expected non-empty array");
        }
        std::vector<AngularSector> secs;
        for (std::size_t i = 0; i < s.size(); ++i) {
            secs.push_back(parse_sector(s[i], r.child("sectors") + "[" + std::to_string(i) + "]"));
        }
        const int id = g.id;
        const Index k = g.num_users;
        g = GroupSpec::uniform(id, k, secs);
    } else {
        const json& m = r.raw("mpcs");
        if (!m.is_array() || m.empty()) {
            throw ConfigError("config: key '" + r.child("mpcs") + "' expected non-empty array");
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
            const std::string p = r.child("mpcs") + "[" + std::to_string(i) + "]";
            Reader mr(m[i], p);
            MpcSpec spec;
            spec.delay = static_cast<Index>(i);
            spec.power = mr.number("power", 1.0 / static_cast<double>(m.size()));
            if (!mr.has("sector")) {
                throw ConfigError("config: key '" + p + ".sector' is required");
            }
            spec.sector = parse_sector(mr.raw("sector"), p + ".sector");
            if (mr.has("rank_override")) {
                spec.rank_override = static_cast<Index>(mr.integer("rank_override", 1));
            } else {
                mr.mark("rank_override");
            }
            mr.finish();
            g.mpcs.push_back(spec);
        }
        g.memory = static_cast<Index>(g.mpcs.size());
    }
    r.finish();
    try {
        g.validate();
    } catch (const Error& e) {
        throw ConfigError("config: '" + path + "': " + e.what());
    }
    return g;
}

json group_to_json(const GroupSpec& g)
{
    json mpcs = json::array();
    for (const MpcSpec& m : g.mpcs) {
        json e = {{"power", m.power}, {"sector", {m.sector.lo_deg, m.sector.hi_deg}}};
        if (m.rank_override) {
            e["rank_override"] = *m.rank_override;
        }
        mpcs.push_back(e);
    }
    return {{"id", g.id}, {"num_users", g.num_users}, {"mpcs", mpcs}};
}

Scenario parse_scenario(const json& j, const std::string& path)
{
    Reader r(j, path);
    Scenario s = default_scenario();
    if (r.has("array")) {
        Reader a(r.raw("array"), r.child("array"));
        s.geom.num_elements = static_cast<Index>(a.integer("num_elements", s.geom.num_elements));
        s.geom.element_spacing = a.number("element_spacing", s.geom.element_spacing);
        a.finish();
    } else {
        r.mark("array");
    }
    if (r.has("intended_group")) {
        s.intended = parse_group(r.raw("intended_group"), r.child("intended_group"));
    } else {
        r.mark("intended_group");
    }
    if (r.has("interferers")) {
        const json& arr = r.raw("interferers");
        if (!arr.is_array()) {
            throw ConfigError("config: key '" + r.child("interferers") + "' expected array");
        }
        s.interferers.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = r.child("interferers") + "[" + std::to_string(i) + "]";
            Reader ir(arr[i], p);
            Interferer in;
            in.gamma = ir.number("gamma", 1.0);
            if (!ir.has("group")) {
                throw ConfigError("config: key '" + p + ".group' is required");
            }
            in.group = parse_group(ir.raw("group"), p + ".group");
            ir.finish();
            s.interferers.push_back(in);
        }
    } else {
        r.mark("interferers");
    }
    s.training_length = static_cast<Index>(r.integer("training_length", s.training_length));
    s.snr_db = r.number("snr_db", s.snr_db);
    s.noise_power = r.number("noise_power", s.noise_power);
    s.inr_db = r.optional_number("inr_db", s.inr_db);
    s.energy_fraction = r.number("energy_fraction", s.energy_fraction);
    s.quad_points = static_cast<int>(r.integer("quad_points", s.quad_points));
    r.finish();
    return s;
}

json scenario_to_json(const Scenario& s)
{
    json inter = json::array();
    for (const Interferer& in : s.interferers) {
        inter.push_back({{"gamma", in.gamma}, {"group", group_to_json(in.group)}});
    }
    json j = {{"array",
               {{"num_elements", s.geom.num_elements}, {"element_spacing", s.geom.element_spacing}}},
              {"intended_group", group_to_json(s.intended)},
              {"interferers", inter},
              {"training_length", s.training_length},
              {"snr_db", s.snr_db},
              {"noise_power", s.noise_power},
              {"energy_fraction", s.energy_fraction},
              {"quad_points", s.quad_points}};
    j["inr_db"] = s.inr_db ? json(*s.inr_db) : json(nullptr);
    return j;
}

ErrorTarget parse_target(const std::string& s, const std::string& path)
{
    if (s == "full") return ErrorTarget::Full;
    if (s == "effective") return ErrorTarget::Effective;
    throw ConfigError("config: key '" + path + "' expected \"full\" or \"effective\"");
}

void check_names(const std::vector<std::string>& names, bool beams, const std::string& path)
{
    for (const auto& n : names) {
        if (beams ? !is_known_beam(n) : !is_known_estimator(n)) {
            throw ConfigError("config: key '" + path + "' has unknown value '" + n + "'");
        }
    }
}

SweepSpec parse_sweep(const json& j, const std::string& path)
{
    Reader r(j, path);
    SweepSpec s = default_dimension_sweep();
    const std::string axis = r.string("axis", to_string(s.axis));
    try {
        s.axis = parse_axis(axis);
    } catch (const ConfigError& e) {
        throw ConfigError("config: key '" + r.child("axis") + "': " + e.what());
    }
    if (r.has("grid") && r.raw("grid").is_string()) {
        try {
            s.grid = parse_grid(r.raw("grid").get<std::string>());
        } catch (const ConfigError& e) {
            throw ConfigError("config: key '" + r.child("grid") + "': " + e.what());
        }
    } else {
        s.grid = r.numbers("grid", default_grid(s.axis));
    }
    s.estimators = r.strings("estimators", s.estimators);
    check_names(s.estimators, false, r.child("estimators"));
    s.beams = r.strings("beams", s.beams);
    check_names(s.beams, true, r.child("beams"));
    s.dim = static_cast<Index>(r.integer("dim", s.dim));
    s.target = parse_target(r.string("target", to_string(s.target)), r.child("target"));
    if (j.contains("normalize_by") && !j.at("normalize_by").is_null()) {
        s.normalize_by = r.string("normalize_by", "");
    } else {
        r.mark("normalize_by");
    }
    const std::string syn = r.string("synthesis", "statistical");
    if (syn == "statistical") {
        s.synthesis = InterferenceSynthesis::Statistical;
    } else if (syn == "explicit") {
        s.synthesis = InterferenceSynthesis::Explicit;
    } else {
        throw ConfigError("config: key '" + r.child("synthesis") +
                          "' expected \"statistical\" or \"explicit\"");
    }
    r.finish();
    return s;
}

json sweep_to_json(const SweepSpec& s)
{
    json j = {{"axis", to_string(s.axis)},
              {"grid", s.grid},
              {"estimators", s.estimators},
              {"beams", s.beams},
              {"dim", s.dim},
              {"target", to_string(s.target)},
              {"synthesis",
               s.synthesis == InterferenceSynthesis::Statistical ? "statistical" : "explicit"}};
    j["normalize_by"] = s.normalize_by ? json(*s.normalize_by) : json(nullptr);
    return j;
}

} // namespace

void RunConfig::validate() const
{
    if (schema_version != kSchemaVersion) {
        throw ConfigError("config: unsupported schema_version " + std::to_string(schema_version));
    }
    try {
        scenario.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("config: scenario: ") + e.what());
    }
    sweep.validate();
    if (!is_known_beam(design.beam)) {
        throw ConfigError("config: key 'design.beam' has unknown value '" + design.beam + "'");
    }
    if (design.dim < 1 || design.dim > scenario.geom.num_elements) {
        throw ConfigError("config: key 'design.dim' must lie in [1, N]");
    }
    if (!(design.pattern_step_deg > 0.0)) {
        throw ConfigError("config: key 'design.pattern_step_deg' must be > 0");
    }
    check_names(estimate.estimators, false, "estimate.estimators");
    check_names(estimate.beams, true, "estimate.beams");
    if (estimate.dim < 1 || estimate.dim > scenario.geom.num_elements) {
        throw ConfigError("config: key 'estimate.dim' must lie in [1, N]");
    }
    if (threads < 0) {
        throw ConfigError("config: key 'threads' must be >= 0");
    }
    if (mc_trials != 0 && mc_trials < 2) {
        throw ConfigError("config: key 'mc_trials' must be 0 or >= 2");
    }
    if (output_dir.empty()) {
        throw ConfigError("config: key 'output_dir' must not be empty");
    }
}

RunConfig parse_config_text(const std::string& text, const std::string& base_dir)
{
    json j;
    const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
    if (blank) {
        j = json::object();
    } else {
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config: malformed JSON: ") + e.what());
        }
    }
    Reader r(j, "");
    RunConfig c;
    c.scenario = default_scenario();
    c.sweep = default_dimension_sweep();
    c.schema_version = static_cast<int>(r.integer("schema_version", kSchemaVersion));
    if (c.schema_version != kSchemaVersion) {
        throw ConfigError("config: unsupported schema_version " + std::to_string(c.schema_version));
    }
    c.command = parse_command(r.string("command", "sweep"));

    if (r.has("scenario") && r.has("scenario_file")) {
        throw ConfigError("config: give either 'scenario' or 'scenario_file', not both");
    }
    if (r.has("scenario")) {
        c.scenario = parse_scenario(r.raw("scenario"), "scenario");
    } else if (r.has("scenario_file")) {
        std::filesystem::path p = r.string("scenario_file", "");
        if (p.is_relative()) {
            p = std::filesystem::path(base_dir) / p;
        }
        std::ifstream f(p);
        if (!f) {
            throw ConfigError("config: scenario_file '" + p.string() + "' does not exist");
        }
        std::stringstream ss;
        ss << f.rdbuf();
        json sj;
        try {
            sj = json::parse(ss.str());
        } catch (const json::parse_error& e) {
            throw ConfigError("config: malformed scenario_file: " + std::string(e.what()));
        }
        c.scenario = parse_scenario(sj, "scenario_file");
    } else {
        r.mark("scenario");
        r.mark("scenario_file");
    }
    c.scenario.seed = r.unsigned_integer("seed", c.scenario.seed);

    if (r.has("sweep")) {
        c.sweep = parse_sweep(r.raw("sweep"), "sweep");
    } else {
        r.mark("sweep");
    }
    if (r.has("design")) {
        Reader d(r.raw("design"), "design");
        c.design.beam = d.string("beam", c.design.beam);
        c.design.dim = static_cast<Index>(d.integer("dim", c.design.dim));
        c.design.export_pattern = d.boolean("export_pattern", c.design.export_pattern);
        c.design.pattern_step_deg = d.number("pattern_step_deg", c.design.pattern_step_deg);
        d.finish();
    } else {
        r.mark("design");
    }
    if (r.has("estimate")) {
        Reader e(r.raw("estimate"), "estimate");
        c.estimate.estimators = e.strings("estimators", c.estimate.estimators);
        c.estimate.beams = e.strings("beams", c.estimate.beams);
        c.estimate.dim = static_cast<Index>(e.integer("dim", c.estimate.dim));
        c.estimate.target =
            parse_target(e.string("target", to_string(c.estimate.target)), "estimate.target");
        e.finish();
    } else {
        r.mark("estimate");
    }
    c.output_dir = r.string("output_dir", c.output_dir);
    c.threads = static_cast<int>(r.integer("threads", c.threads));
    c.mc_trials = static_cast<Index>(r.integer("mc_trials", c.mc_trials));
    r.finish();
    c.sweep.mc_trials = c.mc_trials;
    c.validate();
    return c;
}

RunConfig parse_config_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("config: cannot read '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_config_text(ss.str(), dir.empty() ? "." : dir);
}

std::string serialize_config(const RunConfig& c)
{
    json j;
    j["schema_version"] = c.schema_version;
    j["command"] = to_string(c.command);
    j["seed"] = c.scenario.seed;
    j["threads"] = c.threads;
    j["mc_trials"] = c.mc_trials;
    j["output_dir"] = c.output_dir;
    j["scenario"] = scenario_to_json(c.scenario);
    j["sweep"] = sweep_to_json(c.sweep);
    j["design"] = {{"beam", c.design.beam},
                   {"dim", c.design.dim},
                   {"export_pattern", c.design.export_pattern},
                   {"pattern_step_deg", c.design.pattern_step_deg}};
    j["estimate"] = {{"estimators", c.estimate.estimators},
                     {"beams", c.estimate.beams},
                     {"dim", c.estimate.dim},
                     {"target", to_string(c.estimate.target)}};
    return j.dump(2) + "\n";
}

std::vector<double> parse_grid(const std::string& text)
{
    auto to_num = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size() || !std::isfinite(v)) {
                throw ConfigError("");
            }
            return v;
        } catch (const std::exception&) {
            throw ConfigError("grid: cannot parse '" + s + "' as a number");
        }
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string p;
        while (std::getline(ss, p, ':')) {
            parts.push_back(p);
        }
        if (parts.size() < 2 || parts.size() > 3) {
            throw ConfigError("grid: range syntax is start:stop[:step]");
        }
        const double a = to_num(parts[0]);
        const double b = to_num(parts[1]);
        const double st = parts.size() == 3 ? to_num(parts[2]) : 1.0;
        if (!(st > 0.0) || b < a) {
            throw ConfigError("grid: need start <= stop and step > 0");
        }
        const auto n = static_cast<long long>(std::floor((b - a) / st + 1e-9));
        for (long long i = 0; i <= n; ++i) {
            out.push_back(a + static_cast<double>(i) * st);
        }
    } else {
        std::stringstream ss(text);
        std::string p;
        while (std::getline(ss, p, ',')) {
            out.push_back(to_num(p));
        }
    }
    if (out.empty()) {
        throw ConfigError("grid: no values given");
    }
    return out;
}

} // namespace rrce
