#ifndef HERALDED_CONFIG_HPP
#define HERALDED_CONFIG_HPP

#include "heralded/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

namespace heralded {

// Config schema (flat `key = value`, '#' starts a comment; JSON objects use the
// same keys). Units per key:
//
//   name                   string
//   sigma                  pump bandwidth, rad / time unit          (direct)
//   mu_s, mu_i             phase-matching coefficients, time unit   (direct)
//   B                      filter full width, rad / time unit       (direct)
//   kappa                  pair amplitude, same unit system
//   pump_wavelength_nm     nm                                        (physical)
//   pump_bandwidth_nm      intensity FWHM, nm                        (physical)
//   signal_wavelength_nm   filter centre, nm                         (physical)
//   filter_bandwidth_nm    filter full width, nm                     (physical)
//   fiber_length_m         m                                         (physical)
//   beta2                  s^2 / m                                   (physical)
//   beta3                  s^3 / m                                   (physical)
//   T                      measurement window, time unit (s when physical)
//   eta                    detector quantum efficiency, (0, 1]
//   phase                  on | off, group-delay phase in the JSA
//   pair_probability       fixes P_pair and back-solves kappa
//   external_efficiency    signal collection efficiency for the practical rate
//   grid_signal, grid_idler, modes   grid overrides (counts)
//   sweep                  T (only parameter supported)
//   sweep_start, sweep_stop, sweep_count
//   format                 csv | json
//   out                    output path ("" for stdout)
//   dump                   prefix for mode / eigenmode dump files

namespace detail {

inline const std::set<std::string>& direct_keys() {
    static const std::set<std::string> k{"sigma", "mu_s", "mu_i", "B"};
    return k;
}
inline const std::set<std::string>& physical_keys() {
    static const std::set<std::string> k{"pump_wavelength_nm", "pump_bandwidth_nm",
                                         "signal_wavelength_nm", "filter_bandwidth_nm",
                                         "fiber_length_m", "beta2", "beta3"};
    return k;
}
inline const std::set<std::string>& other_keys() {
    static const std::set<std::string> k{
        "name",        "kappa",      "T",           "eta",         "phase",
        "pair_probability", "external_efficiency", "grid_signal", "grid_idler",
        "modes",       "sweep",      "sweep_start", "sweep_stop",  "sweep_count",
        "format",      "out",        "dump"};
    return k;
}

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return std::string(s.substr(a, b - a));
}

inline double to_number(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out))
        throw ConfigError("key '" + key + "': expected a finite number, got '" + v + "'");
    return out;
}

inline std::size_t to_count(const std::string& key, const std::string& v) {
    const double d = to_number(key, v);
    if (d < 0 || d != std::floor(d) || d > 1e9)
        throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
    return static_cast<std::size_t>(d);
}

inline bool to_switch(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1")
        return true;
    if (v == "off" || v == "false" || v == "0")
        return false;
    throw ConfigError("key '" + key + "': expected on|off, got '" + v + "'");
}

inline std::string number_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline OutputFormat parse_format(const std::string& v) {
    if (v == "csv")
        return OutputFormat::csv;
    if (v == "json")
        return OutputFormat::json;
    throw ConfigError("format must be csv or json, got '" + v + "'");
}

/// Build a scenario from string-valued keys.
inline Scenario scenario_from_map(const std::map<std::string, std::string>& kv) {
    using namespace detail;
    bool any_direct = false, any_physical = false;
    for (const auto& [k, v] : kv) {
        const bool d = direct_keys().count(k) > 0;
        const bool p = physical_keys().count(k) > 0;
        if (!d && !p && other_keys().count(k) == 0)
            throw ConfigError("unknown key '" + k + "'");
        any_direct |= d;
        any_physical |= p;
    }
    if (any_direct && any_physical)
        throw ConfigError("config mixes direct (sigma, mu_s, mu_i, B) and physical source keys");
    if (!any_direct && !any_physical)
        throw ConfigError("config defines no source (need sigma/mu_s/mu_i/B or physical keys)");

    auto get = [&](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto num = [&](const std::string& k, double fallback) {
        const auto* v = get(k);
        return v ? to_number(k, *v) : fallback;
    };
    auto required = [&](const std::string& k) {
        const auto* v = get(k);
        if (!v)
            throw ConfigError("missing required key '" + k + "'");
        return to_number(k, *v);
    };

    Scenario s;
    if (const auto* v = get("name"))
        s.name = *v;
    const bool phase = get("phase") ? to_switch("phase", *get("phase")) : false;
    const double kappa = num("kappa", 0.0);

    if (any_direct) {
        SourceParams p;
        p.sigma = required("sigma");
        p.mu_s = num("mu_s", 0.0);
        p.mu_i = num("mu_i", 0.0);
        p.kappa = kappa;
        p.include_group_delay_phase = phase;
        s.source = p;
        s.bandwidth = required("B");
    } else {
        PhysicalSource ps;
        ps.pump_wavelength_nm = required("pump_wavelength_nm");
        ps.pump_bandwidth_nm = required("pump_bandwidth_nm");
        ps.signal_wavelength_nm = required("signal_wavelength_nm");
        ps.filter_bandwidth_nm = required("filter_bandwidth_nm");
        ps.fiber_length_m = required("fiber_length_m");
        ps.beta2 = num("beta2", 0.0);
        ps.beta3 = num("beta3", 0.0);
        ps.kappa = kappa;
        ps.include_group_delay_phase = phase;
        s.source = ps;
    }
    s.window = required("T");
    s.eta = num("eta", 1.0);
    if (get("pair_probability"))
        s.pair_probability = required("pair_probability");
    if (get("external_efficiency"))
        s.external_efficiency = required("external_efficiency");
    if (const auto* v = get("grid_signal"))
        s.grids.signal_nodes = to_count("grid_signal", *v);
    if (const auto* v = get("grid_idler"))
        s.grids.idler_nodes = to_count("grid_idler", *v);
    if (const auto* v = get("modes"))
        s.grids.modes = to_count("modes", *v);

    const bool sweep_keys = get("sweep_start") || get("sweep_stop") || get("sweep_count");
    if (const auto* v = get("sweep")) {
        if (*v != "T")
            throw ConfigError("only sweeps over T are supported, got '" + *v + "'");
        Sweep sw;
        sw.start = required("sweep_start");
        sw.stop = required("sweep_stop");
        sw.count = get("sweep_count") ? to_count("sweep_count", *get("sweep_count")) : 0;
        if (!get("sweep_count"))
            throw ConfigError("missing required key 'sweep_count'");
        s.sweep = sw;
    } else if (sweep_keys) {
        throw ConfigError("sweep_start/stop/count given without 'sweep = T'");
    }
    if (const auto* v = get("format"))
        s.format = parse_format(*v);
    if (const auto* v = get("out"))
        s.out = *v;
    if (const auto* v = get("dump"))
        s.dump_prefix = *v;

    validate(s);
    return s;
}

inline Scenario parse_key_value(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty())
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = detail::trim(std::string_view(t).substr(0, eq));
        std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return scenario_from_map(kv);
}

inline Scenario parse_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("JSON config must be an object");
    std::map<std::string, std::string> kv;
    for (const auto& [k, v] : j.items()) {
        if (v.is_string())
            kv[k] = v.get<std::string>();
        else if (v.is_boolean())
            kv[k] = v.get<bool>() ? "on" : "off";
        else if (v.is_number())
            kv[k] = detail::number_text(v.get<double>());
        else
            throw ConfigError("key '" + k + "': unsupported JSON value type");
    }
    return scenario_from_map(kv);
}

/// JSON when the text starts with '{', key-value otherwise.
inline Scenario parse_config(std::string_view text) {
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch)))
            continue;
        return ch == '{' ? parse_json(text) : parse_key_value(text);
    }
    throw ConfigError("empty config");
}

inline Scenario load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

/// Key-value text that parse_key_value maps back to the same scenario.
inline std::string to_key_value(const Scenario& s) {
    using detail::number_text;
    std::ostringstream o;
    auto put = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
    auto putn = [&](const char* k, double v) { put(k, number_text(v)); };
    put("name", s.name);
    bool phase = false;
    if (const auto* p = std::get_if<SourceParams>(&s.source)) {
        putn("sigma", p->sigma);
        putn("mu_s", p->mu_s);
        putn("mu_i", p->mu_i);
        putn("kappa", p->kappa);
        putn("B", *s.bandwidth);
        phase = p->include_group_delay_phase;
    } else {
        const auto& ps = std::get<PhysicalSource>(s.source);
        putn("pump_wavelength_nm", ps.pump_wavelength_nm);
        putn("pump_bandwidth_nm", ps.pump_bandwidth_nm);
        putn("signal_wavelength_nm", ps.signal_wavelength_nm);
        putn("filter_bandwidth_nm", ps.filter_bandwidth_nm);
        putn("fiber_length_m", ps.fiber_length_m);
        putn("beta2", ps.beta2);
        putn("beta3", ps.beta3);
        putn("kappa", ps.kappa);
        phase = ps.include_group_delay_phase;
    }
    put("phase", phase ? "on" : "off");
    putn("T", s.window);
    putn("eta", s.eta);
    if (s.pair_probability)
        putn("pair_probability", *s.pair_probability);
    if (s.external_efficiency)
        putn("external_efficiency", *s.external_efficiency);
    if (s.grids.signal_nodes)
        put("grid_signal", std::to_string(*s.grids.signal_nodes));
    if (s.grids.idler_nodes)
        put("grid_idler", std::to_string(*s.grids.idler_nodes));
    if (s.grids.modes)
        put("modes", std::to_string(*s.grids.modes));
    if (s.sweep) {
        put("sweep", "T");
        putn("sweep_start", s.sweep->start);
        putn("sweep_stop", s.sweep->stop);
        put("sweep_count", std::to_string(s.sweep->count));
    }
    put("format", s.format == OutputFormat::csv ? "csv" : "json");
    if (!s.out.empty())
        put("out", s.out);
    if (!s.dump_prefix.empty())
        put("dump", s.dump_prefix);
    return o.str();
}

} // namespace heralded

#endif
