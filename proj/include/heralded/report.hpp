#ifndef HERALDED_REPORT_HPP
#define HERALDED_REPORT_HPP

#include "heralded/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <string>

namespace heralded {

inline const char* csv_header() {
    return "name,sigma,mu_s,mu_i,B,T,c,P_pair,P_s,D_s,H,T_min,R_abs,practical_rate";
}

namespace detail {

inline std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + '"';
}

} // namespace detail

inline std::string csv_row(const ScenarioResult& r) {
    using detail::fmt9;
    const auto& m = r.metrics;
    std::string row = detail::csv_field(r.name);
    for (double v : {r.source.sigma, r.source.mu_s, r.source.mu_i, r.detector.bandwidth,
                     r.detector.window, m.c, m.p_pair, m.p_s, m.d_s, m.h, m.t_min, m.r_abs})
        row += ',' + fmt9(v);
    row += ',';
    if (m.practical_rate)
        row += fmt9(*m.practical_rate);
    return row;
}

inline void write_csv(std::ostream& out, std::span<const ScenarioResult> rows) {
    out << csv_header() << '\n';
    for (const auto& r : rows)
        out << csv_row(r) << '\n';
}

inline nlohmann::ordered_json to_json(const ScenarioResult& r) {
    const auto& m = r.metrics;
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["sigma"] = r.source.sigma;
    j["mu_s"] = r.source.mu_s;
    j["mu_i"] = r.source.mu_i;
    j["B"] = r.detector.bandwidth;
    j["T"] = r.detector.window;
    j["c"] = m.c;
    j["P_pair"] = m.p_pair;
    j["P_s"] = m.p_s;
    j["D_s"] = m.d_s;
    j["H"] = m.h;
    j["T_min"] = m.t_min;
    j["R_abs"] = m.r_abs;
    j["practical_rate"] = m.practical_rate ? nlohmann::ordered_json(*m.practical_rate)
                                           : nlohmann::ordered_json(nullptr);
    return j;
}

inline void write_json(std::ostream& out, std::span<const ScenarioResult> rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        arr.push_back(to_json(r));
    out << arr.dump(2) << '\n';
}

inline void write_report(std::ostream& out, std::span<const ScenarioResult> rows, OutputFormat f) {
    if (f == OutputFormat::csv)
        write_csv(out, rows);
    else
        write_json(out, rows);
}

/// Plot data in the caller's units:
///   <prefix>_modes.csv       omega, phi_0 .. phi_{k-1}
///   <prefix>_idler.csv       omega_i, re_0, im_0, .. for the leading k eigenmodes
///   <prefix>_spectrum.csv    index, chi, lambda
/// Mode functions keep the (1/2pi) integral |f|^2 d omega = 1 normalization.
inline void write_mode_dump(const std::string& prefix, const ScenarioResult& r, std::size_t k = 3) {
    const double s = r.unit_scale;
    const double amp = 1.0 / std::sqrt(s);
    auto open = [](const std::string& path) {
        std::ofstream f(path);
        if (!f)
            throw ConfigError("cannot write '" + path + "'");
        return f;
    };
    using detail::fmt9;

    const auto km = std::min<std::size_t>(k, r.modes.count());
    {
        auto f = open(prefix + "_modes.csv");
        f << "omega";
        for (std::size_t m = 0; m < km; ++m)
            f << ",phi_" << m;
        f << '\n';
        for (std::size_t j = 0; j < r.modes.grid_s.size(); ++j) {
            f << fmt9(r.modes.grid_s.nodes[j] * s);
            for (std::size_t m = 0; m < km; ++m)
                f << ',' << fmt9(r.modes.modes(j, m) * amp);
            f << '\n';
        }
    }
    const auto kn = std::min<std::size_t>(k, r.state.lambda.size());
    {
        auto f = open(prefix + "_idler.csv");
        f << "omega_i";
        for (std::size_t n = 0; n < kn; ++n)
            f << ",re_" << n << ",im_" << n;
        f << '\n';
        for (std::size_t j = 0; j < r.state.grid_i.size(); ++j) {
            f << fmt9(r.state.grid_i.nodes[j] * s);
            for (std::size_t n = 0; n < kn; ++n) {
                const cplx v = r.state.eigenmodes(j, n) * amp;
                f << ',' << fmt9(v.real()) << ',' << fmt9(v.imag());
            }
            f << '\n';
        }
    }
    {
        auto f = open(prefix + "_spectrum.csv");
        f << "index,chi,lambda\n";
        const std::size_t rows = std::max(r.modes.count(), kn);
        for (std::size_t j = 0; j < rows; ++j) {
            f << j << ',' << (j < r.modes.count() ? fmt9(r.modes.chi[j]) : "") << ','
              << (j < r.state.lambda.size() ? fmt9(r.state.lambda[j]) : "") << '\n';
        }
    }
}

} // namespace heralded

#endif
