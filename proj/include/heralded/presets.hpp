#ifndef HERALDED_PRESETS_HPP
#define HERALDED_PRESETS_HPP

#include "heralded/scenario.hpp"

#include <numbers>
#include <string>
#include <vector>

namespace heralded {

inline std::vector<std::string> preset_names() {
    return {"fig1", "fig1-long", "fig3", "fig4", "fig5-180ps", "fig5-9ps", "fig5-broadpump"};
}

namespace detail {

inline Scenario natural_preset(std::string name, double mu_s, double mu_i, double b, double t) {
    Scenario s;
    s.name = std::move(name);
    SourceParams p;
    p.sigma = 1.0;
    p.mu_s = mu_s;
    p.mu_i = mu_i;
    s.source = p;
    s.bandwidth = b;
    s.window = t;
    return s;
}

// 500 m of standard fiber pumped at 1305.0 nm, signal filtered at 1306.5 nm.
// The dispersion is an assumption: beta2 = -18 ps^2/km with beta3 = 0 gives
// symmetric walk-off mu_s = -mu_i of about 0.3 / sigma.
inline Scenario fiber_preset(std::string name, double window_s, double pump_bw_nm, double p_pair) {
    Scenario s;
    s.name = std::move(name);
    PhysicalSource ps;
    ps.pump_wavelength_nm = 1305.0;
    ps.pump_bandwidth_nm = pump_bw_nm;
    ps.signal_wavelength_nm = 1306.5;
    ps.filter_bandwidth_nm = 0.14;
    ps.fiber_length_m = 500.0;
    ps.beta2 = -1.8e-26;
    ps.beta3 = 0.0;
    s.source = ps;
    s.window = window_s;
    s.pair_probability = p_pair;
    s.external_efficiency = 0.05;
    return s;
}

} // namespace detail

/// Built-in scenarios. Natural-unit presets use sigma = 1.
inline Scenario preset_scenario(const std::string& name) {
    constexpr double pi = std::numbers::pi;
    if (name == "fig1")
        return detail::natural_preset(name, 20.0, 0.0, 4.0 * pi, 40.0);
    if (name == "fig1-long")
        return detail::natural_preset(name, 40.0, 0.0, 4.0 * pi, 80.0);
    if (name == "fig3")
        return detail::natural_preset(name, 2.0, -1.0, 2.0 * pi, 0.5);
    if (name == "fig4") {
        auto s = detail::natural_preset(name, 2.0, -1.0, 2.0 * pi, 0.5);
        s.sweep = Sweep{0.1, 4.0, 40};
        return s;
    }
    if (name == "fig5-180ps")
        return detail::fiber_preset(name, 180e-12, 0.03, 0.14);
    if (name == "fig5-9ps")
        return detail::fiber_preset(name, 9e-12, 0.03, 0.14);
    if (name == "fig5-broadpump")
        return detail::fiber_preset(name, 9e-12, 0.12, 0.015);
    throw ConfigError("unknown preset '" + name + "'");
}

} // namespace heralded

#endif
