#ifndef HERALDED_UNITS_HPP
#define HERALDED_UNITS_HPP

#include "heralded/jsa.hpp"
#include "heralded/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

namespace heralded {

inline constexpr double speed_of_light = 299792458.0; // m/s

namespace detail {
inline void check_wavelength(double nm, const char* what) {
    if (!(nm > 1000.0 && nm < 2000.0))
        throw std::invalid_argument(std::string(what) + ": wavelength outside (1000, 2000) nm");
}
} // namespace detail

/// Angular-frequency width (rad/s) of a narrow wavelength band, 2 pi c dl / l^2.
inline double wavelength_band_to_angular_bandwidth(double center_nm, double width_nm) {
    detail::check_wavelength(center_nm, "wavelength_band_to_angular_bandwidth");
    if (!(width_nm >= 0.0) || !(width_nm < 0.01 * center_nm))
        throw std::invalid_argument(
            "wavelength_band_to_angular_bandwidth: width must be >= 0 and << center");
    const double center = center_nm * 1e-9;
    return two_pi * speed_of_light * (width_nm * 1e-9) / (center * center);
}

/// sigma of the amplitude exp(-w^2 / 2 sigma^2) whose intensity FWHM, measured in
/// wavelength, is fwhm_nm.
inline double pump_bandwidth_to_sigma(double fwhm_nm, double center_nm) {
    const double fwhm_w = wavelength_band_to_angular_bandwidth(center_nm, fwhm_nm);
    return fwhm_w / (2.0 * std::sqrt(std::log(2.0)));
}

/// Angular frequency (rad/s) of a vacuum wavelength.
inline double angular_frequency(double wavelength_nm) {
    return two_pi * speed_of_light / (wavelength_nm * 1e-9);
}

/// Fiber four-wave-mixing source with degenerate pumps.
struct PhysicalSource {
    double pump_wavelength_nm = 0.0;
    double pump_bandwidth_nm = 0.0;      // intensity FWHM, transform limited
    double signal_wavelength_nm = 0.0;   // filter centre
    double filter_bandwidth_nm = 0.0;    // full width of the rectangular passband
    double fiber_length_m = 0.0;
    double beta2 = 0.0;                  // s^2/m at the pump
    double beta3 = 0.0;                  // s^3/m at the pump
    double kappa = 0.0;
    bool include_group_delay_phase = false;

    void validate() const {
        detail::check_wavelength(pump_wavelength_nm, "PhysicalSource pump");
        detail::check_wavelength(signal_wavelength_nm, "PhysicalSource signal");
        if (!(pump_bandwidth_nm > 0.0) || !(filter_bandwidth_nm > 0.0) || !(fiber_length_m > 0.0))
            throw std::invalid_argument("PhysicalSource: lengths and bandwidths must be > 0");
        if (!std::isfinite(beta2) || !std::isfinite(beta3))
            throw std::invalid_argument("PhysicalSource: beta2 / beta3 must be finite");
        if (!(std::isfinite(kappa) && kappa >= 0.0))
            throw std::invalid_argument("PhysicalSource: kappa must be >= 0");
    }
};

/// Group-delay mismatch of signal and idler relative to the pump over the fiber.
/// beta1(w) is expanded to second order about the pump; the idler centre follows
/// from 2 w_p = w_s + w_i.
inline std::pair<double, double> fiber_mu_coefficients(const PhysicalSource& ps) {
    const double wp = angular_frequency(ps.pump_wavelength_nm);
    const double ds = angular_frequency(ps.signal_wavelength_nm) - wp;
    const double di = -ds;
    auto walkoff = [&](double dw) {
        return ps.fiber_length_m * (ps.beta2 * dw + 0.5 * ps.beta3 * dw * dw);
    };
    return {walkoff(ds), walkoff(di)};
}

/// SourceParams in SI (rad/s, s).
inline SourceParams to_source_params(const PhysicalSource& ps) {
    ps.validate();
    SourceParams p;
    p.sigma = pump_bandwidth_to_sigma(ps.pump_bandwidth_nm, ps.pump_wavelength_nm);
    std::tie(p.mu_s, p.mu_i) = fiber_mu_coefficients(ps);
    p.kappa = ps.kappa;
    p.include_group_delay_phase = ps.include_group_delay_phase;
    return p;
}

/// Filter full width B (rad/s) of a physical source.
inline double filter_bandwidth(const PhysicalSource& ps) {
    return wavelength_band_to_angular_bandwidth(ps.signal_wavelength_nm, ps.filter_bandwidth_nm);
}

} // namespace heralded

#endif
