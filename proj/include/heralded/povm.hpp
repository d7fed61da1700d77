#ifndef HERALDED_POVM_HPP
#define HERALDED_POVM_HPP

#include "heralded/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace heralded {

/// Rectangular filter of full width `bandwidth` followed by an on/off detector
/// gated for `window`.
struct DetectorParams {
    double bandwidth = 0.0;
    double window = 0.0;
    double eta = 1.0;

    /// Time-bandwidth parameter c = B T / 4.
    double c() const noexcept { return bandwidth * window / 4.0; }

    void validate() const {
        if (!(std::isfinite(bandwidth) && bandwidth > 0.0))
            throw std::invalid_argument("DetectorParams: bandwidth must be finite and > 0");
        if (!(std::isfinite(window) && window > 0.0))
            throw std::invalid_argument("DetectorParams: window must be finite and > 0");
        if (!(eta > 0.0 && eta <= 1.0))
            throw std::invalid_argument("DetectorParams: eta must be in (0, 1]");
    }
};

/// Detection modes of the band-limited, time-gated measurement.
///
/// `modes` column m holds phi_m on grid_s, normalized so that
/// (1/2pi) * integral phi_m^2 d omega = 1. `chi` holds the retained eigenvalues,
/// `chi_all` every eigenvalue the grid resolves (both descending).
struct DetectionModeSet {
    FrequencyGrid grid_s;
    Eigen::MatrixXd modes;
    std::vector<double> chi;
    std::vector<double> chi_all;
    double c = 0.0;

    std::size_t count() const noexcept { return chi.size(); }
};

/// Auto sizing for the signal band grid: the kernel's oscillation count grows
/// linearly in c.
inline std::size_t recommended_signal_nodes(double c) {
    const double want = 8.0 * c / std::numbers::pi + 128.0;
    const auto rounded = static_cast<std::size_t>(std::ceil(want / 32.0)) * 32;
    return std::max<std::size_t>(256, rounded);
}

/// Retain every mode up to the eigenvalue plunge near 2c/pi plus a tail margin.
inline std::size_t recommended_mode_count(double c, std::size_t n_grid) {
    const auto plunge = static_cast<std::size_t>(std::ceil(2.0 * c / std::numbers::pi));
    return std::min(std::max<std::size_t>(12, plunge + 24), n_grid / 4);
}

/// Eigenpairs of the time-limiting kernel sin(T(w-w')/2) / (pi (w-w')) restricted
/// to [-B/2, B/2], discretized on n_grid Gauss-Legendre nodes.
inline DetectionModeSet detection_modes(const DetectorParams& d, std::size_t n_grid,
                                        std::size_t n_modes) {
    d.validate();
    if (n_modes < 1)
        throw std::invalid_argument("detection_modes: need at least one mode");
    if (n_modes > n_grid)
        throw std::invalid_argument("detection_modes: more modes than grid nodes");
    if (n_grid < 4 * n_modes)
        throw std::invalid_argument("detection_modes: n_grid must be >= 4 * modes");

    const double half = 0.5 * d.bandwidth;
    const double t = d.window;
    FrequencyGrid grid = build_grid(-half, half, n_grid);
    const auto n = static_cast<Eigen::Index>(n_grid);

    Eigen::VectorXd sw(n);
    for (Eigen::Index k = 0; k < n; ++k)
        sw(k) = std::sqrt(grid.weights[k]);

    // D^1/2 K D^1/2, filled symmetrically.
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        a(k, k) = grid.weights[k] * t / two_pi;
        for (Eigen::Index l = k + 1; l < n; ++l) {
            const double dw = grid.nodes[k] - grid.nodes[l];
            const double kern = std::sin(0.5 * t * dw) / (std::numbers::pi * dw);
            a(k, l) = a(l, k) = sw(k) * kern * sw(l);
        }
    }

    auto eig = hermitian_eigen(a);

    DetectionModeSet out;
    out.grid_s = std::move(grid);
    out.c = d.c();
    out.chi_all = eig.values;
    out.chi.assign(eig.values.begin(), eig.values.begin() + static_cast<std::ptrdiff_t>(n_modes));
    out.modes.resize(n, static_cast<Eigen::Index>(n_modes));

    const double root_two_pi = std::sqrt(two_pi);
    for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(n_modes); ++m) {
        Eigen::VectorXd phi = eig.vectors.col(m).cwiseQuotient(sw) * root_two_pi;
        // Sign: phi_0 positive at the band centre, higher modes positive at the
        // first node where they are visibly nonzero.
        double ref = 0.0;
        if (m == 0) {
            ref = phi(n / 2) + phi((n - 1) / 2);
        } else {
            const double tiny = 1e-8 * phi.cwiseAbs().maxCoeff();
            for (Eigen::Index k = 0; k < n; ++k)
                if (std::abs(phi(k)) > tiny) {
                    ref = phi(k);
                    break;
                }
        }
        if (ref < 0.0)
            phi = -phi;
        out.modes.col(m) = phi;
    }
    return out;
}

/// eta_m = eta * chi_m.
inline std::vector<double> povm_weights(const DetectionModeSet& modes, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("povm_weights: eta must be in (0, 1]");
    std::vector<double> w(modes.chi.size());
    std::transform(modes.chi.begin(), modes.chi.end(), w.begin(),
                   [eta](double c) { return eta * c; });
    return w;
}

inline std::vector<double> fundamental_mode_profile(const DetectionModeSet& modes) {
    const auto& col = modes.modes.col(0);
    return {col.data(), col.data() + col.size()};
}

/// max/min of |profile| over the central `fraction` of the band.
inline double flatness_ratio(const FrequencyGrid& grid, std::span<const double> profile,
                             double fraction = 0.8) {
    const double mid = 0.5 * (grid.lo + grid.hi);
    const double reach = 0.5 * fraction * grid.width();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (std::abs(grid.nodes[k] - mid) > reach)
            continue;
        const double v = std::abs(profile[k]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo > 0.0))
        return std::numeric_limits<double>::infinity();
    return hi / lo;
}

} // namespace heralded

#endif
