#ifndef HERALDED_HERALD_HPP
#define HERALDED_HERALD_HPP

#include "heralded/jsa.hpp"
#include "heralded/numerics.hpp"
#include "heralded/povm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace heralded {

/// Idler amplitudes Phi_m(w_i) left after projecting the signal onto mode m.
/// Column m of `amplitudes` is sampled on grid_i.
struct CollapsedSet {
    FrequencyGrid grid_i;
    Eigen::MatrixXcd amplitudes;

    std::size_t count() const noexcept { return static_cast<std::size_t>(amplitudes.cols()); }

    /// integral |Phi_m|^2 d w_i
    double norm(std::size_t m) const {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < amplitudes.rows(); ++k)
            acc += grid_i.weights[k] * std::norm(amplitudes(k, static_cast<Eigen::Index>(m)));
        return acc;
    }
};

/// Phi_m(w_i) = integral over the band of phi_m(w_s) Phi(w_s, w_i) d w_s.
inline CollapsedSet collapsed_wavefunctions(const JsaField& band, const DetectionModeSet& modes) {
    if (!(band.grid_s == modes.grid_s))
        throw std::invalid_argument(
            "collapsed_wavefunctions: JSA signal grid differs from the detection-mode grid");
    const auto ns = static_cast<Eigen::Index>(modes.grid_s.size());
    Eigen::MatrixXd weighted = modes.modes;
    for (Eigen::Index k = 0; k < ns; ++k)
        weighted.row(k) *= modes.grid_s.weights[k];
    CollapsedSet out{band.grid_i, band.values.transpose() * weighted.cast<cplx>()};
    return out;
}

struct ClickProbability {
    double p_s = 0.0;
    double d_s = 0.0;
};

/// P_s and D_s = P_s / P_pair given the full-plane integral of |Phi|^2.
inline ClickProbability signal_click_probability(double full_norm, double p_pair,
                                                 const CollapsedSet& collapsed,
                                                 std::span<const double> weights) {
    if (!(full_norm > 0.0))
        throw NumericalError("signal_click_probability: zero JSA norm");
    if (weights.size() != collapsed.count())
        throw std::invalid_argument("signal_click_probability: weight count mismatch");
    double captured = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m)
        captured += weights[m] * collapsed.norm(m);
    ClickProbability out;
    out.d_s = captured / (two_pi * full_norm);
    out.p_s = p_pair * out.d_s;
    return out;
}

/// Same, with the full-plane norm taken by quadrature over `full`.
inline ClickProbability signal_click_probability(const JsaField& full, double p_pair,
                                                 const CollapsedSet& collapsed,
                                                 std::span<const double> weights) {
    return signal_click_probability(jsa_norm(full), p_pair, collapsed, weights);
}

/// Heralded idler state.
///
/// `rho` is the kernel R(w, w') with respect to the (1/2pi) d w measure, so
/// (1/2pi) integral R(w, w) d w = 1 and (1/2pi) integral R(w, w') e_n(w') d w' =
/// lambda_n e_n(w). Eigenmodes e_n are normalized as (1/2pi) integral |e_n|^2 = 1.
struct HeraldedState {
    FrequencyGrid grid_i;
    Eigen::MatrixXcd rho;
    std::vector<double> lambda;
    Eigen::MatrixXcd eigenmodes;

    /// Weighted, Hermitian matrix whose eigenvalues are lambda_n.
    Eigen::MatrixXcd symmetrized() const {
        const auto n = rho.rows();
        Eigen::MatrixXcd a(n, n);
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index l = 0; l < n; ++l)
                a(k, l) = rho(k, l) * std::sqrt(grid_i.weights[k] * grid_i.weights[l]) / two_pi;
        return a;
    }

    double trace() const {
        double t = 0.0;
        for (Eigen::Index k = 0; k < rho.rows(); ++k)
            t += grid_i.weights[k] * rho(k, k).real();
        return t / two_pi;
    }
};

inline HeraldedState idler_density_matrix(const CollapsedSet& collapsed,
                                          std::span<const double> weights) {
    if (weights.size() != collapsed.count())
        throw std::invalid_argument("idler_density_matrix: weight count mismatch");
    double total = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m)
        total += weights[m] * collapsed.norm(m);
    if (!(total > 0.0))
        throw NumericalError("idler_density_matrix: every collapsed wavefunction vanishes");

    const auto& g = collapsed.grid_i;
    const auto n = static_cast<Eigen::Index>(g.size());
    const auto mcount = static_cast<Eigen::Index>(weights.size());

    // Columns sqrt(eta_m) Phi_m, so rho = 2 pi W W^H / total.
    Eigen::MatrixXcd w(n, mcount);
    for (Eigen::Index m = 0; m < mcount; ++m)
        w.col(m) = collapsed.amplitudes.col(m) * std::sqrt(std::max(0.0, weights[m]));

    HeraldedState st;
    st.grid_i = g;
    st.rho = (w * w.adjoint()) * (two_pi / total);

    Eigen::VectorXd sw(n);
    for (Eigen::Index k = 0; k < n; ++k)
        sw(k) = std::sqrt(g.weights[k] / two_pi);
    Eigen::MatrixXcd a = sw.asDiagonal() * st.rho * sw.asDiagonal();
    a = (a + a.adjoint()).eval() * 0.5;

    auto eig = hermitian_eigen(a);
    double sum = 0.0;
    for (double v : eig.values)
        sum += v;
    st.lambda = eig.values;
    for (double& v : st.lambda)
        v /= sum;
    st.eigenmodes.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXcd e = eig.vectors.col(j).cwiseQuotient(sw.cast<cplx>());
        // Fix the global phase: largest-magnitude sample real and positive.
        Eigen::Index arg = 0;
        e.cwiseAbs().maxCoeff(&arg);
        if (std::abs(e(arg)) > 0.0)
            e *= std::conj(e(arg)) / std::abs(e(arg));
        st.eigenmodes.col(j) = e;
    }
    return st;
}

/// H = lambda_0.
inline double heralding_efficiency(const HeraldedState& state) {
    if (state.lambda.empty())
        throw std::invalid_argument("heralding_efficiency: empty state");
    return state.lambda.front();
}

/// Filtered signal marginal spectrum, integral |Phi|^2 d w_i, on the band grid.
inline std::vector<double> filtered_signal_power(const JsaField& band) {
    std::vector<double> a(band.grid_s.size());
    for (Eigen::Index s = 0; s < band.values.rows(); ++s) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < band.values.cols(); ++i)
            acc += band.grid_i.weights[i] * std::norm(band.values(s, i));
        a[s] = acc;
    }
    return a;
}

/// Pulse length from an RMS width: 4 sqrt(2) sigma_t, which maps a Gaussian pump
/// amplitude exp(-w^2 / 2 sigma^2) onto 4 / sigma.
inline double pulse_length(double rms_width) { return 4.0 * std::numbers::sqrt2 * rms_width; }

/// Candidates for the duration of one heralding cycle. The signal length belongs to
/// the transform-limited amplitude of the filtered marginal spectrum.
struct CycleTime {
    double window = 0.0;
    double pump = 0.0;
    double signal = 0.0;
    double idler = 0.0;

    double value() const { return std::max({window, pump, signal, idler}); }
};

inline CycleTime t_min(const DetectorParams& d, const SourceParams& p,
                       const FrequencyGrid& grid_s, std::span<const double> signal_power,
                       const FrequencyGrid& grid_i, std::span<const cplx> idler_mode0_amp) {
    CycleTime ct;
    ct.window = d.window;
    ct.pump = 4.0 / p.sigma;
    ct.signal = pulse_length(rms_time_width_from_power(grid_s, signal_power));
    ct.idler = pulse_length(rms_time_width(grid_i, idler_mode0_amp));
    return ct;
}

inline double absolute_rate(double d_s, double t_min) {
    if (!(t_min > 0.0))
        throw std::invalid_argument("absolute_rate: t_min must be > 0");
    return d_s / t_min;
}

inline double practical_rate(double r_abs, double p_pair, double external_efficiency) {
    if (!(r_abs >= 0.0) || !(p_pair >= 0.0 && p_pair <= 1.0) ||
        !(external_efficiency >= 0.0 && external_efficiency <= 1.0))
        throw std::invalid_argument("practical_rate: inputs out of range");
    return r_abs * p_pair * external_efficiency;
}

struct MetricsReport {
    double c = 0.0;
    double p_pair = 0.0;
    double p_s = 0.0;
    double d_s = 0.0;
    double h = 0.0;
    double t_min = 0.0;
    double r_abs = 0.0;
    std::optional<double> practical_rate;
};

} // namespace heralded

#endif
