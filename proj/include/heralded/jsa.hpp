#ifndef HERALDED_JSA_HPP
#define HERALDED_JSA_HPP

#include "heralded/numerics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace heralded {

/// Pump and phase-matching parameters of the pair source.
///
/// Frequencies are detunings from perfect phase matching; sigma in rad per time
/// unit, mu_s / mu_i in time units. kappa is expressed in the same unit system
/// (kappa^2 times a frequency-squared integral is dimensionless).
struct SourceParams {
    double sigma = 1.0;
    double mu_s = 0.0;
    double mu_i = 0.0;
    double kappa = 0.0;
    bool include_group_delay_phase = false;

    void validate() const {
        if (!(std::isfinite(sigma) && sigma > 0.0))
            throw std::invalid_argument("SourceParams: sigma must be finite and > 0");
        if (!std::isfinite(mu_s) || !std::isfinite(mu_i))
            throw std::invalid_argument("SourceParams: mu_s and mu_i must be finite");
        if (!(std::isfinite(kappa) && kappa >= 0.0))
            throw std::invalid_argument("SourceParams: kappa must be finite and >= 0");
    }
};

/// Gaussian pump envelope times the sinc phase-matching function, optionally with
/// the group-delay phase exp(i (mu_s w_s + mu_i w_i) / 2).
inline cplx jsa_amplitude(const SourceParams& p, double w_s, double w_i) {
    const double sum = w_s + w_i;
    const double arg = 0.5 * (p.mu_s * w_s + p.mu_i * w_i);
    const double mag = std::exp(-sum * sum / (2.0 * p.sigma * p.sigma)) * sinc(arg);
    if (!p.include_group_delay_phase)
        return {mag, 0.0};
    return std::polar(1.0, arg) * mag;
}

/// Joint amplitude sampled on a signal x idler node lattice; rows index signal
/// nodes, columns idler nodes.
struct JsaField {
    FrequencyGrid grid_s;
    FrequencyGrid grid_i;
    Eigen::MatrixXcd values;
};

inline JsaField sample_jsa(const SourceParams& p, const FrequencyGrid& grid_s,
                           const FrequencyGrid& grid_i) {
    p.validate();
    if (grid_s.size() < 2 || grid_i.size() < 2)
        throw std::invalid_argument("sample_jsa: grids must have at least 2 nodes");
    JsaField f{grid_s, grid_i, Eigen::MatrixXcd(grid_s.size(), grid_i.size())};
    for (Eigen::Index s = 0; s < f.values.rows(); ++s)
        for (Eigen::Index i = 0; i < f.values.cols(); ++i)
            f.values(s, i) = jsa_amplitude(p, grid_s.nodes[s], grid_i.nodes[i]);
    return f;
}

/// values(s, i) = f_s(w_s) g_i(w_i). Test constructor for the factorable limit.
template <class F, class G>
JsaField separable_jsa(F&& f_s, G&& g_i, const FrequencyGrid& grid_s,
                       const FrequencyGrid& grid_i) {
    JsaField f{grid_s, grid_i, Eigen::MatrixXcd(grid_s.size(), grid_i.size())};
    for (Eigen::Index s = 0; s < f.values.rows(); ++s) {
        const cplx a = f_s(grid_s.nodes[s]);
        for (Eigen::Index i = 0; i < f.values.cols(); ++i)
            f.values(s, i) = a * cplx(g_i(grid_i.nodes[i]));
    }
    return f;
}

/// Double quadrature of |Phi|^2 over the sampled grids.
inline double jsa_norm(const JsaField& field) {
    double acc = 0.0;
    for (Eigen::Index s = 0; s < field.values.rows(); ++s) {
        double row = 0.0;
        for (Eigen::Index i = 0; i < field.values.cols(); ++i)
            row += field.grid_i.weights[i] * std::norm(field.values(s, i));
        acc += field.grid_s.weights[s] * row;
    }
    if (!(acc > 0.0))
        throw NumericalError("jsa_norm: field is identically zero");
    return acc;
}

/// Full-plane integral of |Phi|^2 for the Gaussian x sinc model. Substituting
/// u = w_s + w_i leaves a Gaussian in u and a sinc^2 integral of 2 pi / |mu_s - mu_i|
/// in the remaining direction. Diverges when mu_s == mu_i.
inline double jsa_norm_closed_form(const SourceParams& p) {
    p.validate();
    const double dmu = std::abs(p.mu_s - p.mu_i);
    if (!(dmu > 0.0))
        throw NumericalError("jsa_norm_closed_form: pair norm diverges for mu_s == mu_i");
    return std::sqrt(std::numbers::pi) * p.sigma * two_pi / dmu;
}

/// Single-pair probability per pump pulse, [1 + 1 / (4 pi^2 kappa^2 norm)]^-1.
inline double pair_probability(double kappa, double norm) {
    if (!(norm > 0.0))
        throw std::invalid_argument("pair_probability: norm must be > 0");
    if (!(kappa >= 0.0))
        throw std::invalid_argument("pair_probability: kappa must be >= 0");
    const double x = two_pi * two_pi * kappa * kappa * norm;
    return x / (1.0 + x);
}

/// Inverse of pair_probability in kappa.
inline double kappa_for_pair_probability(double p_pair, double norm) {
    if (!(norm > 0.0))
        throw std::invalid_argument("kappa_for_pair_probability: norm must be > 0");
    if (!(p_pair >= 0.0 && p_pair < 1.0))
        throw std::invalid_argument("kappa_for_pair_probability: need 0 <= p < 1");
    return std::sqrt(p_pair / (1.0 - p_pair) / norm) / two_pi;
}

/// Half-width of the default integration box for one photon: the pump envelope plus
/// several sinc lobes, with the sinc part capped at 40 sigma.
inline double default_half_width(double sigma, double mu) {
    const double eps = 0.01 / sigma;
    return std::min(6.0 * sigma + two_pi / std::max(std::abs(mu), eps), 40.0 * sigma);
}

} // namespace heralded

#endif
