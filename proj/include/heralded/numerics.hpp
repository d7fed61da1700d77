#ifndef HERALDED_NUMERICS_HPP
#define HERALDED_NUMERICS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace heralded {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Failure of a numerical stage (zero field, divergent integral, ...).
/// Precondition violations on inputs throw std::invalid_argument instead.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Positive-weight Gauss-Legendre rule on [lo, hi].
struct FrequencyGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lo = 0.0;
    double hi = 0.0;

    std::size_t size() const noexcept { return nodes.size(); }
    double width() const noexcept { return hi - lo; }

    /// Quadrature of samples taken at the nodes.
    template <class T>
    T integrate(std::span<const T> samples) const {
        if (samples.size() != nodes.size())
            throw std::invalid_argument("FrequencyGrid::integrate: sample count mismatch");
        T acc{};
        for (std::size_t k = 0; k < nodes.size(); ++k)
            acc += weights[k] * samples[k];
        return acc;
    }

    template <class F>
    auto integrate_fn(F&& f) const -> decltype(f(0.0)) {
        decltype(f(0.0)) acc{};
        for (std::size_t k = 0; k < nodes.size(); ++k)
            acc += weights[k] * f(nodes[k]);
        return acc;
    }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;
};

namespace detail {

// Legendre P_n and P_n' at x by the three-term recurrence.
inline void legendre_eval(std::size_t n, double x, double& p, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
}

} // namespace detail

inline FrequencyGrid build_grid(double lo, double hi, std::size_t n) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("build_grid: non-finite interval endpoint");
    if (!(lo < hi))
        throw std::invalid_argument("build_grid: require lo < hi");
    if (n < 2)
        throw std::invalid_argument("build_grid: require at least 2 nodes");

    std::vector<double> x(n), w(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            detail::legendre_eval(n, z, p, dp);
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        detail::legendre_eval(n, z, p, dp);
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if (n % 2 == 1)
        x[n / 2] = 0.0;

    FrequencyGrid g;
    g.lo = lo;
    g.hi = hi;
    g.nodes.resize(n);
    g.weights.resize(n);
    const double mid = 0.5 * (hi + lo);
    const double half_width = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < n; ++k) {
        g.nodes[k] = mid + half_width * x[k];
        g.weights[k] = half_width * w[k];
    }
    return g;
}

/// Unnormalized sinc, sin(x)/x with sinc(0) = 1.
inline double sinc(double x) noexcept {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

/// d f / d omega of the polynomial interpolant through the grid samples
/// (barycentric differentiation matrix). Spectrally accurate on Gauss-Legendre
/// grids for smooth f.
inline std::vector<cplx> grid_derivative(const FrequencyGrid& grid, std::span<const cplx> f) {
    const std::size_t n = grid.size();
    if (f.size() != n)
        throw std::invalid_argument("grid_derivative: sample count mismatch");
    const auto& x = grid.nodes;
    // Barycentric weights 1 / prod(x_k - x_j), kept as log-magnitude and sign.
    std::vector<double> log_l(n, 0.0);
    std::vector<int> sign_l(n, 1);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k)
                continue;
            const double dx = x[k] - x[j];
            if (dx == 0.0)
                throw std::invalid_argument("grid_derivative: repeated nodes");
            log_l[k] -= std::log(std::abs(dx));
            if (dx < 0.0)
                sign_l[k] = -sign_l[k];
        }
    std::vector<cplx> d(n, cplx(0.0));
    for (std::size_t j = 0; j < n; ++j) {
        cplx acc = 0.0;
        double diag = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j)
                continue;
            const double djk =
                sign_l[k] * sign_l[j] * std::exp(log_l[k] - log_l[j]) / (x[j] - x[k]);
            acc += djk * f[k];
            diag -= djk;
        }
        d[j] = acc + diag * f[j];
    }
    return d;
}

/// Temporal moments of a pulse known by its spectral amplitude.
struct TimeMoments {
    double norm = 0.0;        // integral |f|^2 d omega
    double first = 0.0;       // integral Im(conj(f) f') d omega
    double second = 0.0;      // integral |f'|^2 d omega
};

inline TimeMoments time_moments(const FrequencyGrid& grid, std::span<const cplx> amplitude) {
    const auto d = grid_derivative(grid, amplitude);
    TimeMoments m;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid.weights[k];
        m.norm += w * std::norm(amplitude[k]);
        m.first += w * std::imag(std::conj(amplitude[k]) * d[k]);
        m.second += w * std::norm(d[k]);
    }
    return m;
}

/// RMS width of a set of moments accumulated over one or more amplitudes.
inline double rms_time_width(const TimeMoments& m) {
    if (!(m.norm > 0.0))
        throw NumericalError("rms_time_width: amplitude is identically zero");
    const double mean = m.first / m.norm;
    return std::sqrt(std::max(0.0, m.second / m.norm - mean * mean));
}

/// RMS width sigma_t of |f(t)|^2 for the pulse whose spectral amplitude is sampled
/// on the grid. Moments are taken in the frequency domain, so no FFT is involved.
inline double rms_time_width(const FrequencyGrid& grid, std::span<const cplx> amplitude) {
    return rms_time_width(time_moments(grid, amplitude));
}

inline double rms_time_width(const FrequencyGrid& grid, std::span<const double> amplitude) {
    std::vector<cplx> c(amplitude.begin(), amplitude.end());
    return rms_time_width(grid, std::span<const cplx>(c));
}

/// RMS width of the transform-limited pulse sqrt(P(w)) for a non-negative power
/// spectrum P. Uses |a'|^2 = P'^2 / (4P) so the derivative is taken on the smooth P
/// rather than on sqrt(P), which has kinks at zeros of the underlying amplitude.
inline double rms_time_width_from_power(const FrequencyGrid& grid, std::span<const double> power) {
    if (power.size() != grid.size())
        throw std::invalid_argument("rms_time_width_from_power: sample count mismatch");
    std::vector<cplx> p(power.begin(), power.end());
    const auto d = grid_derivative(grid, p);
    const double peak = *std::max_element(power.begin(), power.end());
    TimeMoments m;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid.weights[k];
        if (power[k] < 0.0)
            throw std::invalid_argument("rms_time_width_from_power: negative power sample");
        m.norm += w * power[k];
        if (power[k] > 1e-300 + 1e-14 * peak)
            m.second += w * d[k].real() * d[k].real() / (4.0 * power[k]);
    }
    return rms_time_width(m);
}

template <class Scalar>
struct EigenDecomposition {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    std::vector<double> values; // descending
    Matrix vectors;             // columns, same order as values
};

/// Decompose a Hermitian (real symmetric) matrix. The input is symmetrized first;
/// it must already be Hermitian to 1e-10 relative to max(1, max|a_ij|).
template <class Derived>
auto hermitian_eigen(const Eigen::MatrixBase<Derived>& a_in)
    -> EigenDecomposition<typename Derived::Scalar> {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (a_in.rows() != a_in.cols())
        throw std::invalid_argument("hermitian_eigen: matrix is not square");
    const Matrix a = a_in;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (!(asym <= 1e-10 * scale))
        throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian (max |A - A^H| = " +
                                    std::to_string(asym) + ")");
    const Matrix sym = (a + a.adjoint()) * 0.5;

    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian_eigen: eigensolver did not converge");

    const auto n = static_cast<std::size_t>(sym.rows());
    const auto& ev = solver.eigenvalues();
    // Solver output is ascending; reverse it first so ties keep a deterministic
    // order under the stable sort.
    std::vector<std::size_t> order(n);
    std::iota(order.rbegin(), order.rend(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return ev(static_cast<Eigen::Index>(i)) > ev(static_cast<Eigen::Index>(j));
    });

    EigenDecomposition<Scalar> out;
    out.values.resize(n);
    out.vectors.resize(sym.rows(), sym.cols());
    for (std::size_t k = 0; k < n; ++k) {
        const auto src = static_cast<Eigen::Index>(order[k]);
        out.values[k] = ev(src);
        out.vectors.col(static_cast<Eigen::Index>(k)) = solver.eigenvectors().col(src);
    }
    return out;
}

} // namespace heralded

#endif
