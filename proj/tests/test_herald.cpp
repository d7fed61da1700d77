#include "heralded/heralded.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace heralded;

namespace {

constexpr double pi = std::numbers::pi;

SourceParams source(double mu_s, double mu_i) {
    SourceParams p;
    p.mu_s = mu_s;
    p.mu_i = mu_i;
    return p;
}

ScenarioResult run(double mu_s, double mu_i, double b, double t) {
    return evaluate(source(mu_s, mu_i), DetectorParams{b, t, 1.0});
}

struct Band {
    DetectionModeSet modes;
    JsaField field;
};

Band band_of(const SourceParams& p, const DetectorParams& d, std::size_t ns, std::size_t m,
             std::size_t ni = 256) {
    auto modes = detection_modes(d, ns, m);
    const double half_i = std::max(default_half_width(p.sigma, p.mu_i), 0.5 * d.bandwidth + 6.0);
    auto field = sample_jsa(p, modes.grid_s, build_grid(-half_i, half_i, ni));
    return {std::move(modes), std::move(field)};
}

void expect_hygienic(const HeraldedState& st) {
    const auto n = st.rho.rows();
    double herm = 0.0;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            herm = std::max(herm, std::abs(st.rho(a, b) - std::conj(st.rho(b, a))));
    EXPECT_LT(herm, 1e-10);
    EXPECT_NEAR(st.trace(), 1.0, 1e-8);
    const auto eig = hermitian_eigen(st.symmetrized());
    EXPECT_GE(eig.values.back(), -1e-9);
    double sum = 0.0;
    for (double v : st.lambda) {
        EXPECT_GE(v, -1e-9);
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-8);
    for (Eigen::Index j = 0; j < 4; ++j)
        for (Eigen::Index k = 0; k <= j; ++k) {
            cplx ip = 0.0;
            for (Eigen::Index q = 0; q < n; ++q)
                ip += st.grid_i.weights[q] * std::conj(st.eigenmodes(q, k)) * st.eigenmodes(q, j);
            EXPECT_NEAR(std::abs(ip / two_pi - (j == k ? 1.0 : 0.0)), 0.0, 1e-8);
        }
}

} // namespace

TEST(CollapsedWavefunctions, SeparableFieldCollapsesOntoIdlerFactor) {
    const auto modes = detection_modes(DetectorParams{2.0 * pi, 2.0, 1.0}, 128, 6);
    const auto gi = build_grid(-5.0, 5.0, 96);
    auto f = [](double w) { return cplx(std::exp(-0.3 * w * w), 0.2 * w); };
    auto g = [](double w) { return std::exp(-0.5 * (w - 0.7) * (w - 0.7)); };
    const auto coll = collapsed_wavefunctions(separable_jsa(f, g, modes.grid_s, gi), modes);
    ASSERT_EQ(coll.count(), 6u);
    for (std::size_t m = 0; m < 6; ++m) {
        cplx proj = 0.0;
        for (std::size_t k = 0; k < modes.grid_s.size(); ++k)
            proj += modes.grid_s.weights[k] * modes.modes(k, m) * f(modes.grid_s.nodes[k]);
        for (std::size_t i = 0; i < gi.size(); ++i)
            EXPECT_NEAR(std::abs(coll.amplitudes(i, m) - proj * g(gi.nodes[i])), 0.0, 1e-12);
    }
}

TEST(CollapsedWavefunctions, FlatSignalDependenceKeepsEvenModesOnly) {
    const auto modes = detection_modes(DetectorParams{2.0 * pi, 3.0, 1.0}, 128, 6);
    const auto gi = build_grid(-4.0, 4.0, 64);
    auto g = [](double w) { return std::exp(-w * w); };
    const auto coll = collapsed_wavefunctions(
        separable_jsa([](double) { return cplx(1.0); }, g, modes.grid_s, gi), modes);
    EXPECT_GT(coll.norm(0), 1.0);
    EXPECT_GT(coll.norm(2), 1e-6);
    EXPECT_LT(coll.norm(1), 1e-20);
    EXPECT_LT(coll.norm(3), 1e-20);
    EXPECT_LT(coll.norm(5), 1e-20);
}

TEST(CollapsedWavefunctions, GridMismatchThrows) {
    const auto modes = detection_modes(DetectorParams{2.0 * pi, 1.0, 1.0}, 64, 4);
    const auto other = build_grid(-pi, pi, 48);
    const auto gi = build_grid(-4.0, 4.0, 32);
    EXPECT_THROW(collapsed_wavefunctions(sample_jsa(source(2, -1), other, gi), modes),
                 std::invalid_argument);
}

TEST(CollapsedWavefunctions, FundamentalModeDominatesForCorrelatedSource) {
    const DetectorParams d{2.0 * pi, 0.5, 1.0};
    const auto b = band_of(source(2.0, -1.0), d, 256, 12);
    const auto coll = collapsed_wavefunctions(b.field, b.modes);
    const auto w = povm_weights(b.modes, 1.0);
    double total = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m)
        total += w[m] * coll.norm(m);
    EXPECT_GT(w[0] * coll.norm(0) / total, 0.99);
}

TEST(SignalClickProbability, PublishedDetectionEfficiencies) {
    EXPECT_NEAR(run(20.0, 0.0, 4.0 * pi, 40.0).metrics.d_s, 0.997, 0.01);
    EXPECT_NEAR(run(40.0, 0.0, 4.0 * pi, 80.0).metrics.d_s, 0.998, 0.01);
    EXPECT_NEAR(run(2.0, -1.0, 2.0 * pi, 0.5).metrics.d_s, 0.206, 0.01);
}

TEST(SignalClickProbability, WideBandLongWindowDetectsEverything) {
    EXPECT_NEAR(run(20.0, 0.0, 8.0 * pi, 40.0).metrics.d_s, 1.0, 0.01);
}

TEST(SignalClickProbability, SeparableClosedForm) {
    // Phi = f(w_s) g(w_i): D_s = sum_m eta_m |<phi_m, f>|^2 / (2 pi ||f||^2), with the
    // overlaps taken from Nystrom-interpolated modes and Simpson quadrature.
    const DetectorParams d{2.0 * pi, 1.2, 0.8};
    const auto modes = detection_modes(d, 128, 8);
    const auto gi = build_grid(-6.0, 6.0, 128);
    auto f = [](double w) { return std::exp(-w * w / 8.0); };
    auto g = [](double w) { return std::exp(-w * w / 2.0); };
    const auto field = separable_jsa([&](double w) { return cplx(f(w)); }, g, modes.grid_s, gi);
    const double f_norm = std::sqrt(4.0 * pi);  // integral over the real line of f^2
    const double g_norm = oracle::adaptive_simpson([&](double w) { return g(w) * g(w); }, -6, 6);

    double expected = 0.0;
    for (std::size_t m = 0; m < 8; ++m) {
        const double ov = oracle::simpson(
            [&](double w) { return oracle::nystrom_mode(modes, d.window, m, w) * f(w); }, -pi, pi, 400);
        expected += d.eta * modes.chi[m] * ov * ov;
    }
    expected /= two_pi * f_norm;

    const auto click = signal_click_probability(f_norm * g_norm, 0.1,
                                                collapsed_wavefunctions(field, modes),
                                                povm_weights(modes, d.eta));
    EXPECT_NEAR(click.d_s, expected, 1e-9);
    EXPECT_NEAR(click.p_s, 0.1 * click.d_s, 1e-15);
}

TEST(SignalClickProbability, Errors) {
    const auto b = band_of(source(2.0, -1.0), DetectorParams{2.0 * pi, 0.5, 1.0}, 64, 4, 64);
    const auto coll = collapsed_wavefunctions(b.field, b.modes);
    const auto w = povm_weights(b.modes, 1.0);
    EXPECT_THROW(signal_click_probability(0.0, 0.1, coll, w), NumericalError);
    const std::vector<double> short_w{1.0};
    EXPECT_THROW(signal_click_probability(1.0, 0.1, coll, short_w), std::invalid_argument);
}

TEST(IdlerDensityMatrix, SingleRetainedModeIsPure) {
    for (auto [mu_s, mu_i] : {std::pair{2.0, -1.0}, {20.0, 0.0}, {0.5, -3.0}}) {
        const auto b = band_of(source(mu_s, mu_i), DetectorParams{4.0 * pi, 3.0, 1.0}, 256, 1);
        const auto st = idler_density_matrix(collapsed_wavefunctions(b.field, b.modes),
                                             povm_weights(b.modes, 1.0));
        EXPECT_NEAR(st.lambda[0], 1.0, 1e-10);
    }
}

TEST(IdlerDensityMatrix, RandomSeparableFieldsArePure) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto modes = detection_modes(DetectorParams{2.0 * pi, 6.0, 0.7}, 96, 12);
    const auto gi = build_grid(-6.0, 6.0, 96);
    for (int trial = 0; trial < 50; ++trial) {
        const double a1 = u(rng), a2 = u(rng), s1 = 0.5 + std::abs(u(rng)), ph = 3 * u(rng);
        const double b1 = u(rng), b2 = 0.3 + std::abs(u(rng)), ph2 = 3 * u(rng);
        auto f = [&](double w) {
            return std::exp(-(w - a1) * (w - a1) / (s1 * s1)) * std::polar(1.0, ph * w) +
                   a2 * std::exp(-w * w);
        };
        auto g = [&](double w) {
            return std::exp(-(w - b1) * (w - b1) / b2) * std::polar(1.0, ph2 * w * w);
        };
        JsaField field{modes.grid_s, gi, Eigen::MatrixXcd(modes.grid_s.size(), gi.size())};
        for (std::size_t s = 0; s < modes.grid_s.size(); ++s)
            for (std::size_t i = 0; i < gi.size(); ++i)
                field.values(s, i) = f(modes.grid_s.nodes[s]) * g(gi.nodes[i]);
        const auto st = idler_density_matrix(collapsed_wavefunctions(field, modes),
                                             povm_weights(modes, 0.7));
        EXPECT_NEAR(heralding_efficiency(st), 1.0, 1e-6) << "trial " << trial;
    }
}

TEST(IdlerDensityMatrix, Hygiene) {
    for (auto [mu_s, mu_i, bw, t] : {std::tuple{2.0, -1.0, 2.0 * pi, 0.5},
                                     {2.0, -1.0, 2.0 * pi, 3.0}, {20.0, 0.0, 4.0 * pi, 40.0}}) {
        const auto r = run(mu_s, mu_i, bw, t);
        expect_hygienic(r.state);
    }
}

TEST(IdlerDensityMatrix, AllZeroCollapsedSetThrows) {
    const auto modes = detection_modes(DetectorParams{2.0 * pi, 1.0, 1.0}, 32, 4);
    const auto gi = build_grid(-1.0, 1.0, 16);
    const auto field = separable_jsa([](double) { return cplx(0.0); }, [](double) { return 1.0; },
                                     modes.grid_s, gi);
    EXPECT_THROW(idler_density_matrix(collapsed_wavefunctions(field, modes), povm_weights(modes, 1.0)),
                 NumericalError);
}

TEST(HeraldingEfficiency, PublishedValues) {
    EXPECT_NEAR(run(20.0, 0.0, 4.0 * pi, 40.0).metrics.h, 0.965, 0.01);
    EXPECT_NEAR(run(2.0, -1.0, 2.0 * pi, 0.5).metrics.h, 0.996, 0.005);
    EXPECT_NEAR(run(40.0, 0.0, 4.0 * pi, 80.0).metrics.h, 0.983, 0.01);
}

TEST(HeraldingEfficiency, BoundedByLargestSingleModeWeight) {
    const DetectorParams d{2.0 * pi, 3.0, 1.0};
    const auto b = band_of(source(2.0, -1.0), d, 256, 12);
    const auto coll = collapsed_wavefunctions(b.field, b.modes);
    const auto w = povm_weights(b.modes, 1.0);
    double total = 0.0, largest = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) {
        total += w[m] * coll.norm(m);
        largest = std::max(largest, w[m] * coll.norm(m));
    }
    const double h = heralding_efficiency(idler_density_matrix(coll, w));
    EXPECT_GE(h, largest / total - 1e-12);
    EXPECT_LT(h, 1.0);
}

TEST(HeraldingEfficiency, InvariantUnderModeSignFlips) {
    const DetectorParams d{2.0 * pi, 2.0, 0.9};
    const auto b = band_of(source(2.0, -1.0), d, 128, 8);
    auto flipped = b.modes;
    flipped.modes.col(0) *= -1.0;
    flipped.modes.col(3) *= -1.0;
    flipped.modes.col(4) *= -1.0;
    const auto w = povm_weights(b.modes, d.eta);
    const double norm = jsa_norm_closed_form(source(2.0, -1.0));
    const auto ca = collapsed_wavefunctions(b.field, b.modes);
    const auto cb = collapsed_wavefunctions(b.field, flipped);
    const auto sa = idler_density_matrix(ca, w);
    const auto sb = idler_density_matrix(cb, w);
    EXPECT_NEAR(heralding_efficiency(sa), heralding_efficiency(sb), 1e-10);
    const auto pa = signal_click_probability(norm, 0.2, ca, w);
    const auto pb = signal_click_probability(norm, 0.2, cb, w);
    EXPECT_NEAR(pa.p_s, pb.p_s, 1e-10);
    EXPECT_NEAR(pa.d_s, pb.d_s, 1e-10);
}

TEST(HeraldingEfficiency, EmptyStateThrows) {
    EXPECT_THROW(heralding_efficiency(HeraldedState{}), std::invalid_argument);
}

TEST(PulseLength, GaussianPumpMapsToFourOverSigma) {
    for (double sigma : {0.5, 1.0, 3.0}) {
        const auto g = build_grid(-12.0 * sigma, 12.0 * sigma, 128);
        std::vector<double> amp(g.size());
        for (std::size_t k = 0; k < g.size(); ++k)
            amp[k] = std::exp(-g.nodes[k] * g.nodes[k] / (2.0 * sigma * sigma));
        EXPECT_NEAR(pulse_length(rms_time_width(g, amp)), 4.0 / sigma, 1e-6 / sigma);
    }
}

TEST(TMin, LongWalkoffIsWindowLimited) {
    const auto r = run(20.0, 0.0, 4.0 * pi, 40.0);
    EXPECT_DOUBLE_EQ(r.metrics.t_min, 40.0);
    EXPECT_NEAR(r.cycle.signal, 4.0 * std::numbers::sqrt2 * 20.0 / std::sqrt(12.0), 0.05 * 32.66);
    EXPECT_LT(r.cycle.signal, 40.0);
    EXPECT_LT(r.cycle.idler, 40.0);
}

TEST(TMin, ShortWindowIsPumpLimited) {
    const auto r = run(2.0, -1.0, 2.0 * pi, 0.5);
    EXPECT_NEAR(r.metrics.t_min, 4.0, 1e-9);
    EXPECT_DOUBLE_EQ(r.cycle.pump, 4.0);
}

TEST(TMin, ShortEverythingFallsBackToPump) {
    const auto r = evaluate(source(0.3, -0.2), DetectorParams{2.0 * pi, 0.2, 1.0});
    EXPECT_DOUBLE_EQ(r.metrics.t_min, 4.0);
    EXPECT_LT(r.cycle.signal, 4.0);
    EXPECT_LT(r.cycle.idler, 4.0);

    SourceParams p = source(0.6, -0.4);
    p.sigma = 2.0;
    const auto r2 = evaluate(p, DetectorParams{4.0 * pi, 0.1, 1.0});
    EXPECT_NEAR(r2.metrics.t_min, 2.0, 1e-12);
}

TEST(TMin, CandidateMaximum) {
    CycleTime ct{1.0, 4.0, 7.5, 2.0};
    EXPECT_DOUBLE_EQ(ct.value(), 7.5);
}

TEST(Rates, AbsoluteRate) {
    EXPECT_DOUBLE_EQ(absolute_rate(0.5, 4.0), 0.125);
    EXPECT_THROW(absolute_rate(0.5, 0.0), std::invalid_argument);
    EXPECT_THROW(absolute_rate(0.5, -1.0), std::invalid_argument);
    const auto r = run(20.0, 0.0, 4.0 * pi, 40.0);
    EXPECT_DOUBLE_EQ(r.metrics.r_abs, r.metrics.d_s / r.metrics.t_min);
}

TEST(Rates, PracticalRate) {
    EXPECT_NEAR(practical_rate(4.644e9, 0.14, 0.05) / 32.5e6, 1.0, 0.01);
    EXPECT_NEAR(practical_rate(0.430e9, 0.14, 0.05) / 3.0e6, 1.0, 0.02);
    EXPECT_NEAR(practical_rate(4.644e9, 0.015, 0.05) / 3.5e6, 1.0, 0.02);
    EXPECT_THROW(practical_rate(-1.0, 0.1, 0.1), std::invalid_argument);
    EXPECT_THROW(practical_rate(1.0, 1.1, 0.1), std::invalid_argument);
    EXPECT_THROW(practical_rate(1.0, 0.1, -0.1), std::invalid_argument);
}

TEST(Metrics, ReportInvariants) {
    for (const auto& r : {run(2.0, -1.0, 2.0 * pi, 0.5), run(2.0, -1.0, 2.0 * pi, 3.0)}) {
        const auto& m = r.metrics;
        for (double v : {m.p_pair, m.p_s, m.d_s, m.h}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        EXPECT_DOUBLE_EQ(m.r_abs, m.d_s / m.t_min);
    }
}
