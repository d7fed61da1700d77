#ifndef HERALDED_SCENARIO_HPP
#define HERALDED_SCENARIO_HPP

#include "heralded/herald.hpp"
#include "heralded/jsa.hpp"
#include "heralded/numerics.hpp"
#include "heralded/povm.hpp"
#include "heralded/units.hpp"

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

namespace heralded {

/// Invalid or inconsistent scenario description.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Failure inside the pipeline, tagged with the stage that raised it.
class StageError : public std::runtime_error {
  public:
    StageError(std::string stage, std::string detail)
        : std::runtime_error(stage + ": " + detail), stage_(std::move(stage)),
          detail_(std::move(detail)) {}
    const std::string& stage() const noexcept { return stage_; }
    const std::string& detail() const noexcept { return detail_; }

  private:
    std::string stage_;
    std::string detail_;
};

enum class OutputFormat { csv, json };

struct GridOverrides {
    std::optional<std::size_t> signal_nodes;
    std::optional<std::size_t> idler_nodes;
    std::optional<std::size_t> modes;

    friend bool operator==(const GridOverrides&, const GridOverrides&) = default;
};

/// Sweep of the measurement window over [start, stop], count points.
struct Sweep {
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;

    std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t k = 0; k < count; ++k)
            v[k] = count == 1 ? start
                              : start + (stop - start) * static_cast<double>(k) /
                                            static_cast<double>(count - 1);
        return v;
    }
};

/// One heralding configuration. Direct sources use any consistent unit system;
/// physical sources are converted to SI (rad/s, s), and `window` is then in seconds.
struct Scenario {
    std::string name = "scenario";
    std::variant<SourceParams, PhysicalSource> source;
    std::optional<double> bandwidth; // direct sources only
    double window = 0.0;
    double eta = 1.0;
    std::optional<double> pair_probability;
    std::optional<double> external_efficiency;
    GridOverrides grids;
    std::optional<Sweep> sweep;
    OutputFormat format = OutputFormat::csv;
    std::string out;
    std::string dump_prefix;

    bool is_physical() const noexcept { return std::holds_alternative<PhysicalSource>(source); }
};

struct ResolvedScenario {
    SourceParams source;
    DetectorParams detector;
};

inline void validate(const Scenario& s) {
    if (s.name.empty())
        throw ConfigError("scenario name must not be empty");
    try {
        if (s.is_physical()) {
            if (s.bandwidth)
                throw ConfigError("physical sources derive B from filter_bandwidth_nm; do not set B");
            std::get<PhysicalSource>(s.source).validate();
        } else {
            if (!s.bandwidth)
                throw ConfigError("direct sources require B");
            std::get<SourceParams>(s.source).validate();
        }
        DetectorParams d{s.bandwidth.value_or(1.0), s.window, s.eta};
        d.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (s.pair_probability && !(*s.pair_probability >= 0.0 && *s.pair_probability < 1.0))
        throw ConfigError("pair_probability must be in [0, 1)");
    if (s.external_efficiency && !(*s.external_efficiency >= 0.0 && *s.external_efficiency <= 1.0))
        throw ConfigError("external_efficiency must be in [0, 1]");
    if (s.sweep) {
        const auto& sw = *s.sweep;
        if (sw.count == 0)
            throw ConfigError("sweep_count must be >= 1");
        if (!(sw.start > 0.0) || !(sw.stop >= sw.start))
            throw ConfigError("sweep bounds must be positive and ordered");
    }
    const auto& g = s.grids;
    if (g.signal_nodes && *g.signal_nodes < 4)
        throw ConfigError("grid_signal must be >= 4");
    if (g.idler_nodes && *g.idler_nodes < 2)
        throw ConfigError("grid_idler must be >= 2");
    if (g.modes && *g.modes < 1)
        throw ConfigError("modes must be >= 1");
}

inline ResolvedScenario resolve(const Scenario& s, double window) {
    ResolvedScenario r;
    if (s.is_physical()) {
        const auto& ps = std::get<PhysicalSource>(s.source);
        r.source = to_source_params(ps);
        r.detector.bandwidth = filter_bandwidth(ps);
    } else {
        r.source = std::get<SourceParams>(s.source);
        r.detector.bandwidth = *s.bandwidth;
    }
    r.detector.window = window;
    r.detector.eta = s.eta;
    return r;
}

inline ResolvedScenario resolve(const Scenario& s) { return resolve(s, s.window); }

/// Grid sizes actually used for one evaluation.
struct GridSettings {
    std::size_t signal_nodes = 0;
    std::size_t idler_nodes = 0;
    std::size_t modes = 0;
};

inline constexpr std::size_t default_idler_nodes = 384;

inline GridSettings choose_grids(const GridOverrides& o, double c) {
    GridSettings g;
    g.signal_nodes = o.signal_nodes.value_or(recommended_signal_nodes(c));
    g.modes = o.modes.value_or(recommended_mode_count(c, g.signal_nodes));
    g.idler_nodes = o.idler_nodes.value_or(default_idler_nodes);
    return g;
}

struct EvaluationOptions {
    GridOverrides grids;
    std::optional<double> pair_probability;
    std::optional<double> external_efficiency;
};

/// Result of one pipeline run. `metrics`, `cycle`, `source` and `detector` are in
/// the caller's units; `modes` and `state` are in sigma = 1 units (multiply
/// frequencies by `unit_scale` to convert back).
struct ScenarioResult {
    std::string name;
    SourceParams source;
    DetectorParams detector;
    GridSettings grids;
    MetricsReport metrics;
    CycleTime cycle;
    DetectionModeSet modes;
    HeraldedState state;
    double unit_scale = 1.0;
};

/// Full pipeline: grids, JSA, detection modes, collapse, idler state, metrics.
/// Internally everything is rescaled to sigma = 1, which makes dimensionless
/// outputs independent of the caller's unit system.
inline ScenarioResult evaluate(const SourceParams& src, const DetectorParams& det,
                               const EvaluationOptions& opt = {}) {
    auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    };

    stage("input", [&] {
        src.validate();
        det.validate();
        return 0;
    });

    const double sigma = src.sigma;
    SourceParams pn = src;
    pn.sigma = 1.0;
    pn.mu_s = src.mu_s * sigma;
    pn.mu_i = src.mu_i * sigma;
    pn.kappa = src.kappa * sigma;
    DetectorParams dn{det.bandwidth / sigma, det.window * sigma, det.eta};

    ScenarioResult r;
    r.source = src;
    r.detector = det;
    r.unit_scale = sigma;
    r.metrics.c = dn.c();
    r.grids = choose_grids(opt.grids, dn.c());

    r.modes = stage("povm", [&] {
        return detection_modes(dn, r.grids.signal_nodes, r.grids.modes);
    });

    const double full_norm = stage("jsa", [&] { return jsa_norm_closed_form(pn); });
    const JsaField band = stage("jsa", [&] {
        const double half_i = std::max(default_half_width(1.0, pn.mu_i), 0.5 * dn.bandwidth + 6.0);
        const FrequencyGrid grid_i = build_grid(-half_i, half_i, r.grids.idler_nodes);
        return sample_jsa(pn, r.modes.grid_s, grid_i);
    });

    stage("jsa", [&] {
        if (opt.pair_probability) {
            r.metrics.p_pair = *opt.pair_probability;
            r.source.kappa = kappa_for_pair_probability(r.metrics.p_pair, full_norm) / sigma;
        } else {
            r.metrics.p_pair = pair_probability(pn.kappa, full_norm);
        }
        return 0;
    });

    const CollapsedSet collapsed = stage("herald", [&] {
        return collapsed_wavefunctions(band, r.modes);
    });
    const auto weights = povm_weights(r.modes, dn.eta);
    stage("herald", [&] {
        const auto click = signal_click_probability(full_norm, r.metrics.p_pair, collapsed, weights);
        r.metrics.d_s = click.d_s;
        r.metrics.p_s = click.p_s;
        r.state = idler_density_matrix(collapsed, weights);
        r.metrics.h = heralding_efficiency(r.state);
        return 0;
    });

    stage("metrics", [&] {
        const auto signal_power = filtered_signal_power(band);
        const Eigen::VectorXcd mode0 = r.state.eigenmodes.col(0);
        const CycleTime ct = t_min(dn, pn, band.grid_s, signal_power, r.state.grid_i,
                                   std::span<const cplx>(mode0.data(), mode0.size()));
        r.cycle = {ct.window / sigma, ct.pump / sigma, ct.signal / sigma, ct.idler / sigma};
        r.metrics.t_min = r.cycle.value();
        r.metrics.r_abs = absolute_rate(r.metrics.d_s, r.metrics.t_min);
        if (opt.external_efficiency)
            r.metrics.practical_rate =
                practical_rate(r.metrics.r_abs, r.metrics.p_pair, *opt.external_efficiency);
        return 0;
    });
    return r;
}

inline EvaluationOptions evaluation_options(const Scenario& s) {
    return {s.grids, s.pair_probability, s.external_efficiency};
}

inline ScenarioResult run_scenario(const Scenario& s) {
    validate(s);
    const auto rs = resolve(s);
    auto r = evaluate(rs.source, rs.detector, evaluation_options(s));
    r.name = s.name;
    return r;
}

/// Evaluates every window of the sweep independently, in parallel; rows come back
/// in ascending window order regardless of scheduling.
inline std::vector<ScenarioResult> run_sweep(const Scenario& s, unsigned threads = 0) {
    validate(s);
    if (!s.sweep)
        throw ConfigError("scenario has no sweep");
    const auto windows = s.sweep->values();
    if (windows.empty())
        throw ConfigError("empty sweep");

    std::vector<std::optional<ScenarioResult>> rows(windows.size());
    std::vector<std::exception_ptr> errors(windows.size());
    const auto opt = evaluation_options(s);
    auto work = [&](std::size_t k) {
        try {
            const auto rs = resolve(s, windows[k]);
            rows[k] = evaluate(rs.source, rs.detector, opt);
            rows[k]->name = s.name;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(windows.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t k = t; k < windows.size(); k += threads)
                work(k);
        });
    for (auto& th : pool)
        th.join();

    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<ScenarioResult> out;
    out.reserve(rows.size());
    for (auto& r : rows)
        out.push_back(std::move(*r));
    return out;
}

} // namespace heralded

#endif
