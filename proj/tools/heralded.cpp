// heralded: evaluate heralded single-photon source scenarios.
//
//   heralded run <config>            single scenario
//   heralded sweep <config>          sweep over T (config needs sweep keys)
//   heralded preset <name>           built-in scenario (fig4 is a sweep)
//
// Exit status: 0 success, 1 config error, 2 numerical failure.

#include "heralded/heralded.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Overrides {
    std::string out;
    std::string format;
    std::string phase;
    std::string dump;
    std::size_t grid_signal = 0;
    std::size_t grid_idler = 0;
    std::size_t modes = 0;
};

void apply(const Overrides& o, heralded::Scenario& s) {
    if (!o.out.empty())
        s.out = o.out;
    if (!o.format.empty())
        s.format = heralded::parse_format(o.format);
    if (!o.dump.empty())
        s.dump_prefix = o.dump;
    if (o.grid_signal)
        s.grids.signal_nodes = o.grid_signal;
    if (o.grid_idler)
        s.grids.idler_nodes = o.grid_idler;
    if (o.modes)
        s.grids.modes = o.modes;
    if (!o.phase.empty()) {
        const bool on = o.phase == "on";
        std::visit([on](auto& src) { src.include_group_delay_phase = on; }, s.source);
    }
    heralded::validate(s);
}

void emit(const heralded::Scenario& s, const std::vector<heralded::ScenarioResult>& rows) {
    if (s.out.empty() || s.out == "-") {
        heralded::write_report(std::cout, rows, s.format);
    } else {
        std::ofstream f(s.out);
        if (!f)
            throw heralded::ConfigError("cannot open output '" + s.out + "'");
        heralded::write_report(f, rows, s.format);
    }
    if (!s.dump_prefix.empty())
        for (std::size_t k = 0; k < rows.size(); ++k)
            heralded::write_mode_dump(
                rows.size() == 1 ? s.dump_prefix : s.dump_prefix + "_" + std::to_string(k), rows[k]);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heralded single-photon source simulator"};
    app.require_subcommand(1);

    Overrides ov;
    auto add_common = [&ov](CLI::App* sub) {
        sub->add_option("--out", ov.out, "Output path (default stdout)");
        sub->add_option("--format", ov.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--grid-signal", ov.grid_signal, "Signal band nodes")->check(CLI::PositiveNumber);
        sub->add_option("--grid-idler", ov.grid_idler, "Idler nodes")->check(CLI::PositiveNumber);
        sub->add_option("--modes", ov.modes, "Retained detection modes")->check(CLI::PositiveNumber);
        sub->add_option("--phase", ov.phase, "Group-delay phase in the JSA")
            ->check(CLI::IsMember({"on", "off"}));
        sub->add_option("--dump", ov.dump, "Prefix for mode dump files");
    };

    std::string config_path;
    std::string preset;
    auto* run = app.add_subcommand("run", "Evaluate one scenario from a config file");
    run->add_option("config", config_path, "Config file (key = value or JSON)")->required();
    add_common(run);
    auto* sweep = app.add_subcommand("sweep", "Sweep the measurement window T");
    sweep->add_option("config", config_path, "Config file with sweep keys")->required();
    add_common(sweep);
    auto* pre = app.add_subcommand("preset", "Evaluate a built-in scenario");
    pre->add_option("name", preset, "Preset name")->required()->check(
        CLI::IsMember(heralded::preset_names()));
    add_common(pre);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        heralded::Scenario s = pre->parsed() ? heralded::preset_scenario(preset)
                                             : heralded::load_config(config_path);
        apply(ov, s);
        std::vector<heralded::ScenarioResult> rows;
        const bool as_sweep = sweep->parsed() || (pre->parsed() && s.sweep);
        if (as_sweep) {
            if (!s.sweep)
                throw heralded::ConfigError("config has no sweep (set sweep = T and its bounds)");
            rows = heralded::run_sweep(s);
        } else {
            rows.push_back(heralded::run_scenario(s));
        }
        emit(s, rows);
    } catch (const heralded::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const heralded::StageError& e) {
        std::cerr << "numerical failure in stage '" << e.stage() << "': " << e.detail() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
