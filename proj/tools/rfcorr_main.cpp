#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "rfcorr/battery.hpp"
#include "rfcorr/grid.hpp"
#include "rfcorr/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTolerance = 3;
constexpr int kExitDegenerate = 4;

struct ModeOptions {
    CLI::App* cmd = nullptr;
    std::vector<CLI::Option*> tracked;
    std::vector<std::string> keys;

    CLI::Option* track(CLI::Option* o, const std::string& key) {
        tracked.push_back(o);
        keys.push_back(key);
        return o;
    }
    std::set<std::string> explicit_keys() const {
        std::set<std::string> out;
        for (size_t i = 0; i < tracked.size(); ++i)
            if (tracked[i]->count() > 0) out.insert(keys[i]);
        return out;
    }
};

void add_common(ModeOptions& mo, rfcorr::SweepConfig& cfg, std::string& grid_text) {
    auto* c = mo.cmd;
    mo.track(c->add_option("--v", cfg.v, "Rabi frequency"), "v");
    mo.track(c->add_option("--delta", cfg.delta, "laser-atom detuning"), "delta");
    mo.track(c->add_option("--gamma", cfg.gamma, "half decay rate (normalization unit)"), "gamma");
    mo.track(c->add_option("--gamma-f", cfg.gamma_f, "filter half-bandwidth(s)"), "gamma-f");
    mo.track(c->add_option("--grid", grid_text, "scan axis start:stop:count"), "grid");
    mo.track(c->add_option("--out", cfg.out, "output path, - for stdout"), "out");
    mo.track(c->add_option("--format", cfg.format, "csv or json"), "format");
    mo.track(c->add_option("--workers", cfg.workers, "worker threads, 0 = hardware"), "workers");
    mo.track(c->add_option("--tol", cfg.tol, "validation tolerance"), "tol");
    mo.track(c->add_option("--cap", cfg.order_cap, "n+m cap of the permutation sum"), "cap");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectrally filtered correlation functions of single-atom resonance fluorescence"};
    app.set_version_flag("--version", RFCORR_VERSION);
    app.require_subcommand(1);

    rfcorr::SweepConfig cfg;
    std::string config_path, grid_text;
    double tau_max = 0.0, delta1 = 0.0, delta2 = 0.0;
    app.add_option("--config", config_path, "key = value config file with [mode] sections")
        ->check(CLI::ExistingFile);

    std::map<std::string, ModeOptions> modes;
    for (const char* name : {"spectrum", "g2tau", "g2map", "dg2map", "validate"}) {
        ModeOptions mo;
        mo.cmd = app.add_subcommand(name, "");
        add_common(mo, cfg, grid_text);
        modes[name] = mo;
    }
    modes["spectrum"].cmd->description("physical spectrum S(Gamma, delta) over a delta grid");
    modes["g2tau"].cmd->description("normalized g2(tau) for line pairs or explicit detunings");
    {
        auto& mo = modes["g2tau"];
        mo.track(mo.cmd->add_option("--tau-max", tau_max, "scan tau in [0, tau-max]"), "tau-max");
        mo.track(mo.cmd->add_option("--tau-count", cfg.tau_count, "tau grid points"), "tau-count");
        mo.track(mo.cmd->add_option("--pair", cfg.pairs, "line pair(s): RR, RT, TF, ..."), "pair");
        mo.track(mo.cmd->add_option("--delta1", delta1, "first filter detuning"), "delta1");
        mo.track(mo.cmd->add_option("--delta2", delta2, "second filter detuning"), "delta2");
        mo.track(mo.cmd->add_flag("--secular-overlay,!--no-secular-overlay", cfg.secular_overlay,
                                  "include secular closed-form columns"),
                 "secular-overlay");
    }
    modes["g2map"].cmd->description("zero-delay normalized g2 over a (delta1, delta2) grid");
    modes["dg2map"].cmd->description("spectral correlation dG2 over a (delta1, delta2) grid");
    modes["validate"].cmd->description("run the oracle batteries and emit a JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        ModeOptions* active = nullptr;
        for (auto& [name, mo] : modes)
            if (mo.cmd->parsed()) {
                cfg.mode = rfcorr::parse_mode(name);
                active = &mo;
            }
        std::set<std::string> cli_keys = active->explicit_keys();

        // flags that funnel through local variables
        if (cli_keys.count("grid")) cfg.grid = rfcorr::GridSpec::parse(grid_text);
        if (cli_keys.count("tau-max")) cfg.tau_max = tau_max;
        if (cli_keys.count("delta1")) cfg.delta1 = delta1;
        if (cli_keys.count("delta2")) cfg.delta2 = delta2;

        if (!config_path.empty())
            rfcorr::apply_config(cfg, rfcorr::load_config_file(config_path), cli_keys);
        cfg.validate();

        if (cfg.mode == rfcorr::SweepMode::validate) {
            bool all_pass = false;
            std::string report = rfcorr::run_validate_report(cfg, all_pass);
            if (cfg.out.empty() || cfg.out == "-") {
                std::cout << report << "\n";
            } else {
                std::ofstream f(cfg.out);
                if (!f) throw rfcorr::ConfigError("cannot open output file: " + cfg.out);
                f << report << "\n";
            }
            return all_pass ? kExitOk : kExitTolerance;
        }

        rfcorr::CorrelationGrid grid = rfcorr::run_sweep(cfg);
        rfcorr::write_grid_file(grid, cfg.out, cfg.format);
        return kExitOk;
    } catch (const rfcorr::ToleranceNotMet& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTolerance;
    } catch (const rfcorr::DegeneratePoles& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const rfcorr::DegenerateExponent& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const rfcorr::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rfcorr::GridTooSmall& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
