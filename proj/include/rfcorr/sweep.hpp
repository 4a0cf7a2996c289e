#pragma once

#include <functional>
#include <optional>
#include <set>

#include "rfcorr/grid.hpp"
#include "rfcorr/types.hpp"

namespace rfcorr {

/// "start:stop:count" linear axis.
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    static GridSpec parse(const std::string& text);
    std::vector<double> linspace() const;
    void require_scan_axis() const {
        if (count < 2) throw GridTooSmall();
    }
};

enum class SweepMode { spectrum, g2tau, g2map, dg2map, validate };

SweepMode parse_mode(const std::string& name);
std::string mode_name(SweepMode m);

/// One CLI/config-file run. Inputs may be dimensionful; everything is
/// normalized to units of gamma before evaluation and axes are emitted in
/// those units.
struct SweepConfig {
    SweepMode mode = SweepMode::spectrum;

    double v = 10.0;
    double delta = 0.0;   // laser-atom detuning
    double gamma = 1.0;   // half decay rate; the normalization unit

    std::vector<double> gamma_f = {0.1};  // filter half-bandwidths (spectrum takes a list)
    GridSpec grid{-15.0, 15.0, 601};      // delta axis (spectrum/maps) or tau axis override
    std::optional<double> tau_max;        // g2tau: tau in [0, tau_max], tau_count points
    int tau_count = 301;
    std::vector<std::string> pairs;       // g2tau line pairs (RR, RT, TF, ...)
    std::optional<double> delta1, delta2; // g2tau explicit detunings instead of pairs
    bool secular_overlay = true;

    std::string out = "-";
    std::string format = "csv";
    int workers = 0;  // 0 -> hardware concurrency
    double tol = 1e-4;
    int order_cap = 8;

    AtomParams atom() const { return AtomParams{v / gamma, delta / gamma, 1.0}; }
    void validate() const;
    std::map<std::string, std::string> echo() const;
};

/// Line-oriented "key = value" config text with [mode] sections. Keys in the
/// global section apply to every mode; section keys apply to their mode.
using ConfigFile = std::map<std::string, std::map<std::string, std::string>>;

ConfigFile parse_config_text(const std::string& text);
ConfigFile load_config_file(const std::string& path);

/// Applies file keys to cfg, skipping any key named in cli_overrides
/// (flags the user passed explicitly; the command line wins).
void apply_config(SweepConfig& cfg, const ConfigFile& file, const std::set<std::string>& cli_overrides);

/// Deterministic order-restoring parallel map over [0, n).
void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn);

CorrelationGrid run_spectrum(const SweepConfig& cfg);
CorrelationGrid run_g2tau(const SweepConfig& cfg);
CorrelationGrid run_g2map(const SweepConfig& cfg);
CorrelationGrid run_dg2map(const SweepConfig& cfg);

CorrelationGrid run_sweep(const SweepConfig& cfg);

}  // namespace rfcorr
