#include "rfcorr/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rfcorr/delay.hpp"
#include "rfcorr/secular.hpp"
#include "rfcorr/spectral.hpp"

namespace rfcorr {

GridSpec GridSpec::parse(const std::string& text) {
    GridSpec g;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    if (!(ss >> g.start >> c1 >> g.stop >> c2 >> g.count) || c1 != ':' || c2 != ':' || !ss.eof())
        throw ConfigError("grid spec must be start:stop:count, got: " + text);
    if (g.count < 1) throw ConfigError("grid count must be positive");
    return g;
}

std::vector<double> GridSpec::linspace() const {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = (count == 1) ? start : start + (stop - start) * i / (count - 1);
    return out;
}

SweepMode parse_mode(const std::string& name) {
    if (name == "spectrum") return SweepMode::spectrum;
    if (name == "g2tau") return SweepMode::g2tau;
    if (name == "g2map") return SweepMode::g2map;
    if (name == "dg2map") return SweepMode::dg2map;
    if (name == "validate") return SweepMode::validate;
    throw ConfigError("unknown mode: " + name);
}

std::string mode_name(SweepMode m) {
    switch (m) {
        case SweepMode::spectrum: return "spectrum";
        case SweepMode::g2tau: return "g2tau";
        case SweepMode::g2map: return "g2map";
        case SweepMode::dg2map: return "dg2map";
        default: return "validate";
    }
}

void SweepConfig::validate() const {
    if (!(gamma > 0)) throw ConfigError("gamma must be > 0");
    if (!(v >= 0)) throw ConfigError("v must be >= 0");
    for (double g : gamma_f)
        if (!(g > 0)) throw ConfigError("gamma-f must be > 0");
    if (gamma_f.empty()) throw ConfigError("at least one gamma-f required");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (workers < 0) throw ConfigError("workers must be >= 0");
    if (order_cap < 2) throw ConfigError("cap must be >= 2");
    if (mode == SweepMode::g2tau && pairs.empty() && !(delta1 && delta2))
        throw ConfigError("g2tau needs --pair or both --delta1 and --delta2");
}

std::map<std::string, std::string> SweepConfig::echo() const {
    auto num = [](double x) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    std::map<std::string, std::string> m;
    m["mode"] = mode_name(mode);
    m["v"] = num(v);
    m["delta"] = num(delta);
    m["gamma"] = num(gamma);
    std::string gf;
    for (double g : gamma_f) gf += (gf.empty() ? "" : " ") + num(g);
    m["gamma-f"] = gf;
    m["grid"] = num(grid.start) + ":" + num(grid.stop) + ":" + std::to_string(grid.count);
    if (tau_max) m["tau-max"] = num(*tau_max);
    m["tau-count"] = std::to_string(tau_count);
    if (!pairs.empty()) {
        std::string p;
        for (const auto& s : pairs) p += (p.empty() ? "" : " ") + s;
        m["pair"] = p;
    }
    if (delta1) m["delta1"] = num(*delta1);
    if (delta2) m["delta2"] = num(*delta2);
    m["format"] = format;
    m["workers"] = std::to_string(workers);
    m["tol"] = num(tol);
    m["cap"] = std::to_string(order_cap);
    m["version"] = RFCORR_VERSION;
    return m;
}

ConfigFile parse_config_text(const std::string& text) {
    ConfigFile file;
    std::istringstream ss(text);
    std::string line, section;
    int lineno = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        file[section][key] = value;
    }
    return file;
}

ConfigFile load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double d = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: " + value);
    }
}

int to_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        int i = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: " + value);
    }
}

std::vector<std::string> split_list(std::string value) {
    std::replace(value.begin(), value.end(), ',', ' ');
    std::istringstream ss(value);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

void apply_key(SweepConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "mode") {
        if (parse_mode(value) != cfg.mode)
            throw ConfigError("config mode '" + value + "' conflicts with subcommand " +
                              mode_name(cfg.mode));
    } else if (key == "v") cfg.v = to_double(key, value);
    else if (key == "delta") cfg.delta = to_double(key, value);
    else if (key == "gamma") cfg.gamma = to_double(key, value);
    else if (key == "gamma-f") {
        cfg.gamma_f.clear();
        for (const auto& tok : split_list(value)) cfg.gamma_f.push_back(to_double(key, tok));
    } else if (key == "grid") cfg.grid = GridSpec::parse(value);
    else if (key == "tau-max") cfg.tau_max = to_double(key, value);
    else if (key == "tau-count") cfg.tau_count = to_int(key, value);
    else if (key == "pair") cfg.pairs = split_list(value);
    else if (key == "delta1") cfg.delta1 = to_double(key, value);
    else if (key == "delta2") cfg.delta2 = to_double(key, value);
    else if (key == "secular-overlay") cfg.secular_overlay = (value == "true" || value == "1");
    else if (key == "out") cfg.out = value;
    else if (key == "format") cfg.format = value;
    else if (key == "workers") cfg.workers = to_int(key, value);
    else if (key == "tol") cfg.tol = to_double(key, value);
    else if (key == "cap") cfg.order_cap = to_int(key, value);
    else throw ConfigError("unknown config key: " + key);
}

}  // namespace

void apply_config(SweepConfig& cfg, const ConfigFile& file,
                  const std::set<std::string>& cli_overrides) {
    for (const std::string& section : {std::string(), mode_name(cfg.mode)}) {
        auto it = file.find(section);
        if (it == file.end()) continue;
        for (const auto& [key, value] : it->second)
            if (!cli_overrides.count(key)) apply_key(cfg, key, value);
    }
    for (const auto& [section, kv] : file) {
        (void)kv;
        if (!section.empty() && section != mode_name(cfg.mode)) {
            try {
                parse_mode(section);
            } catch (const ConfigError&) {
                throw ConfigError("unknown config section: [" + section + "]");
            }
        }
    }
}

void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
    int w = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    w = std::max(1, std::min<int>(w, 64));
    if (w == 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&] {
            try {
                for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);  // drain remaining work
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

std::map<std::string, std::string> base_metadata(const SweepConfig& cfg) {
    auto m = cfg.echo();
    m["code"] = "rfcorr";
    return m;
}

void stamp_walltime(CorrelationGrid& grid, std::chrono::steady_clock::time_point t0) {
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", dt);
    grid.metadata["wall_time_s"] = buf;
}

}  // namespace

CorrelationGrid run_spectrum(const SweepConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    cfg.grid.require_scan_axis();
    const AtomParams atom = cfg.atom();
    const AtomContext ctx(atom);

    std::vector<double> gfs;
    for (double g : cfg.gamma_f) gfs.push_back(g / cfg.gamma);
    std::vector<double> deltas;
    for (double d : cfg.grid.linspace()) deltas.push_back(d / cfg.gamma);

    CorrelationGrid grid;
    grid.axes.push_back({"gamma_f/gamma", "gamma", gfs});
    grid.axes.push_back({"delta/gamma", "gamma", deltas});
    grid.value_names = {"S"};
    grid.values.resize(1);
    grid.values[0].assign(gfs.size() * deltas.size(), 0.0);

    parallel_for(grid.values[0].size(), cfg.workers, [&](size_t i) {
        const size_t gi = i / deltas.size(), di = i % deltas.size();
        grid.values[0][i] = physical_spectrum(gfs[gi], deltas[di], ctx);
    });
    grid.metadata = base_metadata(cfg);
    stamp_walltime(grid, t0);
    grid.check();
    return grid;
}

CorrelationGrid run_g2tau(const SweepConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    const AtomParams atom = cfg.atom();
    const AtomContext ctx(atom);
    const double gf = cfg.gamma_f.front() / cfg.gamma;

    GridSpec tau_axis = cfg.grid;
    if (cfg.tau_max) tau_axis = {0.0, *cfg.tau_max * cfg.gamma, cfg.tau_count};
    tau_axis.require_scan_axis();
    if (tau_axis.start < 0.0 || tau_axis.stop < tau_axis.start)
        throw ConfigError("g2tau needs a nonnegative tau axis; set --tau-max or --grid 0:stop:count");
    std::vector<double> taus = tau_axis.linspace();

    struct Channel {
        std::string name;
        double d1, d2;
        bool has_labels;
        std::string pair;
    };
    std::vector<Channel> channels;
    if (!cfg.pairs.empty()) {
        DressedParams dp = dressed_params(atom);
        for (const auto& p : cfg.pairs) {
            if (p.size() != 2) throw ConfigError("pair must be two of F,R,T: " + p);
            double d1 = line_detuning(parse_line_label(p[0]), dp.omega_r);
            double d2 = line_detuning(parse_line_label(p[1]), dp.omega_r);
            channels.push_back({p, d1, d2, true, p});
        }
    } else {
        channels.push_back({"g2", *cfg.delta1 / cfg.gamma, *cfg.delta2 / cfg.gamma, false, ""});
    }

    CorrelationGrid grid;
    grid.axes.push_back({"tau*gamma", "1/gamma", taus});
    for (const auto& ch : channels) {
        grid.value_names.push_back(ch.has_labels ? "g2_" + ch.name : ch.name);
        if (ch.has_labels && cfg.secular_overlay) grid.value_names.push_back("secular_" + ch.name);
    }
    grid.values.assign(grid.value_names.size(), std::vector<double>(taus.size(), 0.0));

    size_t col = 0;
    for (const auto& ch : channels) {
        G22TauEvaluator eval(gf, ch.d1, ch.d2, ctx);
        const double s1 = gf * physical_spectrum(gf, ch.d1, ctx);
        const double s2 = gf * physical_spectrum(gf, ch.d2, ctx);
        if (s1 <= 1e-30 || s2 <= 1e-30) throw ZeroIntensity();
        auto& out = grid.values[col];
        parallel_for(taus.size(), cfg.workers,
                     [&](size_t i) { out[i] = eval.g22(taus[i]) / (s1 * s2); });
        ++col;
        if (ch.has_labels && cfg.secular_overlay) {
            DressedParams dp = dressed_params(atom);
            auto& sec = grid.values[col];
            for (size_t i = 0; i < taus.size(); ++i)
                sec[i] = secular_g2(parse_line_label(ch.pair[0]), parse_line_label(ch.pair[1]),
                                    taus[i], dp, gf);
            ++col;
        }
    }
    grid.metadata = base_metadata(cfg);
    stamp_walltime(grid, t0);
    grid.check();
    return grid;
}

namespace {

CorrelationGrid run_map(const SweepConfig& cfg, bool normalized) {
    auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    cfg.grid.require_scan_axis();
    const AtomParams atom = cfg.atom();
    const AtomContext ctx(atom);
    const double gf = cfg.gamma_f.front() / cfg.gamma;

    std::vector<double> deltas;
    for (double d : cfg.grid.linspace()) deltas.push_back(d / cfg.gamma);
    const size_t n = deltas.size();

    std::vector<double> g11(n);
    for (size_t i = 0; i < n; ++i) g11[i] = gf * physical_spectrum(gf, deltas[i], ctx);

    CorrelationGrid grid;
    grid.axes.push_back({"delta1/gamma", "gamma", deltas});
    grid.axes.push_back({"delta2/gamma", "gamma", deltas});
    grid.value_names = {normalized ? "g2" : "dG2"};
    grid.values.assign(1, std::vector<double>(n * n, 0.0));
    auto& out = grid.values[0];

    // every cell evaluated independently so the recorded symmetry residuals
    // are measurements, not construction artifacts
    SpectralOptions sopt{cfg.order_cap};
    parallel_for(n * n, cfg.workers, [&](size_t idx) {
        const size_t i = idx / n, j = idx % n;
        const double g22 =
            g_nm(SlotSequence::intensity(gf, {deltas[i], deltas[j]}), ctx, sopt).real();
        if (normalized) {
            if (g11[i] <= 1e-30 || g11[j] <= 1e-30) throw ZeroIntensity();
            out[idx] = g22 / (g11[i] * g11[j]);
        } else {
            out[idx] = g22 - g11[i] * g11[j];
        }
    });

    // symmetry residuals: diagonal swap always, antidiagonal on symmetric
    // grids at Delta = 0
    double diag_res = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
            double a = out[i * n + j], b = out[j * n + i];
            diag_res = std::max(diag_res, std::abs(a - b) / std::max(std::abs(a), 1e-300));
        }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", diag_res);
    grid.metadata = base_metadata(cfg);
    grid.metadata["symmetry_diag_residual"] = buf;
    if (atom.delta_l == 0.0 && cfg.grid.start == -cfg.grid.stop) {
        double anti_res = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                double a = out[i * n + j], b = out[(n - 1 - i) * n + (n - 1 - j)];
                anti_res = std::max(anti_res, std::abs(a - b) / std::max(std::abs(a), 1e-300));
            }
        std::snprintf(buf, sizeof buf, "%.3e", anti_res);
        grid.metadata["symmetry_antidiag_residual"] = buf;
    }
    stamp_walltime(grid, t0);
    grid.check();
    return grid;
}

}  // namespace

CorrelationGrid run_g2map(const SweepConfig& cfg) { return run_map(cfg, true); }
CorrelationGrid run_dg2map(const SweepConfig& cfg) { return run_map(cfg, false); }

CorrelationGrid run_sweep(const SweepConfig& cfg) {
    switch (cfg.mode) {
        case SweepMode::spectrum: return run_spectrum(cfg);
        case SweepMode::g2tau: return run_g2tau(cfg);
        case SweepMode::g2map: return run_g2map(cfg);
        case SweepMode::dg2map: return run_dg2map(cfg);
        default: throw ConfigError("run_sweep: validate mode is handled by the battery runner");
    }
}

}  // namespace rfcorr
