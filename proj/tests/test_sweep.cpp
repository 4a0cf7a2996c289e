#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "rfcorr/grid.hpp"
#include "rfcorr/spectral.hpp"
#include "rfcorr/sweep.hpp"

using namespace rfcorr;

TEST_CASE("grid spec parsing") {
    GridSpec g = GridSpec::parse("-15:15:601");
    CHECK(g.start == -15.0);
    CHECK(g.stop == 15.0);
    CHECK(g.count == 601);
    auto v = GridSpec{0.0, 1.0, 5}.linspace();
    CHECK(v == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK_THROWS_AS(GridSpec::parse("1:2"), ConfigError);
    CHECK_THROWS_AS(GridSpec::parse("1:2:0"), ConfigError);
    CHECK_THROWS_AS(GridSpec::parse("a:b:c"), ConfigError);
    GridSpec single{0.0, 1.0, 1};
    CHECK_THROWS_AS(single.require_scan_axis(), GridTooSmall);
}

TEST_CASE("config file parsing and precedence") {
    const std::string text =
        "# comment\n"
        "v = 12.5\n"
        "gamma = 2\n"
        "\n"
        "[spectrum]\n"
        "gamma-f = 0.2, 0.8\n"
        "grid = -10:10:21\n"
        "[g2tau]\n"
        "pair = RR TF\n";
    ConfigFile file = parse_config_text(text);
    CHECK(file.at("").at("v") == "12.5");
    CHECK(file.at("spectrum").at("gamma-f") == "0.2, 0.8");

    SweepConfig cfg;
    cfg.mode = SweepMode::spectrum;
    apply_config(cfg, file, {});
    CHECK(cfg.v == 12.5);
    CHECK(cfg.gamma == 2.0);
    CHECK(cfg.gamma_f == std::vector<double>{0.2, 0.8});
    CHECK(cfg.grid.count == 21);
    CHECK(cfg.pairs.empty());  // [g2tau] section does not leak into spectrum

    SweepConfig overridden;
    overridden.mode = SweepMode::spectrum;
    overridden.v = 99.0;
    apply_config(overridden, file, {"v"});
    CHECK(overridden.v == 99.0);
    CHECK(overridden.gamma == 2.0);

    CHECK_THROWS_AS(parse_config_text("novalue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[spectrum\n"), ConfigError);
    SweepConfig bad;
    CHECK_THROWS_AS(apply_config(bad, parse_config_text("junk = 1\n"), {}), ConfigError);
    CHECK_THROWS_AS(apply_config(bad, parse_config_text("[nosuchmode]\nv = 1\n"), {}), ConfigError);
    CHECK_THROWS_AS(apply_config(bad, parse_config_text("v = abc\n"), {}), ConfigError);
}

TEST_CASE("spectrum sweep matches direct evaluation and normalizes units") {
    SweepConfig cfg;
    cfg.mode = SweepMode::spectrum;
    cfg.v = 20.0;
    cfg.delta = 4.0;
    cfg.gamma = 2.0;  // dimensionful input: v/gamma = 10, delta/gamma = 2
    cfg.gamma_f = {0.2, 1.0};
    cfg.grid = {-30.0, 30.0, 11};
    cfg.workers = 1;
    CorrelationGrid grid = run_spectrum(cfg);
    CHECK(grid.axes[0].values == std::vector<double>{0.1, 0.5});
    CHECK(grid.axes[1].values.size() == 11);
    CHECK(grid.point_count() == 22);

    AtomContext ctx(AtomParams{10.0, 2.0, 1.0});
    for (size_t i = 0; i < grid.point_count(); ++i) {
        auto idx = grid.unravel(i);
        const double expected =
            physical_spectrum(grid.axes[0].values[idx[0]], grid.axes[1].values[idx[1]], ctx);
        CHECK(grid.values[0][i] == expected);
    }
}

TEST_CASE("sweeps are deterministic across worker counts") {
    SweepConfig cfg;
    cfg.mode = SweepMode::g2map;
    cfg.v = 20.0;
    cfg.gamma_f = {2.0};
    cfg.grid = {-30.0, 30.0, 7};
    cfg.workers = 1;
    CorrelationGrid a = run_g2map(cfg);
    cfg.workers = 4;
    CorrelationGrid b = run_g2map(cfg);
    CHECK(a.values == b.values);
    CHECK(a.metadata.at("symmetry_diag_residual") == b.metadata.at("symmetry_diag_residual"));
}

TEST_CASE("map sweeps record measured symmetry residuals") {
    SweepConfig cfg;
    cfg.mode = SweepMode::dg2map;
    cfg.v = 30.0;
    cfg.gamma_f = {1.0};
    cfg.grid = {-40.0, 40.0, 9};
    cfg.workers = 2;
    CorrelationGrid grid = run_dg2map(cfg);
    CHECK(std::stod(grid.metadata.at("symmetry_diag_residual")) < 1e-10);
    CHECK(std::stod(grid.metadata.at("symmetry_antidiag_residual")) < 1e-10);
    // detuned driving loses the antidiagonal symmetry
    cfg.delta = 10.0;
    CorrelationGrid detuned = run_dg2map(cfg);
    CHECK(detuned.metadata.count("symmetry_antidiag_residual") == 0);
}

TEST_CASE("g2tau sweep resolves line pairs and overlays the secular curve") {
    SweepConfig cfg;
    cfg.mode = SweepMode::g2tau;
    cfg.v = 200.0;
    cfg.gamma_f = {20.0};
    cfg.pairs = {"RR", "RT"};
    cfg.tau_max = 0.3;
    cfg.tau_count = 31;
    cfg.workers = 2;
    CorrelationGrid grid = run_g2tau(cfg);
    CHECK(grid.value_names ==
          std::vector<std::string>{"g2_RR", "secular_RR", "g2_RT", "secular_RT"});
    CHECK(std::abs(grid.values[0][0] - 1.0403) < 2e-3);  // frozen finite-bandwidth value
    for (double s : grid.values[1]) CHECK(s == 1.0);
    CHECK(grid.values[3][0] == 0.0);

    cfg.pairs = {"XY"};
    CHECK_THROWS_AS(run_g2tau(cfg), std::invalid_argument);
    cfg.pairs.clear();
    CHECK_THROWS_AS(run_g2tau(cfg), ConfigError);  // neither pair nor explicit detunings
    cfg.delta1 = 0.0;
    cfg.delta2 = 20.0;
    CorrelationGrid explicit_grid = run_g2tau(cfg);
    CHECK(explicit_grid.value_names == std::vector<std::string>{"g2"});
}

TEST_CASE("normalized map peaks along the energy-conserving antidiagonal") {
    SweepConfig cfg;
    cfg.mode = SweepMode::g2map;
    cfg.v = 100.0;
    cfg.gamma_f = {0.4};
    cfg.grid = {-160.0, 160.0, 33};
    cfg.workers = 4;
    CorrelationGrid grid = run_g2map(cfg);
    const auto& ds = grid.axes[0].values;
    const size_t n = ds.size();
    size_t best = 0;
    for (size_t i = 1; i < grid.values[0].size(); ++i)
        if (grid.values[0][i] > grid.values[0][best]) best = i;
    const double d1 = ds[best / n], d2 = ds[best % n];
    CHECK(std::abs(d1 + d2) < 10.0);          // sits on delta1 = -delta2
    CHECK(std::min(std::abs(d1), std::abs(d2)) > 20.0);  // away from the peaks
}

TEST_CASE("single-point scan axes are rejected") {
    SweepConfig cfg;
    cfg.mode = SweepMode::spectrum;
    cfg.grid = {0.0, 1.0, 1};
    CHECK_THROWS_AS(run_spectrum(cfg), GridTooSmall);
}

TEST_CASE("csv and json round-trip losslessly") {
    SweepConfig cfg;
    cfg.mode = SweepMode::spectrum;
    cfg.v = 10.0;
    cfg.delta = 2.0;
    cfg.gamma_f = {0.5};
    cfg.grid = {-5.0, 5.0, 7};
    cfg.workers = 1;
    CorrelationGrid grid = run_spectrum(cfg);

    std::stringstream js;
    write_json(grid, js);
    CorrelationGrid back = read_json(js);
    CHECK(back.values == grid.values);
    CHECK(back.axes[1].values == grid.axes[1].values);
    CHECK(back.metadata.at("v") == grid.metadata.at("v"));

    std::stringstream cs;
    write_csv(grid, cs);
    std::string header;
    std::getline(cs, header);
    CHECK(header == "gamma_f/gamma,delta/gamma,S");
    // 17 significant digits reparse to the exact doubles
    for (size_t i = 0; i < grid.point_count(); ++i) {
        std::string line;
        REQUIRE(std::getline(cs, line));
        const auto last = line.rfind(',');
        CHECK(std::stod(line.substr(last + 1)) == grid.values[0][i]);
    }
}

TEST_CASE("metadata echo reproduces the run") {
    SweepConfig cfg;
    cfg.mode = SweepMode::spectrum;
    cfg.v = 7.5;
    cfg.delta = -1.0;
    cfg.gamma_f = {0.3};
    cfg.grid = {-3.0, 3.0, 5};
    cfg.workers = 1;
    CorrelationGrid grid = run_spectrum(cfg);

    SweepConfig replay;
    replay.mode = parse_mode(grid.metadata.at("mode"));
    replay.v = std::stod(grid.metadata.at("v"));
    replay.delta = std::stod(grid.metadata.at("delta"));
    replay.gamma = std::stod(grid.metadata.at("gamma"));
    replay.gamma_f = {std::stod(grid.metadata.at("gamma-f"))};
    replay.grid = GridSpec::parse(grid.metadata.at("grid"));
    replay.workers = 1;
    CorrelationGrid again = run_spectrum(replay);
    CHECK(again.values == grid.values);
}
