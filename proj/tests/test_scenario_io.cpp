#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cqnls/rng.hpp"
#include "cqnls/scenario.hpp"
#include "cqnls/svg_plot.hpp"
#include "cqnls/version.hpp"

using namespace cqnls;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json tiny_run_config() {
    return json{{"scenario", "evolve"},
                {"grid", {{"n", 64}, {"half_width", 8.0}}},
                {"initial", {{"type", "gaussian"}, {"amplitude", 1.0}, {"sigma", 1.5}}},
                {"normalize_mass", {{"factor", 0.9}}},
                {"time", {{"dt", 0.01}, {"T", 0.2}, {"cadence", 5}}},
                {"radii", {1.0, 2.0}},
                {"seed", 99}};
}

}  // namespace

TEST_CASE("field file round trip is bit exact") {
    const GridSpec g = make_grid(64, 5.0);
    Field2D u(g);
    Rng rng(4);
    for (long i = 0; i < u.size(); ++i) u[i] = rng.cnormal();
    const std::string path = "roundtrip.cqf";
    save_field(u, path);
    const Field2D v = load_field(path);
    REQUIRE(v.spec() == g);
    for (long i = 0; i < u.size(); ++i) REQUIRE(u[i] == v[i]);

    SUBCASE("bad magic and truncation are rejected") {
        {
            std::ofstream bad("bad.cqf", std::ios::binary);
            bad << "NOT-A-FIELD\n{}\n";
        }
        CHECK_THROWS_WITH_AS(load_field("bad.cqf"), doctest::Contains("magic"),
                             std::runtime_error);
        const std::string full = slurp(path);
        {
            std::ofstream trunc("trunc.cqf", std::ios::binary);
            trunc.write(full.data(), static_cast<std::streamsize>(full.size() / 2));
        }
        CHECK_THROWS_WITH_AS(load_field("trunc.cqf"), doctest::Contains("truncated"),
                             std::runtime_error);
    }
}

TEST_CASE("scenario config validation names the offending field") {
    json j = tiny_run_config();
    j["time"].erase("dt");
    CHECK_THROWS_WITH_AS(parse_scenario_config(j), doctest::Contains("dt"),
                         std::invalid_argument);
    json j2 = tiny_run_config();
    j2.erase("time");
    CHECK_THROWS_WITH_AS(parse_scenario_config(j2), doctest::Contains("time"),
                         std::invalid_argument);
    json j3 = tiny_run_config();
    j3["scenario"] = "warp-drive";
    CHECK_THROWS_WITH_AS(parse_scenario_config(j3), doctest::Contains("scenario"),
                         std::invalid_argument);
    json j4 = tiny_run_config();
    j4["radii"] = {1.0};
    CHECK_THROWS_WITH_AS(parse_scenario_config(j4), doctest::Contains("radii"),
                         std::invalid_argument);
    json j5 = tiny_run_config();
    j5["grid"]["n"] = 100;
    CHECK_THROWS_AS(parse_scenario_config(j5), std::invalid_argument);
}

TEST_CASE("mass normalization hits the target exactly") {
    json j = tiny_run_config();
    j["out"]["csv"] = "tiny_run.csv";
    const ScenarioConfig cfg = parse_scenario_config(j);
    const ScenarioResult res = run_scenario(cfg);
    CHECK(res.exit_code == 0);
    // row 0, column 1 is the recorded initial mass
    std::ifstream csv("tiny_run.csv");
    std::string header, row;
    std::getline(csv, header);
    CHECK(header == diagnostics_csv_header());
    std::getline(csv, row);
    std::stringstream ss(row);
    std::string cell;
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    const double m0 = std::strtod(cell.c_str(), nullptr);
    const double target = 0.9 * townes_mass(make_grid(64, 8.0));
    CHECK(std::abs(m0 - target) <= 1e-12 * target);
}

TEST_CASE("identical config and seed reproduce byte-identical artifacts") {
    json j = tiny_run_config();
    j["out"]["csv"] = "repro_a.csv";
    j["out"]["summary"] = "repro_a.json";
    run_scenario(parse_scenario_config(j));
    j["out"]["csv"] = "repro_b.csv";
    j["out"]["summary"] = "repro_b.json";
    run_scenario(parse_scenario_config(j));
    CHECK(slurp("repro_a.csv") == slurp("repro_b.csv"));
    // summaries differ only in the output paths recorded nowhere; same bytes
    CHECK(slurp("repro_a.json") == slurp("repro_b.json"));
}

TEST_CASE("summary carries hash, version and warnings") {
    json j = tiny_run_config();
    j["out"]["summary"] = "summary_probe.json";
    const ScenarioResult res = run_scenario(parse_scenario_config(j));
    CHECK(res.summary.at("version").get<std::string>() == kVersion);
    CHECK(res.summary.at("config_hash").get<std::string>().size() == 16);
    CHECK(res.summary.contains("warnings"));
    CHECK(res.summary.at("pass").get<bool>());
    const json reread = json::parse(slurp("summary_probe.json"));
    CHECK(reread.at("config_hash") == res.summary.at("config_hash"));
}

TEST_CASE("svg plotting") {
    {
        std::ofstream csv("plot_in.csv");
        csv << "t,energy,mass\n";
        for (int i = 0; i <= 20; ++i) csv << 0.1 * i << "," << 5.0 << "," << 2.0 << "\n";
    }
    PlotSpec spec;
    spec.csv_path = "plot_in.csv";
    spec.x_column = "t";
    spec.y_columns = {"energy"};
    spec.out_path = "plot_out.svg";
    plot_csv(spec);
    const std::string svg = slurp("plot_out.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);

    SUBCASE("unknown column lists the available ones") {
        spec.y_columns = {"enthalpy"};
        CHECK_THROWS_WITH_AS(plot_csv(spec), doctest::Contains("available: t, energy, mass"),
                             std::invalid_argument);
    }
    SUBCASE("empty csv is an error") {
        {
            std::ofstream empty("empty.csv");
        }
        spec.csv_path = "empty.csv";
        spec.y_columns = {"energy"};
        CHECK_THROWS_AS(plot_csv(spec), std::invalid_argument);
    }
    SUBCASE("log-log with a reference slope") {
        {
            std::ofstream csv("decay.csv");
            csv << "N,sup\n";
            for (double N : {8.0, 16.0, 32.0}) csv << N << "," << std::pow(N, -1.2) << "\n";
        }
        PlotSpec lg;
        lg.csv_path = "decay.csv";
        lg.x_column = "N";
        lg.y_columns = {"sup"};
        lg.out_path = "decay.svg";
        lg.loglog = true;
        lg.ref_slope = -1.2;
        plot_csv(lg);
        CHECK(slurp("decay.svg").find("slope -1.2") != std::string::npos);
    }
}

#ifdef CQNLS_BIN
TEST_CASE("cli exit codes: 0 success, 2 usage/config error") {
    const std::string bin = CQNLS_BIN;
    {
        std::ofstream cfg("missing_dt.json");
        cfg << R"({"grid":{"n":64,"half_width":8.0},"time":{"T":1.0}})";
    }
    const int rc_cfg =
        std::system((bin + " evolve --config missing_dt.json > cli_err.log 2>&1").c_str());
    CHECK(WEXITSTATUS(rc_cfg) == 2);
    CHECK(slurp("cli_err.log").find("dt") != std::string::npos);

    const int rc_usage = std::system((bin + " no-such-command > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc_usage) == 2);

    const int rc_ok = std::system(
        (bin + " ground-state --oracle --rmax 15 --dr 0.001 --out oracle_cli.csv 2> /dev/null")
            .c_str());
    CHECK(WEXITSTATUS(rc_ok) == 0);
    std::ifstream out("oracle_cli.csv");
    std::string header;
    std::getline(out, header);
    CHECK(header == "r,Q");
}
#endif
