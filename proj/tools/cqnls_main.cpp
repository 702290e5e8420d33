#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "cqnls/scenario.hpp"
#include "cqnls/svg_plot.hpp"
#include "cqnls/version.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
}

struct CommonOpts {
    std::string config, out_csv, out_field, out_summary, out_svg;
    int n = 0;
    double half_width = 0.0, dt = 0.0, T = 0.0;
    int cadence = 0, trials = 0, kind = 0;
    uint64_t seed = 0;
    std::vector<double> r_list, n_list, radii;
    int absorber = -1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "JSON config file");
        cmd->add_option("--n", n, "grid points per axis (power of two)");
        cmd->add_option("--half-width", half_width, "box half width L");
        cmd->add_option("--dt", dt, "time step");
        cmd->add_option("--T", T, "final time");
        cmd->add_option("--cadence", cadence, "steps between records");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--trials", trials, "randomized trials");
        cmd->add_option("--kind", kind, "mismatch operator kind (1 or 2)");
        cmd->add_option("--R-list", r_list, "radii list")->delimiter(',');
        cmd->add_option("--N-list", n_list, "dyadic frequency list")->delimiter(',');
        cmd->add_option("--radii", radii, "diagnostics radii (2)")->delimiter(',');
        cmd->add_flag("--absorber{1},--no-absorber{0}", absorber, "outer-annulus sponge");
        cmd->add_option("--out-csv", out_csv, "CSV output path");
        cmd->add_option("--out-field", out_field, "final field output path");
        cmd->add_option("--summary", out_summary, "JSON summary output path");
        cmd->add_option("--out-svg", out_svg, "SVG output path");
    }

    json merged() const {
        json j = load_config(config);
        if (n) j["grid"]["n"] = n;
        if (half_width > 0) j["grid"]["half_width"] = half_width;
        if (dt > 0) j["time"]["dt"] = dt;
        if (T > 0) j["time"]["T"] = T;
        if (cadence > 0) j["time"]["cadence"] = cadence;
        if (seed) j["seed"] = seed;
        if (trials > 0) j["trials"] = trials;
        if (kind > 0) j["kind"] = kind;
        if (!r_list.empty()) j["r_list"] = r_list;
        if (!n_list.empty()) j["n_list"] = n_list;
        if (!radii.empty()) j["radii"] = radii;
        if (absorber >= 0) j["absorber"] = absorber == 1;
        if (!out_csv.empty()) j["out"]["csv"] = out_csv;
        if (!out_field.empty()) j["out"]["field"] = out_field;
        if (!out_summary.empty()) j["out"]["summary"] = out_summary;
        if (!out_svg.empty()) j["out"]["svg"] = out_svg;
        return j;
    }
};

int run_scenario_cmd(const std::string& name, const CommonOpts& opts) {
    const json j = opts.merged();
    // `evolve` honors a scenario named in the config; dedicated subcommands win
    const std::string override_name =
        (name == "evolve" && j.contains("scenario")) ? "" : name;
    const cqnls::ScenarioConfig cfg = cqnls::parse_scenario_config(j, override_name);
    const cqnls::ScenarioResult res = cqnls::run_scenario(cfg);
    std::cout << res.summary.dump(2) << std::endl;
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(cqnls::kVersion) +
                 " - 2d radial cubic-quintic NLS laboratory"};
    app.require_subcommand(1);

    // ground-state
    auto* gs = app.add_subcommand("ground-state", "compute Q (grid solver or radial oracle)");
    int gs_n = 512;
    double gs_L = 20.0, gs_tol = 1e-10, gs_rmax = 15.0, gs_dr = 1e-3, gs_otol = 1e-6;
    int gs_maxit = 500;
    bool gs_oracle = false;
    std::string gs_out;
    gs->add_option("--n", gs_n, "grid points per axis");
    gs->add_option("--half-width", gs_L, "box half width");
    gs->add_option("--tol", gs_tol, "residual tolerance");
    gs->add_option("--max-iter", gs_maxit, "iteration cap");
    gs->add_flag("--oracle", gs_oracle, "run the radial shooting oracle instead");
    gs->add_option("--rmax", gs_rmax, "oracle domain radius (>= 15)");
    gs->add_option("--dr", gs_dr, "oracle mesh spacing (<= 1e-3)");
    gs->add_option("--oracle-tol", gs_otol, "oracle tail acceptance level");
    gs->add_option("--out", gs_out, "output path (field file, or CSV for --oracle)");

    // scenario-style commands
    std::map<std::string, CommonOpts> sc_opts;
    for (const char* name : {"evolve", "virial-scan", "evacuation", "localization",
                             "freq-decay", "threshold", "subthreshold", "supermass"}) {
        auto* cmd = app.add_subcommand(name, std::string("run the ") + name + " scenario");
        sc_opts[name].attach(cmd);
    }
    int inout_m = 0;
    double inout_rmax = 0.0;
    {
        auto* cmd = app.add_subcommand("inout-test", "in/out decomposition batteries");
        sc_opts["inout-test"].attach(cmd);
        cmd->add_option("--m", inout_m, "radial mesh points");
        cmd->add_option("--rmax", inout_rmax, "radial mesh extent");
    }
    {
        auto* cmd = app.add_subcommand("mismatch-scan", "mismatch operator-norm scan");
        sc_opts["mismatch-scan"].attach(cmd);
    }

    // plot
    auto* pl = app.add_subcommand("plot", "render CSV columns as an SVG line plot");
    cqnls::PlotSpec pspec;
    std::string ycols;
    double ref_slope = 0.0;
    bool have_slope = false, loglog = false;
    pl->add_option("--csv", pspec.csv_path, "input CSV")->required();
    pl->add_option("--x", pspec.x_column, "x column name")->required();
    pl->add_option("--y", ycols, "comma-separated y column names")->required();
    pl->add_option("--out", pspec.out_path, "output SVG path")->required();
    pl->add_flag("--loglog", loglog, "log-log axes");
    auto* slope_opt = pl->add_option("--ref-slope", ref_slope,
                                     "overlay power-law reference (log-log)");
    pl->add_option("--title", pspec.title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gs->parsed()) {
            if (gs_oracle) {
                const cqnls::RadialProfile p = cqnls::shooting_oracle(gs_rmax, gs_dr, gs_otol);
                std::ofstream out;
                std::ostream* os = &std::cout;
                if (!gs_out.empty()) {
                    out.open(gs_out);
                    if (!out) throw std::runtime_error("cannot open " + gs_out);
                    os = &out;
                }
                *os << "r,Q\n";
                for (int j = 0; j < p.size(); ++j) {
                    char line[80];
                    std::snprintf(line, sizeof(line), "%.17g,%.17g", p.r[static_cast<size_t>(j)],
                                  p.f[static_cast<size_t>(j)].real());
                    *os << line << '\n';
                }
                std::fprintf(stderr, "oracle: Q(0) ~ %.6f, mass %.6f\n", p.f[0].real(),
                             cqnls::profile_mass(p));
                return 0;
            }
            const cqnls::GridSpec g = cqnls::make_grid(gs_n, gs_L);
            const cqnls::GroundStateResult r = cqnls::petviashvili(g, gs_tol, gs_maxit);
            for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            std::fprintf(stderr, "ground state: %d iterations, residual %.3e, M(Q) = %.6f\n",
                         r.iterations, r.residual, r.mass_q);
            if (!gs_out.empty()) cqnls::save_field(r.q, gs_out);
            return 0;
        }
        for (auto& [name, opts] : sc_opts) {
            CLI::App* cmd = app.get_subcommand(name);
            if (!cmd->parsed()) continue;
            std::string scen = name;
            if (name == "inout-test") {
                scen = "inout";
                json j = opts.merged();
                if (inout_m) j["m"] = inout_m;
                if (inout_rmax > 0) j["rmax"] = inout_rmax;
                const auto cfg = cqnls::parse_scenario_config(j, scen);
                const auto res = cqnls::run_scenario(cfg);
                std::cout << res.summary.dump(2) << std::endl;
                return res.exit_code;
            }
            if (name == "mismatch-scan") scen = "mismatch";
            return run_scenario_cmd(scen, opts);
        }
        if (pl->parsed()) {
            std::stringstream ss(ycols);
            std::string c;
            while (std::getline(ss, c, ',')) pspec.y_columns.push_back(c);
            pspec.loglog = loglog;
            have_slope = slope_opt->count() > 0;
            if (have_slope) pspec.ref_slope = ref_slope;
            cqnls::plot_csv(pspec);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
