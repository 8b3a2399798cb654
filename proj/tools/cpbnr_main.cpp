#include "cpbnr/oracle.hpp"
#include "cpbnr/scenario.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

// exit codes: 0 ok, 2 bad configuration, 3 integration failure
constexpr int kOk = 0, kBadConfig = 2, kIntegrationFailed = 3;

int run_oracle_check(const cpbnr::ScenarioConfig& cfg, int n_max) {
    using namespace cpbnr;
    if (n_max < 0 || n_max > kOracleMaxFock) {
        std::cerr << "oracle-check: n_max must lie in [0, " << kOracleMaxFock << "]\n";
        return kBadConfig;
    }
    ScenarioConfig c = cfg;
    c.n_max = n_max;
    c.validate();
    const AmplitudeState s0 = initial_state(c);
    const double t_end = c.integrator.t_end;
    const int steps = static_cast<int>(std::clamp(std::ceil(2000.0 * t_end), 1000.0, 2e6));

    const AmplitudeState a = propagate_state(s0, c.params, law_of(c), c.integrator, t_end);
    const AmplitudeState b = propagate_dense(s0, c.params, law_of(c), t_end, steps);

    double dev = 0.0;
    for (int n = 0; n <= a.n_max; ++n)
        dev = std::max(dev, std::abs(a.c1[n] - b.c1[n]));
    for (int n = 0; n <= a.n_max + 1; ++n)
        dev = std::max(dev, std::abs(a.c0[n] - b.c0[n]));
    std::printf("oracle check: n_max=%d t_end=%g steps=%d\n", n_max, t_end, steps);
    std::printf("max amplitude deviation = %.3e\n", dev);
    std::printf("block norm2 = %.12g, dense norm2 = %.12g\n",
                norm_squared(a), norm_squared(b));
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative Kerr Jaynes-Cummings dynamics of a charge qubit "
                 "coupled to a frequency-modulated nanoresonator"};

    std::string preset_name, config_path, out_path = "trajectory.csv", metrics_path, gauge_str;
    double t_end = 0, stride = 0;
    int n_max = -1, threads = 0, oracle_nmax = -1;
    bool renorm = false, dump = false, list = false, plot = false;

    auto* opt_preset = app.add_option("--preset", preset_name, "named figure scenario");
    auto* opt_config = app.add_option("--config", config_path, "flat key = value config file");
    opt_preset->excludes(opt_config);
    opt_config->excludes(opt_preset);
    app.add_option("--out", out_path, "trajectory CSV path");
    app.add_option("--metrics", metrics_path, "also write summary metrics here");
    auto* opt_tend = app.add_option("--t-end", t_end, "override final time (1/lambda0)");
    auto* opt_stride = app.add_option("--stride", stride, "override sampling interval");
    auto* opt_nmax = app.add_option("--n-max", n_max, "override Fock truncation");
    auto* opt_gauge = app.add_option("--gauge", gauge_str, "direct | trace")
                          ->check(CLI::IsMember({"direct", "trace"}));
    auto* opt_threads = app.add_option("--threads", threads, "worker cap for the block sweep");
    app.add_flag("--renormalize-entropy", renorm, "entropy of the norm-conditioned state");
    app.add_flag("--dump-config", dump, "print the effective config and exit");
    app.add_flag("--list-presets", list, "print the preset table and exit");
    app.add_flag("--plot-script", plot, "also write a gnuplot script next to the CSV");
    auto* opt_oracle =
        app.add_option("--oracle-check", oracle_nmax,
                       "compare against the dense propagator at this truncation and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadConfig;
    }

    if (list) {
        std::cout << cpbnr::preset_table();
        return kOk;
    }

    cpbnr::ScenarioConfig cfg;
    try {
        if (!preset_name.empty()) {
            cfg = cpbnr::preset(preset_name);
        } else if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot open config file: " << config_path << "\n";
                return kBadConfig;
            }
            cfg = cpbnr::parse_config(in);
        } else {
            std::cerr << "one of --preset or --config is required (see --list-presets)\n";
            return kBadConfig;
        }

        // explicit flags always win over the scenario source
        if (opt_tend->count()) cfg.integrator.t_end = t_end;
        if (opt_stride->count()) cfg.integrator.output_stride = stride;
        if (opt_nmax->count()) cfg.n_max = n_max;
        if (opt_gauge->count())
            cfg.integrator.gauge =
                gauge_str == "direct" ? cpbnr::Gauge::Direct : cpbnr::Gauge::TraceRemoved;
        if (opt_threads->count()) cfg.integrator.threads = threads;
        if (renorm) cfg.integrator.entropy_renormalize = true;

        cfg.validate();
    } catch (const cpbnr::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kBadConfig;
    }

    if (dump) {
        std::cout << cpbnr::write_config(cfg);
        return kOk;
    }

    try {
        if (opt_oracle->count())
            return run_oracle_check(cfg, oracle_nmax);

        std::cout << "# effective config\n" << cpbnr::write_config(cfg) << std::flush;
        const cpbnr::TrajectoryRecord rec = cpbnr::run_scenario(cfg);

        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 1;
        }
        cpbnr::write_csv(out, rec);
        out.close();
        std::cout << "wrote " << out_path << " (" << rec.times.size() << " rows)\n";

        if (!metrics_path.empty()) {
            std::ofstream mout(metrics_path);
            if (!mout) {
                std::cerr << "cannot write " << metrics_path << "\n";
                return 1;
            }
            mout << cpbnr::metrics_text(cpbnr::summarize(rec));
            std::cout << "wrote " << metrics_path << "\n";
        }
        if (plot) {
            const std::string gp_path = out_path + ".gp";
            std::ofstream gout(gp_path);
            if (!gout) {
                std::cerr << "cannot write " << gp_path << "\n";
                return 1;
            }
            gout << cpbnr::plot_script(out_path);
            std::cout << "wrote " << gp_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "integration failed: " << e.what() << "\n";
        return kIntegrationFailed;
    }
    return kOk;
}
