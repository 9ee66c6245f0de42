// warpsim command-line runner: executes scenario presets or JSON scenario
// files and writes CSV trajectories, a JSON summary, and SVG figures.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "warpsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

bool is_preset(const std::string& name) {
    for (const auto& p : warpsim::preset_names()) {
        if (p == name) return true;
    }
    return false;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"warp-metric Dirac dynamics on a trapped-ion-style spin-boson model"};
    app.require_subcommand(1);

    std::string target;
    std::string backend;
    std::string out_dir;
    int n_max = 0;
    double dt = 0.0;
    double t_max = 0.0;
    bool svg = true;
    bool verify = false;

    CLI::App* run = app.add_subcommand("run", "run a preset or a JSON scenario file");
    run->add_option("target", target, "preset name or path to a scenario file")
        ->required();
    run->add_option("--backend", backend, "exact | timeordered | oracle");
    run->add_option("--nmax", n_max, "Fock truncation override");
    run->add_option("--dt", dt, "time step override (timeordered backend)");
    run->add_option("--tmax", t_max, "evolution time override (seconds)");
    run->add_option("--out", out_dir, "output directory (default out/<name>)");
    run->add_flag("--svg,!--no-svg", svg, "emit SVG figures (default on)");
    run->add_flag("--verify", verify,
                  "cross-check the run against the momentum oracle; nonzero exit "
                  "on violation");

    CLI11_PARSE(app, argc, argv);

    try {
        warpsim::ScenarioConfig cfg;
        if (is_preset(target)) {
            cfg = warpsim::preset(target);
        } else if (std::filesystem::exists(target)) {
            cfg = warpsim::load_config(target);
        } else {
            std::fprintf(stderr, "error: '%s' is neither a preset nor a file\n",
                         target.c_str());
            std::fprintf(stderr, "presets:");
            for (const auto& p : warpsim::preset_names()) {
                std::fprintf(stderr, " %s", p.c_str());
            }
            std::fprintf(stderr, "\n");
            return kExitConfig;
        }

        if (!backend.empty()) {
            if (backend == "exact") {
                cfg.backend = warpsim::Backend::ExactCommuting;
            } else if (backend == "timeordered") {
                cfg.backend = warpsim::Backend::TimeOrdered;
            } else if (backend == "oracle") {
                cfg.backend = warpsim::Backend::MomentumOracle;
            } else {
                std::fprintf(stderr, "error: unknown backend '%s'\n", backend.c_str());
                return kExitConfig;
            }
        }
        if (n_max > 0) cfg.n_max = n_max;
        if (dt > 0.0) cfg.dt = dt;
        if (t_max > 0.0) {
            cfg.t_max = t_max;
            cfg.sample_interval = std::min(cfg.sample_interval, t_max);
        }
        cfg.outputs.svg = svg;

        const std::filesystem::path dir = out_dir.empty()
                                              ? std::filesystem::path("out") / cfg.name
                                              : std::filesystem::path(out_dir);

        for (const auto& w : cfg.warnings) {
            std::fprintf(stderr, "warning: %s\n", w.c_str());
        }
        if (cfg.ion) {
            for (const auto& w : cfg.ion->warnings) {
                std::fprintf(stderr, "warning: %s\n", w.c_str());
            }
        }

        const auto summary = warpsim::run_scenario(cfg, dir, verify);
        std::printf("wrote %s\n", (dir / (cfg.name + "_summary.json")).string().c_str());
        if (summary.contains("lightcone_fit")) {
            std::printf("lightcone slopes: %+.4f / %+.4f\n",
                        summary["lightcone_fit"]["slope_up"].get<double>(),
                        summary["lightcone_fit"]["slope_down"].get<double>());
        }
        if (summary.contains("rwa_comparison")) {
            std::printf("lab vs effective relative deviation: %.4f\n",
                        summary["rwa_comparison"]["relative_deviation"].get<double>());
        }
        return kExitOk;
    } catch (const warpsim::ParseError& e) {
        std::fprintf(stderr, "config parse error (line %d, column %d): %s\n", e.line,
                     e.column, e.what());
        return kExitConfig;
    } catch (const warpsim::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const warpsim::InvalidArgument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const warpsim::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitIo;
    } catch (const warpsim::Error& e) {
        // truncation, norm drift, step size, grid, verification
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    }
}
