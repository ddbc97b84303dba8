// slapick: run simulations, sweeps and policy comparisons from declarative
// config files, or serve the HTTP gateway.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slapick/config.hpp"
#include "slapick/gateway.hpp"
#include "slapick/rng.hpp"
#include "slapick/simulator.hpp"

namespace fs = std::filesystem;
using namespace slapick;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "experiment config file")
        ->required();
    cmd->add_option("--seed", o.seed, "override the config's rng seed");
    cmd->add_option("--out", o.out, "override the config's output directory");
}

ExperimentConfig load(const CommonOpts& o) {
    ExperimentConfig cfg = parse_config_file(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.output_dir = *o.out;
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

fs::path prepare_output(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    write_file(dir / "manifest",
               std::string("# slapick ") + kVersion + "\n" + serialize_config(cfg));
    return dir;
}

std::string report_rows(const std::vector<SweepPoint>& points) {
    std::string csv = report_csv_header();
    for (const auto& p : points) csv += report_csv_row(p.sla_ms, p.cv, p.policy, p.report);
    return csv;
}

std::string usage_rows(const std::vector<SweepPoint>& points) {
    std::string csv = usage_csv_header();
    for (const auto& p : points) csv += usage_csv_rows(p.sla_ms, p.cv, p.policy, p.report);
    return csv;
}

void announce(const fs::path& dir, std::size_t rows, bool with_outcomes) {
    std::printf("wrote %zu report row%s under %s (report.csv, usage.csv%s, manifest)\n",
                rows, rows == 1 ? "" : "s", dir.string().c_str(),
                with_outcomes ? ", outcomes.csv" : "");
}

int cmd_simulate(const CommonOpts& o) {
    ExperimentConfig cfg = load(o);
    if (cfg.policies.size() != 1 || cfg.sla_grid.size() != 1) {
        throw ConfigError(o.config_path +
                          ": simulate runs one (policy, sla) point; use sweep-sla or "
                          "compare for grids");
    }
    SimulationConfig sim = make_simulation_config(cfg, cfg.policies[0], cfg.sla_grid[0]);
    RunResult result = run(sim);

    fs::path dir = prepare_output(cfg);
    double cv = configured_cv(sim.network.uplink);
    std::vector<SweepPoint> point{{sim.sla_ms, cv, sim.policy, result.report}};
    write_file(dir / "report.csv", report_rows(point));
    write_file(dir / "usage.csv", usage_rows(point));
    std::string outcomes = outcome_csv_header();
    for (const auto& oc : result.outcomes) outcomes += outcome_csv_row(oc);
    write_file(dir / "outcomes.csv", outcomes);

    announce(dir, 1, true);
    std::printf("policy %s  sla %.2f ms  attainment %.4f  accuracy %.4f  fallback %.4f\n",
                to_string(sim.policy), sim.sla_ms, result.report.sla_attainment,
                result.report.effective_accuracy, result.report.fallback_fraction);
    return kExitOk;
}

int cmd_sweep_sla(const CommonOpts& o) {
    ExperimentConfig cfg = load(o);
    std::vector<SweepPoint> points;
    for (PolicyKind policy : cfg.policies) {
        SimulationConfig base = make_simulation_config(cfg, policy, cfg.sla_grid.front());
        auto rows = sweep_sla(base, cfg.sla_grid);
        points.insert(points.end(), rows.begin(), rows.end());
    }
    fs::path dir = prepare_output(cfg);
    write_file(dir / "report.csv", report_rows(points));
    write_file(dir / "usage.csv", usage_rows(points));
    announce(dir, points.size(), false);
    return kExitOk;
}

int cmd_sweep_cv(const CommonOpts& o) {
    ExperimentConfig cfg = load(o);
    if (cfg.network.cv_grid.empty() || !cfg.network.mean_ms) {
        throw ConfigError(o.config_path +
                          ": sweep-cv needs [network] mean_ms and cv_grid");
    }
    std::vector<SweepPoint> points;
    for (PolicyKind policy : cfg.policies) {
        SimulationConfig base = make_simulation_config(cfg, policy, cfg.sla_grid.front());
        auto rows = sweep_cv(base, *cfg.network.mean_ms, cfg.network.cv_grid);
        points.insert(points.end(), rows.begin(), rows.end());
    }
    fs::path dir = prepare_output(cfg);
    write_file(dir / "report.csv", report_rows(points));
    write_file(dir / "usage.csv", usage_rows(points));
    announce(dir, points.size(), false);
    return kExitOk;
}

int cmd_compare(const CommonOpts& o) {
    ExperimentConfig cfg = load(o);
    std::vector<SweepPoint> points;
    for (double sla : cfg.sla_grid) {
        SimulationConfig base = make_simulation_config(cfg, cfg.policies.front(), sla);
        // Same derived seed as the sla sweep at this grid point, and the same
        // seed for every policy: comparisons stay paired.
        char tag[64];
        std::snprintf(tag, sizeof tag, "sla:%.6g", sla);
        base.seed = mix_seed(cfg.seed, tag);
        auto rows = compare_policies(base, cfg.policies);
        points.insert(points.end(), rows.begin(), rows.end());
    }
    fs::path dir = prepare_output(cfg);
    write_file(dir / "report.csv", report_rows(points));
    write_file(dir / "usage.csv", usage_rows(points));
    announce(dir, points.size(), false);
    return kExitOk;
}

struct ServeOpts {
    std::string listen = "127.0.0.1:8080";
    std::string models_path;
    double threshold_ms = kDefaultThresholdMs;
    double t_on_device_ms = kDefaultOnDeviceMs;
    int warmup = kDefaultWarmupCount;
    double ewma_alpha = kDefaultEwmaAlpha;
    std::uint64_t seed = 0;
    std::optional<double> fixed_input_ms;
};

int cmd_serve(const ServeOpts& s) {
    auto colon = s.listen.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == s.listen.size()) {
        throw ConfigError("--listen must be host:port, got: " + s.listen);
    }
    GatewayConfig gc;
    gc.host = s.listen.substr(0, colon);
    try {
        std::size_t used = 0;
        gc.port = std::stoi(s.listen.substr(colon + 1), &used);
        if (used != s.listen.size() - colon - 1 || gc.port < 0 || gc.port > 65535) {
            throw std::invalid_argument("port");
        }
    } catch (const std::exception&) {
        throw ConfigError("--listen port must be an integer in [0, 65535]");
    }
    if (s.threshold_ms < 0.0 || s.threshold_ms > s.t_on_device_ms) {
        throw ConfigError("--threshold-ms must lie in [0, --t-on-device-ms]");
    }
    if (!(s.ewma_alpha > 0.0 && s.ewma_alpha <= 1.0)) {
        throw ConfigError("--ewma-alpha must be in (0, 1]");
    }
    if (s.warmup < 0) throw ConfigError("--warmup must be nonnegative");

    gc.threshold_ms = s.threshold_ms;
    gc.t_on_device_ms = s.t_on_device_ms;
    gc.warmup_count = s.warmup;
    gc.ewma_alpha = s.ewma_alpha;
    gc.seed = s.seed;
    gc.fixed_input_ms = s.fixed_input_ms;

    std::vector<PoolModel> pool = parse_pool_file(s.models_path);
    Gateway gateway(pool, gc);
    if (!gateway.bind()) {
        std::fprintf(stderr, "error: cannot bind %s:%d\n", gc.host.c_str(), gc.port);
        return kExitRuntime;
    }
    std::printf("slapick gateway listening on %s:%d (%zu models)\n", gc.host.c_str(),
                gateway.port(), pool.size());
    std::fflush(stdout);
    gateway.run();  // until interrupted
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SLA-aware model selection engine"};
    app.set_version_flag("--version", std::string("slapick ") + kVersion);
    app.require_subcommand(1);

    CommonOpts sim_o, sla_o, cv_o, cmp_o;
    ServeOpts serve_o;

    CLI::App* c_sim = app.add_subcommand("simulate", "one policy at one SLA; full outcome log");
    add_common(c_sim, sim_o);
    CLI::App* c_sla = app.add_subcommand("sweep-sla", "every policy across the SLA grid");
    add_common(c_sla, sla_o);
    CLI::App* c_cv = app.add_subcommand("sweep-cv", "every policy across the network cv grid");
    add_common(c_cv, cv_o);
    CLI::App* c_cmp = app.add_subcommand("compare", "paired-seed policy comparison per SLA");
    add_common(c_cmp, cmp_o);

    CLI::App* c_srv = app.add_subcommand("serve", "run the HTTP gateway until interrupted");
    c_srv->add_option("--listen", serve_o.listen, "host:port (default 127.0.0.1:8080)");
    c_srv->add_option("--models", serve_o.models_path, "model pool config file")->required();
    c_srv->add_option("--threshold-ms", serve_o.threshold_ms, "hard/soft limit gap");
    c_srv->add_option("--t-on-device-ms", serve_o.t_on_device_ms,
                      "on-device alternative bound (threshold ceiling)");
    c_srv->add_option("--warmup", serve_o.warmup, "probe executions per unseeded model");
    c_srv->add_option("--seed", serve_o.seed, "rng seed for stub executors");
    c_srv->add_option("--ewma-alpha", serve_o.ewma_alpha, "profile smoothing factor");
    c_srv->add_option("--fixed-input-ms", serve_o.fixed_input_ms,
                      "replace clock-stamp input estimate (unsynchronized clients)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(c_sim)) return cmd_simulate(sim_o);
        if (app.got_subcommand(c_sla)) return cmd_sweep_sla(sla_o);
        if (app.got_subcommand(c_cv)) return cmd_sweep_cv(cv_o);
        if (app.got_subcommand(c_cmp)) return cmd_compare(cmp_o);
        if (app.got_subcommand(c_srv)) return cmd_serve(serve_o);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitConfig;  // unreachable: require_subcommand(1)
}
