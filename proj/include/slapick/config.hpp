#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slapick/budget.hpp"
#include "slapick/policy.hpp"
#include "slapick/registry.hpp"
#include "slapick/simulator.hpp"

namespace slapick {

// Config-file problem, anchored to file and line where possible.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Network block: exactly one of {mean_ms+std_ms, mean_ms+cv, trace_file}.
// cv_grid is consumed by the cv sweep and requires mean_ms.
struct NetworkSettings {
    std::optional<double> mean_ms;
    std::optional<double> std_ms;
    std::optional<double> cv;
    std::optional<std::string> trace_file;  // resolved relative to the config file
    std::vector<double> cv_grid;

    LatencyDistribution link_distribution() const;
};

struct ExperimentConfig {
    std::vector<PoolModel> models;
    NetworkSettings network;
    std::vector<PolicyKind> policies;  // "policy =" or "policies ="
    std::vector<double> sla_grid;      // "sla_ms =" or "sla_grid ="
    double threshold_ms = kDefaultThresholdMs;
    double t_on_device_ms = kDefaultOnDeviceMs;
    int requests = 10000;
    int warmup = kDefaultWarmupCount;
    double ewma_alpha = kDefaultEwmaAlpha;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& name = "<config>");

// Model pool only: [model] blocks are validated as usual, every other section
// or key is ignored, so both bare pool files and full experiment configs load.
std::vector<PoolModel> parse_pool_file(const std::string& path);
std::vector<PoolModel> parse_pool_text(const std::string& text,
                                       const std::string& name = "<config>");

// Canonical text form; parse(serialize(c)) == c value-wise.
std::string serialize_config(const ExperimentConfig& cfg);

// Simulation for one (policy, sla) point of the experiment.
SimulationConfig make_simulation_config(const ExperimentConfig& cfg, PolicyKind policy,
                                        double sla_ms);

}  // namespace slapick
