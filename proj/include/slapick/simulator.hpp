#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slapick/budget.hpp"
#include "slapick/model.hpp"
#include "slapick/netmodel.hpp"
#include "slapick/policy.hpp"
#include "slapick/registry.hpp"

namespace slapick {

constexpr int kDefaultWarmupCount = 1000;

// One model of the simulated pool: ground truth plus an optional profile seed.
struct PoolModel {
    std::string id;
    double accuracy = 0.0;
    double true_mean_ms = 0.0;
    double true_std_ms = 0.0;
    std::optional<double> seed_mean_ms;
    std::optional<double> seed_std_ms;

    LatencyDistribution true_latency() const;
    std::optional<SeedProfile> seed() const;
};

struct SimulationConfig {
    std::vector<PoolModel> models;
    NetworkProfile network;
    PolicyKind policy = PolicyKind::modipick;
    double sla_ms = 250.0;
    double t_threshold_ms = kDefaultThresholdMs;
    double t_on_device_ms = kDefaultOnDeviceMs;
    int request_count = 10000;
    int warmup_count = kDefaultWarmupCount;  // probe executions per unseeded model
    double ewma_alpha = kDefaultEwmaAlpha;
    std::uint64_t seed = 0;
};

struct RequestOutcome {
    int index = 0;
    std::string model_id;
    SelectionPath path = SelectionPath::normal;
    double t_input_actual_ms = 0.0;
    double t_input_estimated_ms = 0.0;
    double exec_ms = 0.0;
    double t_output_ms = 0.0;
    double end_to_end_ms = 0.0;
    bool sla_met = false;
    bool correct = false;
};

struct Report {
    double sla_attainment = 0.0;
    double effective_accuracy = 0.0;       // correct fraction over all requests
    double accuracy_sla_met = 0.0;         // correct fraction over SLA-met requests
    double mean_end_to_end_ms = 0.0;
    double std_end_to_end_ms = 0.0;
    double fallback_fraction = 0.0;
    std::vector<std::pair<std::string, double>> usage;  // model id -> request fraction
};

struct RunResult {
    Report report;
    std::vector<RequestOutcome> outcomes;
};

// Called once per request with the decision, the resolved budget and the
// snapshot the decision was made against (profiles as of selection time).
using SelectionObserver =
    std::function<void(const SelectionDecision&, const TimeBudget&, const ProfileSnapshot&)>;

// Deterministic sequential-serving loop. Unseeded models are profiled by
// warmup probes first; probe executions do not appear in the outcome log.
RunResult run(const SimulationConfig& config, const SelectionObserver& observer = {});

Report aggregate(const std::vector<RequestOutcome>& outcomes);
Report aggregate(const std::vector<RequestOutcome>& outcomes,
                 const std::vector<std::string>& model_ids);

struct SweepPoint {
    double sla_ms = 0.0;
    double cv = 0.0;
    PolicyKind policy = PolicyKind::modipick;
    Report report;
};

// One run per SLA; each point gets an independent derived seed, identical
// across policies so that policy comparisons stay paired.
std::vector<SweepPoint> sweep_sla(const SimulationConfig& base,
                                  const std::vector<double>& sla_grid);

// One run per cv with network = from_mean_cv(mean_ms, cv) on both legs.
std::vector<SweepPoint> sweep_cv(const SimulationConfig& base, double mean_ms,
                                 const std::vector<double>& cv_grid);

// Same environment seed for every policy: identical uplink, downlink and
// correctness streams; only the selections differ.
std::vector<SweepPoint> compare_policies(const SimulationConfig& base,
                                         const std::vector<PolicyKind>& policies);

// CSV encoding (fixed formatting; reruns are byte-identical).
std::string outcome_csv_header();
std::string outcome_csv_row(const RequestOutcome& o);
std::string report_csv_header();
std::string report_csv_row(double sla_ms, double cv, PolicyKind policy, const Report& r);
std::string usage_csv_header();
std::string usage_csv_rows(double sla_ms, double cv, PolicyKind policy, const Report& r);

}  // namespace slapick
