#pragma once

#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace slapick {

// A latency source that always returns the same value (cv = 0 networks,
// noise-free model stubs).
struct DegenerateLatency {
    double value_ms = 0.0;
};

// Normal(mean, std) restricted to nonnegative values by rejection.
struct TruncatedNormalLatency {
    double mean_ms = 0.0;
    double std_ms = 0.0;
};

// Resamples uniformly (with replacement) from a recorded trace.
struct EmpiricalLatency {
    std::shared_ptr<const std::vector<double>> samples_ms;
};

using LatencyDistribution =
    std::variant<DegenerateLatency, TruncatedNormalLatency, EmpiricalLatency>;

LatencyDistribution make_degenerate(double value_ms);
LatencyDistribution make_truncated_normal(double mean_ms, double std_ms);
LatencyDistribution make_empirical(std::vector<double> samples_ms);

// mean + coefficient of variation; cv = 0 degenerates to a constant.
LatencyDistribution from_mean_cv(double mean_ms, double cv);

// Load an empirical trace: one nonnegative latency (ms) per line.
LatencyDistribution load_trace(const std::string& path);

double sample(const LatencyDistribution& dist, std::mt19937_64& rng);

// Configured (not sampled) moments, used for report annotations.
double configured_mean(const LatencyDistribution& dist);
double configured_cv(const LatencyDistribution& dist);

struct NetworkProfile {
    LatencyDistribution uplink;
    LatencyDistribution downlink;  // sampled independently of uplink
};

NetworkProfile symmetric_network(const LatencyDistribution& dist);

}  // namespace slapick
