#pragma once

#include <cstdint>
#include <utility>

namespace slapick {

constexpr double kDefaultOnDeviceMs = 150.0;   // T_D: on-device alternative's latency bound
constexpr double kDefaultThresholdMs = 20.0;   // default hard/soft limit gap

// Client-stamped timing for one inference request.
struct RequestTiming {
    double t_start_ms = 0.0;    // client send timestamp
    double t_arrival_ms = 0.0;  // server arrival timestamp
    double sla_ms = 0.0;
    std::uint64_t input_bytes = 0;
};

// Resolved per-request time accounting.
struct TimeBudget {
    double t_input_ms = 0.0;      // estimated one-way input transfer
    double t_network_ms = 0.0;    // reserved round trip = 2 * t_input
    double t_budget_ms = 0.0;     // sla - t_network (may be negative)
    double t_threshold_ms = 0.0;
    double t_upper_ms = 0.0;      // hard limit T_U = t_budget
    double t_lower_ms = 0.0;      // soft limit T_L = T_U - threshold
};

// One-way transfer estimate from clock stamps; skewed clocks clamp to 0.
double estimate_input_transfer(const RequestTiming& timing);

// Server-side execution budget: the SLA minus a symmetric reservation for the
// response's network leg. Negative results propagate so that callers can take
// the fallback path.
double compute_budget(double sla_ms, double t_input_ms);

// (T_U, T_L) around the budget. threshold must lie in [0, t_on_device_ms].
std::pair<double, double> budget_range(double t_budget_ms, double t_threshold_ms,
                                       double t_on_device_ms = kDefaultOnDeviceMs);

TimeBudget make_time_budget(double sla_ms, double t_input_ms, double t_threshold_ms,
                            double t_on_device_ms = kDefaultOnDeviceMs);

}  // namespace slapick
