#include "slapick/budget.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slapick {

double estimate_input_transfer(const RequestTiming& timing) {
    return std::max(0.0, timing.t_arrival_ms - timing.t_start_ms);
}

double compute_budget(double sla_ms, double t_input_ms) {
    return sla_ms - 2.0 * t_input_ms;
}

std::pair<double, double> budget_range(double t_budget_ms, double t_threshold_ms,
                                       double t_on_device_ms) {
    if (!std::isfinite(t_threshold_ms) || t_threshold_ms < 0.0 ||
        t_threshold_ms > t_on_device_ms) {
        throw std::invalid_argument("threshold must lie in [0, t_on_device_ms]");
    }
    return {t_budget_ms, t_budget_ms - t_threshold_ms};
}

TimeBudget make_time_budget(double sla_ms, double t_input_ms, double t_threshold_ms,
                            double t_on_device_ms) {
    TimeBudget b;
    b.t_input_ms = t_input_ms;
    b.t_network_ms = 2.0 * t_input_ms;
    b.t_budget_ms = compute_budget(sla_ms, t_input_ms);
    b.t_threshold_ms = t_threshold_ms;
    auto [upper, lower] = budget_range(b.t_budget_ms, t_threshold_ms, t_on_device_ms);
    b.t_upper_ms = upper;
    b.t_lower_ms = lower;
    return b;
}

}  // namespace slapick
