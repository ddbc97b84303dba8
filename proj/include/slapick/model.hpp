#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "slapick/netmodel.hpp"

namespace slapick {

// Static facts about a deployable model variant. true_latency is the ground
// truth the simulator and the stub executor draw from; selection policies
// only ever see the tracked profile below.
struct ModelSpec {
    std::string id;
    double accuracy = 0.0;  // top-1, in [0, 1]
    LatencyDistribution true_latency;
};

// Optional prior for a model's latency profile, e.g. from an offline
// measurement campaign.
struct SeedProfile {
    double mean_ms = 0.0;
    double std_ms = 0.0;
};

// Exponentially weighted latency belief for one model.
struct ModelProfile {
    double mean_ms = 0.0;
    double var_ms2 = 0.0;
    std::uint64_t sample_count = 0;
    double last_selected_at_ms = 0.0;  // logical ms since start; 0 = never
    bool seeded = false;

    double std_ms() const { return std::sqrt(var_ms2); }
    // A profile is usable by selection once it has a prior or an observation.
    bool has_estimate() const { return seeded || sample_count > 0; }
};

struct SnapshotEntry {
    std::string id;
    double accuracy = 0.0;
    ModelProfile profile;
};

// Immutable copy of all profiles at one instant; policies are pure
// functions over this value.
struct ProfileSnapshot {
    double timestamp_ms = 0.0;
    std::vector<SnapshotEntry> entries;  // registration order
};

}  // namespace slapick
