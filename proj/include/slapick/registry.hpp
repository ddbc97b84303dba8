#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "slapick/model.hpp"

namespace slapick {

constexpr double kDefaultEwmaAlpha = 0.1;
constexpr double kDefaultStalenessWindowMs = 10000.0;

// Thread-safe model pool + latency profile store. Writers serialize through
// one mutex; readers get value snapshots and never observe partial updates.
class Registry {
  public:
    explicit Registry(double ewma_alpha = kDefaultEwmaAlpha);

    // Returns the registered id. Throws on duplicate id, empty id, accuracy
    // outside [0, 1], or negative seed values.
    std::string register_model(const ModelSpec& spec,
                               std::optional<SeedProfile> seed = std::nullopt);

    // Fold one served-latency observation into the model's profile:
    //   mean <- (1 - a) * mean + a * x
    //   var  <- (1 - a) * var  + a * (x - prev_mean)^2
    // First observation on a profile without a prior sets mean = x, var = 0.
    // Also refreshes last_selected_at_ms.
    void record_observation(const std::string& id, double latency_ms, double now_ms);

    // Models whose last selection is further than window_ms in the past
    // (never-selected models count as stale). Infinite window -> empty.
    std::vector<std::string> stale_models(double now_ms, double window_ms) const;

    ProfileSnapshot snapshot(double now_ms = 0.0) const;

    LatencyDistribution true_latency(const std::string& id) const;
    double accuracy(const std::string& id) const;
    bool contains(const std::string& id) const;
    std::size_t size() const;
    double alpha() const { return alpha_; }

    // Restore every profile to its registration-time state (seed or blank).
    void reset_profiles();

  private:
    struct Entry {
        ModelSpec spec;
        std::optional<SeedProfile> seed;
        ModelProfile profile;
    };

    static ModelProfile initial_profile(const std::optional<SeedProfile>& seed);
    std::size_t index_of(const std::string& id) const;  // throws if unknown

    double alpha_;
    mutable std::mutex mu_;
    std::vector<Entry> entries_;  // registration order
    std::unordered_map<std::string, std::size_t> index_;
};

// Canonical text form of a snapshot (used by tests to prove isolation and by
// the gateway's model listing).
std::string to_string(const ProfileSnapshot& snap);

}  // namespace slapick
