#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slapick/registry.hpp"
#include "slapick/simulator.hpp"

namespace slapick {

struct GatewayConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 -> pick a free port (read it back via port())
    double threshold_ms = kDefaultThresholdMs;
    double t_on_device_ms = kDefaultOnDeviceMs;
    int warmup_count = kDefaultWarmupCount;  // probe executions per unseeded model
    double ewma_alpha = kDefaultEwmaAlpha;
    std::uint64_t seed = 0;
    // When set, replaces the clock-stamp input-transfer estimate. Escape hatch
    // for clients with unsynchronized clocks.
    std::optional<double> fixed_input_ms;
};

// HTTP front door for the selection engine. Per request: estimate the input
// transfer from the client timestamp, derive the execution budget, run the
// probabilistic selection against the current profile snapshot, execute a
// stub backend (sleeps a draw from the model's true latency distribution),
// then fold the observed latency back into the profile.
//
// Endpoints:
//   POST /v1/infer          {sla_ms, client_start_ts_ms, payload_b64?,
//                            request_id?, truth_label?} -> InferResponse
//   GET  /v1/models         registration-ordered profile listing
//   POST /v1/models         register one model (201; duplicate id -> 409)
//   GET  /v1/metrics        per-model profile + usage, attainment counters
//   POST /v1/profiles/reset 204; profiles return to registration state and
//                           unseeded models are re-warmed
//
// Errors are JSON: {"error": {"code", "message"}}. Requests are served
// concurrently; selection reads a snapshot, profile writes serialize through
// the registry, and the stub sleep happens outside every lock so one slow
// model never stalls the rest.
class Gateway {
  public:
    Gateway(const std::vector<PoolModel>& models, GatewayConfig cfg);
    ~Gateway();
    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    // Claim the listen port. Returns false if the bind fails.
    bool bind();
    // Port actually bound (differs from cfg.port when cfg.port == 0).
    int port() const;

    // Serve on the calling thread until stop(). Binds first if needed.
    bool run();
    // bind() + serve on a background thread; returns once the server accepts
    // connections. Returns false on bind failure.
    bool start();
    void stop();

    const GatewayConfig& config() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace slapick
