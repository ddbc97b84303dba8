#include "slapick/registry.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace slapick {

Registry::Registry(double ewma_alpha) : alpha_(ewma_alpha) {
    if (!(ewma_alpha > 0.0) || !(ewma_alpha <= 1.0)) {
        throw std::invalid_argument("ewma alpha must be in (0, 1]");
    }
}

ModelProfile Registry::initial_profile(const std::optional<SeedProfile>& seed) {
    ModelProfile p;
    if (seed) {
        if (seed->mean_ms < 0.0 || seed->std_ms < 0.0) {
            throw std::invalid_argument("seed profile values must be nonnegative");
        }
        p.mean_ms = seed->mean_ms;
        p.var_ms2 = seed->std_ms * seed->std_ms;
        p.seeded = true;
    }
    return p;
}

std::string Registry::register_model(const ModelSpec& spec, std::optional<SeedProfile> seed) {
    if (spec.id.empty()) throw std::invalid_argument("model id must be non-empty");
    if (!(spec.accuracy >= 0.0 && spec.accuracy <= 1.0)) {
        throw std::invalid_argument("model accuracy must be in [0, 1]: " + spec.id);
    }
    ModelProfile profile = initial_profile(seed);
    std::lock_guard<std::mutex> lk(mu_);
    if (index_.count(spec.id)) {
        throw std::invalid_argument("duplicate model id: " + spec.id);
    }
    index_.emplace(spec.id, entries_.size());
    entries_.push_back(Entry{spec, seed, profile});
    return spec.id;
}

std::size_t Registry::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::invalid_argument("unknown model id: " + id);
    return it->second;
}

void Registry::record_observation(const std::string& id, double latency_ms, double now_ms) {
    if (!(latency_ms >= 0.0) || !std::isfinite(latency_ms)) {
        throw std::invalid_argument("observed latency must be finite and nonnegative");
    }
    std::lock_guard<std::mutex> lk(mu_);
    ModelProfile& p = entries_[index_of(id)].profile;
    if (!p.has_estimate()) {
        p.mean_ms = latency_ms;
        p.var_ms2 = 0.0;
    } else {
        double prev_mean = p.mean_ms;
        double d = latency_ms - prev_mean;
        p.mean_ms = (1.0 - alpha_) * prev_mean + alpha_ * latency_ms;
        p.var_ms2 = (1.0 - alpha_) * p.var_ms2 + alpha_ * d * d;
    }
    p.sample_count += 1;
    p.last_selected_at_ms = now_ms;
}

std::vector<std::string> Registry::stale_models(double now_ms, double window_ms) const {
    if (!(window_ms > 0.0)) throw std::invalid_argument("staleness window must be positive");
    std::vector<std::string> out;
    if (window_ms == std::numeric_limits<double>::infinity()) return out;
    std::lock_guard<std::mutex> lk(mu_);
    for (const auto& e : entries_) {
        if (now_ms - e.profile.last_selected_at_ms > window_ms) out.push_back(e.spec.id);
    }
    return out;
}

ProfileSnapshot Registry::snapshot(double now_ms) const {
    ProfileSnapshot snap;
    snap.timestamp_ms = now_ms;
    std::lock_guard<std::mutex> lk(mu_);
    snap.entries.reserve(entries_.size());
    for (const auto& e : entries_) {
        snap.entries.push_back(SnapshotEntry{e.spec.id, e.spec.accuracy, e.profile});
    }
    return snap;
}

LatencyDistribution Registry::true_latency(const std::string& id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return entries_[index_of(id)].spec.true_latency;
}

double Registry::accuracy(const std::string& id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return entries_[index_of(id)].spec.accuracy;
}

bool Registry::contains(const std::string& id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return index_.count(id) > 0;
}

std::size_t Registry::size() const {
    std::lock_guard<std::mutex> lk(mu_);
    return entries_.size();
}

void Registry::reset_profiles() {
    std::lock_guard<std::mutex> lk(mu_);
    for (auto& e : entries_) e.profile = initial_profile(e.seed);
}

std::string to_string(const ProfileSnapshot& snap) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "snapshot t=%.6f\n", snap.timestamp_ms);
    out += buf;
    for (const auto& e : snap.entries) {
        std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%llu,%.6f,%d\n", e.id.c_str(),
                      e.accuracy, e.profile.mean_ms, e.profile.std_ms(),
                      static_cast<unsigned long long>(e.profile.sample_count),
                      e.profile.last_selected_at_ms, e.profile.seeded ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace slapick
