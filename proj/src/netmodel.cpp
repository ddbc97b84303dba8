#include "slapick/netmodel.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "slapick/rng.hpp"

namespace slapick {

namespace {

constexpr int kMaxRejectionAttempts = 100;

void require_finite_nonneg(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string(what) + " must be finite and nonnegative");
    }
}

}  // namespace

LatencyDistribution make_degenerate(double value_ms) {
    require_finite_nonneg(value_ms, "degenerate latency");
    return DegenerateLatency{value_ms};
}

LatencyDistribution make_truncated_normal(double mean_ms, double std_ms) {
    require_finite_nonneg(mean_ms, "latency mean");
    require_finite_nonneg(std_ms, "latency std");
    return TruncatedNormalLatency{mean_ms, std_ms};
}

LatencyDistribution make_empirical(std::vector<double> samples_ms) {
    if (samples_ms.empty()) {
        throw std::invalid_argument("empirical latency needs at least one sample");
    }
    for (double v : samples_ms) require_finite_nonneg(v, "empirical latency sample");
    return EmpiricalLatency{
        std::make_shared<const std::vector<double>>(std::move(samples_ms))};
}

LatencyDistribution from_mean_cv(double mean_ms, double cv) {
    require_finite_nonneg(mean_ms, "latency mean");
    require_finite_nonneg(cv, "latency cv");
    if (cv == 0.0) return DegenerateLatency{mean_ms};
    return TruncatedNormalLatency{mean_ms, cv * mean_ms};
}

LatencyDistribution load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::vector<double> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // trim whitespace; skip blanks
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        std::string tok = line.substr(b, e - b + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                        ": not a number: " + tok);
        }
        if (used != tok.size() || !std::isfinite(v) || v < 0.0) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                        ": bad latency value: " + tok);
        }
        samples.push_back(v);
    }
    if (samples.empty()) {
        throw std::runtime_error("trace file has no samples: " + path);
    }
    return make_empirical(std::move(samples));
}

double sample(const LatencyDistribution& dist, std::mt19937_64& rng) {
    struct Visitor {
        std::mt19937_64& rng;
        double operator()(const DegenerateLatency& d) const { return d.value_ms; }
        double operator()(const TruncatedNormalLatency& d) const {
            double x = 0.0;
            for (int i = 0; i < kMaxRejectionAttempts; ++i) {
                x = d.mean_ms + d.std_ms * standard_normal(rng);
                if (x >= 0.0) return x;
            }
            return 0.0;  // pathological parameters: clamp
        }
        double operator()(const EmpiricalLatency& d) const {
            const auto& s = *d.samples_ms;
            auto idx = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(s.size()));
            if (idx >= s.size()) idx = s.size() - 1;
            return s[idx];
        }
    };
    return std::visit(Visitor{rng}, dist);
}

double configured_mean(const LatencyDistribution& dist) {
    struct Visitor {
        double operator()(const DegenerateLatency& d) const { return d.value_ms; }
        double operator()(const TruncatedNormalLatency& d) const { return d.mean_ms; }
        double operator()(const EmpiricalLatency& d) const {
            const auto& s = *d.samples_ms;
            return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
        }
    };
    return std::visit(Visitor{}, dist);
}

double configured_cv(const LatencyDistribution& dist) {
    struct Visitor {
        double operator()(const DegenerateLatency&) const { return 0.0; }
        double operator()(const TruncatedNormalLatency& d) const {
            return d.mean_ms > 0.0 ? d.std_ms / d.mean_ms : 0.0;
        }
        double operator()(const EmpiricalLatency& d) const {
            const auto& s = *d.samples_ms;
            double n = static_cast<double>(s.size());
            double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
            if (mean <= 0.0) return 0.0;
            double acc = 0.0;
            for (double v : s) acc += (v - mean) * (v - mean);
            return std::sqrt(acc / n) / mean;
        }
    };
    return std::visit(Visitor{}, dist);
}

NetworkProfile symmetric_network(const LatencyDistribution& dist) {
    return NetworkProfile{dist, dist};
}

}  // namespace slapick
