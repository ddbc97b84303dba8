#include "slapick/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "slapick/rng.hpp"

namespace slapick {

namespace {

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string seed_tag(const char* kind, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s:%.6g", kind, value);
    return buf;
}

void validate(const SimulationConfig& cfg) {
    if (cfg.models.empty()) throw std::invalid_argument("simulation needs at least one model");
    if (cfg.request_count <= 0) throw std::invalid_argument("request_count must be positive");
    if (cfg.warmup_count < 0) throw std::invalid_argument("warmup count must be nonnegative");
    if (!(cfg.sla_ms > 0.0)) throw std::invalid_argument("sla_ms must be positive");
    for (const auto& m : cfg.models) {
        if (!m.seed() && cfg.warmup_count == 0) {
            throw std::invalid_argument("model " + m.id +
                                        " has no profile seed and warmup is disabled");
        }
    }
}

}  // namespace

LatencyDistribution PoolModel::true_latency() const {
    if (true_std_ms == 0.0) return make_degenerate(true_mean_ms);
    return make_truncated_normal(true_mean_ms, true_std_ms);
}

std::optional<SeedProfile> PoolModel::seed() const {
    if (!seed_mean_ms) return std::nullopt;
    return SeedProfile{*seed_mean_ms, seed_std_ms.value_or(0.0)};
}

RunResult run(const SimulationConfig& cfg, const SelectionObserver& observer) {
    validate(cfg);

    Registry registry(cfg.ewma_alpha);
    std::vector<std::string> ids;
    std::map<std::string, std::mt19937_64> exec_rng;
    ids.reserve(cfg.models.size());
    for (const auto& m : cfg.models) {
        ModelSpec spec{m.id, m.accuracy, m.true_latency()};
        registry.register_model(spec, m.seed());
        ids.push_back(m.id);
        exec_rng.emplace(m.id, make_stream(cfg.seed, "exec:" + m.id));
    }

    auto uplink_rng = make_stream(cfg.seed, "uplink");
    auto downlink_rng = make_stream(cfg.seed, "downlink");
    auto correct_rng = make_stream(cfg.seed, "correct");
    auto policy_rng = make_stream(cfg.seed, "policy");

    double now_ms = 0.0;

    // Off-band warmup probes build profiles for models without a prior.
    for (const auto& m : cfg.models) {
        if (m.seed()) continue;
        auto dist = registry.true_latency(m.id);
        auto& rng = exec_rng.at(m.id);
        for (int i = 0; i < cfg.warmup_count; ++i) {
            registry.record_observation(m.id, sample(dist, rng), now_ms);
        }
    }

    std::vector<RequestOutcome> outcomes;
    outcomes.reserve(static_cast<std::size_t>(cfg.request_count));
    for (int i = 0; i < cfg.request_count; ++i) {
        RequestOutcome o;
        o.index = i;
        o.t_input_actual_ms = sample(cfg.network.uplink, uplink_rng);
        o.t_input_estimated_ms = o.t_input_actual_ms;  // ideal clock stamps
        TimeBudget budget = make_time_budget(cfg.sla_ms, o.t_input_estimated_ms,
                                             cfg.t_threshold_ms, cfg.t_on_device_ms);
        ProfileSnapshot snap = registry.snapshot(now_ms);
        SelectionDecision decision = select(cfg.policy, snap, cfg.sla_ms, budget, policy_rng);
        o.model_id = decision.model_id;
        o.path = decision.path;
        o.exec_ms = sample(registry.true_latency(o.model_id), exec_rng.at(o.model_id));
        registry.record_observation(o.model_id, o.exec_ms, now_ms);
        o.correct = uniform01(correct_rng) < registry.accuracy(o.model_id);
        o.t_output_ms = sample(cfg.network.downlink, downlink_rng);
        o.end_to_end_ms = o.t_input_actual_ms + o.exec_ms + o.t_output_ms;
        o.sla_met = o.end_to_end_ms <= cfg.sla_ms;
        if (observer) observer(decision, budget, snap);
        now_ms += o.end_to_end_ms;
        outcomes.push_back(std::move(o));
    }

    return RunResult{aggregate(outcomes, ids), std::move(outcomes)};
}

Report aggregate(const std::vector<RequestOutcome>& outcomes) {
    return aggregate(outcomes, {});
}

Report aggregate(const std::vector<RequestOutcome>& outcomes,
                 const std::vector<std::string>& model_ids) {
    Report r;
    std::map<std::string, std::size_t> counts;
    for (const auto& id : model_ids) counts[id] = 0;
    if (outcomes.empty()) {
        for (const auto& id : model_ids) r.usage.emplace_back(id, 0.0);
        return r;
    }
    double n = static_cast<double>(outcomes.size());
    std::size_t met = 0, correct = 0, correct_met = 0, fallback = 0;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& o : outcomes) {
        met += o.sla_met ? 1 : 0;
        correct += o.correct ? 1 : 0;
        correct_met += (o.correct && o.sla_met) ? 1 : 0;
        fallback += o.path == SelectionPath::fallback_fastest ? 1 : 0;
        sum += o.end_to_end_ms;
        sum_sq += o.end_to_end_ms * o.end_to_end_ms;
        counts[o.model_id] += 1;
    }
    r.sla_attainment = static_cast<double>(met) / n;
    r.effective_accuracy = static_cast<double>(correct) / n;
    r.accuracy_sla_met = met > 0 ? static_cast<double>(correct_met) / static_cast<double>(met)
                                 : 0.0;
    r.mean_end_to_end_ms = sum / n;
    double var = std::max(0.0, sum_sq / n - r.mean_end_to_end_ms * r.mean_end_to_end_ms);
    r.std_end_to_end_ms = std::sqrt(var);
    r.fallback_fraction = static_cast<double>(fallback) / n;
    if (!model_ids.empty()) {
        // keep registration order for configured models, then any strays
        for (const auto& id : model_ids) {
            r.usage.emplace_back(id, static_cast<double>(counts[id]) / n);
            counts.erase(id);
        }
        for (const auto& [id, c] : counts) {
            r.usage.emplace_back(id, static_cast<double>(c) / n);
        }
    } else {
        for (const auto& [id, c] : counts) {
            r.usage.emplace_back(id, static_cast<double>(c) / n);
        }
    }
    return r;
}

std::vector<SweepPoint> sweep_sla(const SimulationConfig& base,
                                  const std::vector<double>& sla_grid) {
    if (sla_grid.empty()) throw std::invalid_argument("sla grid must be non-empty");
    std::vector<SweepPoint> out;
    double cv = configured_cv(base.network.uplink);
    for (double sla : sla_grid) {
        SimulationConfig cfg = base;
        cfg.sla_ms = sla;
        cfg.seed = mix_seed(base.seed, seed_tag("sla", sla));
        out.push_back(SweepPoint{sla, cv, cfg.policy, run(cfg).report});
    }
    return out;
}

std::vector<SweepPoint> sweep_cv(const SimulationConfig& base, double mean_ms,
                                 const std::vector<double>& cv_grid) {
    if (cv_grid.empty()) throw std::invalid_argument("cv grid must be non-empty");
    std::vector<SweepPoint> out;
    for (double cv : cv_grid) {
        SimulationConfig cfg = base;
        cfg.network = symmetric_network(from_mean_cv(mean_ms, cv));
        cfg.seed = mix_seed(base.seed, seed_tag("cv", cv));
        out.push_back(SweepPoint{cfg.sla_ms, cv, cfg.policy, run(cfg).report});
    }
    return out;
}

std::vector<SweepPoint> compare_policies(const SimulationConfig& base,
                                         const std::vector<PolicyKind>& policies) {
    if (policies.empty()) throw std::invalid_argument("policy list must be non-empty");
    std::vector<SweepPoint> out;
    double cv = configured_cv(base.network.uplink);
    for (PolicyKind p : policies) {
        SimulationConfig cfg = base;
        cfg.policy = p;  // same seed for every policy: paired environment streams
        out.push_back(SweepPoint{cfg.sla_ms, cv, p, run(cfg).report});
    }
    return out;
}

std::string outcome_csv_header() {
    return "idx,model,path,t_in_actual,t_in_est,exec,t_out,end_to_end,sla_met,correct\n";
}

std::string outcome_csv_row(const RequestOutcome& o) {
    std::string row = std::to_string(o.index);
    row += ',';
    row += o.model_id;
    row += ',';
    row += to_string(o.path);
    row += ',';
    row += fmt(o.t_input_actual_ms);
    row += ',';
    row += fmt(o.t_input_estimated_ms);
    row += ',';
    row += fmt(o.exec_ms);
    row += ',';
    row += fmt(o.t_output_ms);
    row += ',';
    row += fmt(o.end_to_end_ms);
    row += ',';
    row += o.sla_met ? '1' : '0';
    row += ',';
    row += o.correct ? '1' : '0';
    row += '\n';
    return row;
}

std::string report_csv_header() {
    return "sla_ms,cv,policy,attainment,effective_accuracy,mean_latency_ms,std_latency_ms,"
           "fallback_frac\n";
}

std::string report_csv_row(double sla_ms, double cv, PolicyKind policy, const Report& r) {
    std::string row = fmt(sla_ms, 2);
    row += ',';
    row += fmt(cv);
    row += ',';
    row += to_string(policy);
    row += ',';
    row += fmt(r.sla_attainment);
    row += ',';
    row += fmt(r.effective_accuracy);
    row += ',';
    row += fmt(r.mean_end_to_end_ms);
    row += ',';
    row += fmt(r.std_end_to_end_ms);
    row += ',';
    row += fmt(r.fallback_fraction);
    row += '\n';
    return row;
}

std::string usage_csv_header() { return "sla_ms,cv,policy,model,usage_frac\n"; }

std::string usage_csv_rows(double sla_ms, double cv, PolicyKind policy, const Report& r) {
    std::string rows;
    for (const auto& [id, frac] : r.usage) {
        rows += fmt(sla_ms, 2);
        rows += ',';
        rows += fmt(cv);
        rows += ',';
        rows += to_string(policy);
        rows += ',';
        rows += id;
        rows += ',';
        rows += fmt(frac);
        rows += '\n';
    }
    return rows;
}

}  // namespace slapick
