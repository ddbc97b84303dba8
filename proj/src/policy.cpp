#include "slapick/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slapick/rng.hpp"

namespace slapick {

namespace {

// Usable candidates: profiles carrying a prior or at least one observation.
std::vector<const SnapshotEntry*> usable_entries(const ProfileSnapshot& snap) {
    std::vector<const SnapshotEntry*> out;
    out.reserve(snap.entries.size());
    for (const auto& e : snap.entries) {
        if (e.profile.has_estimate()) out.push_back(&e);
    }
    if (out.empty()) {
        throw std::invalid_argument("no model with a usable latency profile");
    }
    return out;
}

// Preference order: higher accuracy, then lower believed mean, then id.
bool more_preferred(const SnapshotEntry& a, const SnapshotEntry& b) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    if (a.profile.mean_ms != b.profile.mean_ms) return a.profile.mean_ms < b.profile.mean_ms;
    return a.id < b.id;
}

// Fallback order: lower believed mean, then higher accuracy, then id.
bool faster(const SnapshotEntry& a, const SnapshotEntry& b) {
    if (a.profile.mean_ms != b.profile.mean_ms) return a.profile.mean_ms < b.profile.mean_ms;
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.id < b.id;
}

const SnapshotEntry* fastest_entry(const std::vector<const SnapshotEntry*>& pool) {
    const SnapshotEntry* best = pool.front();
    for (const auto* e : pool) {
        if (faster(*e, *best)) best = e;
    }
    return best;
}

SelectionDecision greedy_fit(const ProfileSnapshot& snap, double limit_ms, PolicyKind kind) {
    auto pool = usable_entries(snap);
    const SnapshotEntry* best = nullptr;
    if (limit_ms > 0.0) {
        for (const auto* e : pool) {
            if (e->profile.mean_ms <= limit_ms && (!best || more_preferred(*e, *best))) {
                best = e;
            }
        }
    }
    if (best) return SelectionDecision{best->id, kind, SelectionPath::normal, std::nullopt, -1.0};
    return SelectionDecision{fastest_entry(pool)->id, kind, SelectionPath::fallback_fastest,
                             std::nullopt, -1.0};
}

}  // namespace

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::static_greedy: return "static_greedy";
        case PolicyKind::dynamic_greedy: return "dynamic_greedy";
        case PolicyKind::modipick: return "modipick";
        case PolicyKind::pure_random: return "pure_random";
        case PolicyKind::related_random: return "related_random";
        case PolicyKind::related_accurate: return "related_accurate";
    }
    return "unknown";
}

PolicyKind policy_from_string(const std::string& name) {
    for (PolicyKind k : all_policies()) {
        if (name == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown policy: " + name);
}

std::vector<PolicyKind> all_policies() {
    return {PolicyKind::static_greedy,  PolicyKind::dynamic_greedy,
            PolicyKind::modipick,       PolicyKind::pure_random,
            PolicyKind::related_random, PolicyKind::related_accurate};
}

const char* to_string(SelectionPath path) {
    return path == SelectionPath::normal ? "normal" : "fallback_fastest";
}

SelectionDecision select_static_greedy(const ProfileSnapshot& snap, double sla_ms) {
    return greedy_fit(snap, sla_ms, PolicyKind::static_greedy);
}

SelectionDecision select_dynamic_greedy(const ProfileSnapshot& snap, double t_budget_ms) {
    return greedy_fit(snap, t_budget_ms, PolicyKind::dynamic_greedy);
}

BaseSelection select_base(const ProfileSnapshot& snap, double t_upper_ms, double t_lower_ms) {
    auto pool = usable_entries(snap);
    const SnapshotEntry* best = nullptr;
    for (const auto* e : pool) {
        double mean = e->profile.mean_ms;
        double std = e->profile.std_ms();
        if (mean + std < t_upper_ms && mean - std < t_lower_ms &&
            (!best || more_preferred(*e, *best))) {
            best = e;
        }
    }
    if (best) return BaseSelection{best, SelectionPath::normal};
    return BaseSelection{fastest_entry(pool), SelectionPath::fallback_fastest};
}

double utility(const ModelProfile& profile, double accuracy, double t_upper_ms,
               double t_lower_ms) {
    double headroom = t_upper_ms - (profile.mean_ms + profile.std_ms());
    if (!(headroom > 0.0)) {
        throw std::invalid_argument("utility requires mean+std below the hard limit");
    }
    double distance = std::max(std::fabs(t_lower_ms - profile.mean_ms),
                               kUtilityDistanceEpsilonMs);
    return accuracy * headroom / distance;
}

ExplorationSet build_exploration_set(const ProfileSnapshot& snap, const SnapshotEntry& base,
                                     double t_upper_ms, double t_lower_ms) {
    ExplorationSet set;
    set.base_id = base.id;
    set.window.center_ms = t_lower_ms;
    set.window.half_width_ms =
        std::fabs(t_lower_ms - base.profile.mean_ms) + base.profile.std_ms();
    for (const auto& e : snap.entries) {
        if (!e.profile.has_estimate()) continue;
        bool is_base = e.id == base.id;
        if (!is_base && !(e.profile.std_ms() > 0.0 || e.accuracy > base.accuracy)) continue;
        double mean = e.profile.mean_ms;
        // The window is constructed around the base, so the base belongs to the
        // set by definition; re-testing it can evict it on a 1-ULP rounding of
        // the window edge.
        if (!is_base) {
            if (!set.window.contains(mean)) continue;
            if (!(mean + e.profile.std_ms() < t_upper_ms)) continue;
        }
        ExplorationMember m;
        m.model_id = e.id;
        m.accuracy = e.accuracy;
        m.mean_ms = mean;
        m.std_ms = e.profile.std_ms();
        m.utility = utility(e.profile, e.accuracy, t_upper_ms, t_lower_ms);
        set.members.push_back(std::move(m));
    }
    return set;
}

SampleResult normalize_and_sample(ExplorationSet& set, std::mt19937_64& rng) {
    if (set.members.empty()) throw std::invalid_argument("exploration set is empty");
    double total = 0.0;
    for (const auto& m : set.members) {
        if (!(m.utility > 0.0)) throw std::invalid_argument("utilities must be positive");
        total += m.utility;
    }
    for (auto& m : set.members) m.probability = m.utility / total;
    SampleResult r;
    r.draw = uniform01(rng);
    double cum = 0.0;
    r.index = set.members.size() - 1;  // guards against rounding at the top end
    for (std::size_t i = 0; i < set.members.size(); ++i) {
        cum += set.members[i].probability;
        if (r.draw < cum) {
            r.index = i;
            break;
        }
    }
    return r;
}

SelectionDecision select_modipick(const ProfileSnapshot& snap, const TimeBudget& budget,
                                  std::mt19937_64& rng) {
    BaseSelection base = select_base(snap, budget.t_upper_ms, budget.t_lower_ms);
    if (base.path == SelectionPath::fallback_fastest) {
        return SelectionDecision{base.entry->id, PolicyKind::modipick,
                                 SelectionPath::fallback_fastest, std::nullopt, -1.0};
    }
    ExplorationSet set =
        build_exploration_set(snap, *base.entry, budget.t_upper_ms, budget.t_lower_ms);
    SampleResult picked = normalize_and_sample(set, rng);
    std::string id = set.members[picked.index].model_id;
    return SelectionDecision{std::move(id), PolicyKind::modipick, SelectionPath::normal,
                             std::move(set), picked.draw};
}

SelectionDecision select_modipick_anytime(const ProfileSnapshot& snap,
                                          const TimeBudget& budget) {
    BaseSelection base = select_base(snap, budget.t_upper_ms, budget.t_lower_ms);
    return SelectionDecision{base.entry->id, PolicyKind::modipick, base.path, std::nullopt,
                             -1.0};
}

SelectionDecision select_pure_random(const ProfileSnapshot& snap, std::mt19937_64& rng) {
    auto pool = usable_entries(snap);
    double u = uniform01(rng);
    auto idx = static_cast<std::size_t>(u * static_cast<double>(pool.size()));
    if (idx >= pool.size()) idx = pool.size() - 1;
    return SelectionDecision{pool[idx]->id, PolicyKind::pure_random, SelectionPath::normal,
                             std::nullopt, u};
}

const ExplorationMember& pick_uniform(const ExplorationSet& set, std::mt19937_64& rng,
                                      double* draw_out) {
    if (set.members.empty()) throw std::invalid_argument("exploration set is empty");
    double u = uniform01(rng);
    if (draw_out) *draw_out = u;
    auto idx = static_cast<std::size_t>(u * static_cast<double>(set.members.size()));
    if (idx >= set.members.size()) idx = set.members.size() - 1;
    return set.members[idx];
}

const ExplorationMember& pick_most_accurate(const ExplorationSet& set) {
    if (set.members.empty()) throw std::invalid_argument("exploration set is empty");
    const ExplorationMember* best = &set.members.front();
    for (const auto& m : set.members) {
        if (m.accuracy > best->accuracy ||
            (m.accuracy == best->accuracy &&
             (m.mean_ms < best->mean_ms ||
              (m.mean_ms == best->mean_ms && m.model_id < best->model_id)))) {
            best = &m;
        }
    }
    return *best;
}

namespace {

SelectionDecision select_related(const ProfileSnapshot& snap, const TimeBudget& budget,
                                 std::mt19937_64& rng, PolicyKind kind) {
    BaseSelection base = select_base(snap, budget.t_upper_ms, budget.t_lower_ms);
    if (base.path == SelectionPath::fallback_fastest) {
        return SelectionDecision{base.entry->id, kind, SelectionPath::fallback_fastest,
                                 std::nullopt, -1.0};
    }
    ExplorationSet set =
        build_exploration_set(snap, *base.entry, budget.t_upper_ms, budget.t_lower_ms);
    std::string id;
    double draw = -1.0;
    if (kind == PolicyKind::related_random) {
        id = pick_uniform(set, rng, &draw).model_id;
    } else {
        id = pick_most_accurate(set).model_id;
    }
    return SelectionDecision{std::move(id), kind, SelectionPath::normal, std::move(set), draw};
}

}  // namespace

SelectionDecision select_related_random(const ProfileSnapshot& snap, const TimeBudget& budget,
                                        std::mt19937_64& rng) {
    return select_related(snap, budget, rng, PolicyKind::related_random);
}

SelectionDecision select_related_accurate(const ProfileSnapshot& snap,
                                          const TimeBudget& budget, std::mt19937_64& rng) {
    return select_related(snap, budget, rng, PolicyKind::related_accurate);
}

SelectionDecision select(PolicyKind kind, const ProfileSnapshot& snap, double sla_ms,
                         const TimeBudget& budget, std::mt19937_64& rng) {
    switch (kind) {
        case PolicyKind::static_greedy: return select_static_greedy(snap, sla_ms);
        case PolicyKind::dynamic_greedy: return select_dynamic_greedy(snap, budget.t_budget_ms);
        case PolicyKind::modipick: return select_modipick(snap, budget, rng);
        case PolicyKind::pure_random: return select_pure_random(snap, rng);
        case PolicyKind::related_random: return select_related_random(snap, budget, rng);
        case PolicyKind::related_accurate: return select_related_accurate(snap, budget, rng);
    }
    throw std::invalid_argument("unknown policy kind");
}

}  // namespace slapick
