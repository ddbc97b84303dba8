#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "slapick/budget.hpp"
#include "slapick/model.hpp"

namespace slapick {

// Floor for the soft-limit distance in the utility denominator.
constexpr double kUtilityDistanceEpsilonMs = 1e-6;

enum class PolicyKind {
    static_greedy,
    dynamic_greedy,
    modipick,
    pure_random,
    related_random,
    related_accurate,
};

const char* to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);  // throws on unknown name
std::vector<PolicyKind> all_policies();

enum class SelectionPath { normal, fallback_fastest };

const char* to_string(SelectionPath path);

struct ExplorationWindow {
    double center_ms = 0.0;      // soft limit T_L
    double half_width_ms = 0.0;  // |T_L - mean(base)| + std(base)
    double lower_ms() const { return center_ms - half_width_ms; }
    double upper_ms() const { return center_ms + half_width_ms; }
    bool contains(double mean_ms) const {
        return mean_ms >= lower_ms() && mean_ms <= upper_ms();
    }
};

struct ExplorationMember {
    std::string model_id;
    double accuracy = 0.0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double utility = 0.0;
    double probability = 0.0;  // filled by normalize_and_sample
};

struct ExplorationSet {
    std::string base_id;
    ExplorationWindow window;
    std::vector<ExplorationMember> members;  // registration order; includes base
};

struct SelectionDecision {
    std::string model_id;
    PolicyKind policy = PolicyKind::modipick;
    SelectionPath path = SelectionPath::normal;
    std::optional<ExplorationSet> exploration;  // probabilistic selections only
    double draw = -1.0;                         // uniform used for sampling, -1 if none
};

// Most accurate model whose believed mean fits the limit (non-strict).
// No fit, or limit_ms <= 0 -> cheapest model via the fallback path.
SelectionDecision select_static_greedy(const ProfileSnapshot& snap, double sla_ms);
SelectionDecision select_dynamic_greedy(const ProfileSnapshot& snap, double t_budget_ms);

// Stage one: most accurate model with mean+std < T_U and mean-std < T_L.
// Infeasible -> (cheapest model, fallback_fastest).
struct BaseSelection {
    const SnapshotEntry* entry = nullptr;
    SelectionPath path = SelectionPath::normal;
};
BaseSelection select_base(const ProfileSnapshot& snap, double t_upper_ms, double t_lower_ms);

// Stage two: candidates whose believed mean falls inside the exploration
// window and whose mean+std clears T_U. The base always qualifies; any other
// candidate must either be uncertain (std > 0) or improve on the base's
// accuracy — a fully-known candidate that is no more accurate than the base
// has nothing to offer and is dropped. Utilities are filled (Eq. stage 3).
ExplorationSet build_exploration_set(const ProfileSnapshot& snap, const SnapshotEntry& base,
                                     double t_upper_ms, double t_lower_ms);

// accuracy * (T_U - (mean+std)) / max(|T_L - mean|, epsilon).
// Requires mean+std < T_U (positive utility); throws otherwise.
double utility(const ModelProfile& profile, double accuracy, double t_upper_ms,
               double t_lower_ms);

struct SampleResult {
    std::size_t index = 0;
    double draw = 0.0;
};

// Fill probabilities (utility / sum) and sample one member by inverse CDF in
// member (= registration) order. Requires positive utilities.
SampleResult normalize_and_sample(ExplorationSet& set, std::mt19937_64& rng);

// Full three-stage selection.
SelectionDecision select_modipick(const ProfileSnapshot& snap, const TimeBudget& budget,
                                  std::mt19937_64& rng);
// Anytime variant: stop after stage one and return the base.
SelectionDecision select_modipick_anytime(const ProfileSnapshot& snap,
                                          const TimeBudget& budget);

// Decomposition baselines.
SelectionDecision select_pure_random(const ProfileSnapshot& snap, std::mt19937_64& rng);
SelectionDecision select_related_random(const ProfileSnapshot& snap, const TimeBudget& budget,
                                        std::mt19937_64& rng);
SelectionDecision select_related_accurate(const ProfileSnapshot& snap,
                                          const TimeBudget& budget, std::mt19937_64& rng);

// Uniform members pick / most-accurate members pick over a built set.
const ExplorationMember& pick_uniform(const ExplorationSet& set, std::mt19937_64& rng,
                                      double* draw_out = nullptr);
const ExplorationMember& pick_most_accurate(const ExplorationSet& set);

// Dispatch by policy kind (static_greedy consumes sla_ms, the rest consume
// the budget; pure_random ignores both).
SelectionDecision select(PolicyKind kind, const ProfileSnapshot& snap, double sla_ms,
                         const TimeBudget& budget, std::mt19937_64& rng);

}  // namespace slapick
