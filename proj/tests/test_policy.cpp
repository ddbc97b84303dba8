#include "doctest.h"
#include "refpool.hpp"
#include "slapick/budget.hpp"
#include "slapick/policy.hpp"
#include "slapick/rng.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

using namespace slapick;

namespace {

struct Row {
    std::string id;
    double accuracy;
    double mean_ms;
    double std_ms;
};

ProfileSnapshot make_snap(const std::vector<Row>& rows) {
    ProfileSnapshot snap;
    for (const auto& r : rows) {
        ModelProfile p;
        p.mean_ms = r.mean_ms;
        p.var_ms2 = r.std_ms * r.std_ms;
        p.sample_count = 1;
        p.seeded = true;
        snap.entries.push_back({r.id, r.accuracy, p});
    }
    return snap;
}

TimeBudget limits(double upper, double lower) {
    TimeBudget b;
    b.t_budget_ms = upper;
    b.t_upper_ms = upper;
    b.t_lower_ms = lower;
    b.t_threshold_ms = upper - lower;
    return b;
}

}  // namespace

// ---------------------------------------------------------------------------
// Stage one: base selection
// ---------------------------------------------------------------------------

TEST_CASE("base is the most accurate model clearing both limits strictly") {
    auto snap = refpool::snapshot();
    auto base = select_base(snap, 70.0, 50.0);
    REQUIRE(base.entry != nullptr);
    // InceptionV4 (59.21 - 0.22 = 58.99) and InceptionResNetV2 (50.52) both
    // sit past the soft limit; InceptionV3 (30.92 < 50, 31.30 < 70) is the
    // most accurate survivor.
    CHECK(base.entry->id == "InceptionV3");
    CHECK(base.path == SelectionPath::normal);
}

TEST_CASE("base feasibility is strict on both limits") {
    // mean + std == T_U exactly: not feasible.
    auto snap = make_snap({{"edge", 0.9, 50.0, 10.0}, {"slow", 0.1, 55.0, 0.0}});
    auto at_upper = select_base(snap, 60.0, 55.0);
    CHECK(at_upper.path == SelectionPath::fallback_fastest);
    CHECK(at_upper.entry->id == "edge");  // lowest believed mean

    // Nudge the hard limit above mean + std and it becomes feasible.
    auto above = select_base(snap, 60.0 + 1e-9, 55.0);
    CHECK(above.path == SelectionPath::normal);
    CHECK(above.entry->id == "edge");

    // mean - std == T_L exactly: not feasible either.
    auto at_lower = select_base(snap, 100.0, 40.0);
    CHECK(at_lower.path == SelectionPath::fallback_fastest);
    auto below = select_base(snap, 100.0, 40.0 + 1e-9);
    CHECK(below.path == SelectionPath::normal);
    CHECK(below.entry->id == "edge");
}

TEST_CASE("infeasible or non-positive limits fall back to the fastest model") {
    auto snap = refpool::snapshot();

    auto tight = select_base(snap, 2.0, 2.0);
    CHECK(tight.path == SelectionPath::fallback_fastest);
    CHECK(tight.entry->id == "MobileNetV1 0.25");  // believed mean 3.21, pool minimum

    auto rng = make_stream(1, "policy");
    auto negative = select_modipick(snap, limits(-20.0, -40.0), rng);
    CHECK(negative.path == SelectionPath::fallback_fastest);
    CHECK(negative.model_id == "MobileNetV1 0.25");
    CHECK_FALSE(negative.exploration.has_value());
    CHECK(negative.draw == -1.0);
}

TEST_CASE("ties break by accuracy, then mean, then id") {
    auto by_mean = make_snap({{"b", 0.5, 20.0, 1.0}, {"a", 0.5, 10.0, 1.0}});
    CHECK(select_base(by_mean, 100.0, 50.0).entry->id == "a");

    auto by_id = make_snap({{"zz", 0.5, 10.0, 1.0}, {"aa", 0.5, 10.0, 1.0}});
    CHECK(select_base(by_id, 100.0, 50.0).entry->id == "aa");

    // Fallback order: mean, then accuracy, then id.
    auto fb = make_snap({{"slow", 0.9, 500.0, 0.0},
                         {"tie2", 0.3, 400.0, 0.0},
                         {"tie1", 0.7, 400.0, 0.0}});
    auto r = select_base(fb, 10.0, 10.0);
    CHECK(r.path == SelectionPath::fallback_fastest);
    CHECK(r.entry->id == "tie1");
}

// ---------------------------------------------------------------------------
// Stage two: exploration window and membership
// ---------------------------------------------------------------------------

TEST_CASE("window arithmetic and inclusive bounds") {
    ExplorationWindow w{50.0, 10.0};
    CHECK(w.lower_ms() == 40.0);
    CHECK(w.upper_ms() == 60.0);
    CHECK(w.contains(40.0));
    CHECK(w.contains(60.0));
    CHECK(w.contains(50.0));
    CHECK_FALSE(w.contains(39.999999));
    CHECK_FALSE(w.contains(60.000001));
}

TEST_CASE("window is centered on the soft limit with half-width from the base") {
    auto snap = refpool::snapshot();
    auto base = select_base(snap, 70.0, 50.0);
    auto set = build_exploration_set(snap, *base.entry, 70.0, 50.0);
    CHECK(set.base_id == "InceptionV3");
    CHECK(set.window.center_ms == 50.0);
    // |50 - 31.11| + 0.19
    CHECK(set.window.half_width_ms == doctest::Approx(19.08).epsilon(1e-12));
    CHECK(set.window.lower_ms() == doctest::Approx(30.92).epsilon(1e-12));
    CHECK(set.window.upper_ms() == doctest::Approx(69.08).epsilon(1e-12));
}

TEST_CASE("membership keeps in-window models that clear the hard limit") {
    auto snap = refpool::snapshot();
    auto base = select_base(snap, 70.0, 50.0);
    auto set = build_exploration_set(snap, *base.entry, 70.0, 50.0);
    REQUIRE(set.members.size() == 3);
    // Registration order, base included.
    CHECK(set.members[0].model_id == "InceptionResNetV2");
    CHECK(set.members[1].model_id == "InceptionV3");
    CHECK(set.members[2].model_id == "InceptionV4");
}

TEST_CASE("a model sitting exactly on a window edge is a member") {
    auto snap = make_snap({{"base", 0.8, 40.0, 0.0}, {"edge", 0.9, 60.0, 0.0}});
    auto base = select_base(snap, 100.0, 50.0);
    REQUIRE(base.entry->id == "base");  // "edge" has mean - std = 60 >= 50
    auto set = build_exploration_set(snap, *base.entry, 100.0, 50.0);
    CHECK(set.window.half_width_ms == 10.0);  // |50 - 40| + 0
    REQUIRE(set.members.size() == 2);
    CHECK(set.members[0].model_id == "base");  // lower edge, mean 40 == 50 - 10
    CHECK(set.members[1].model_id == "edge");  // upper edge, mean 60 == 50 + 10
}

TEST_CASE("a slower second limit-band model joins the set") {
    // Soft limit right on the slowest pool model: only it (and an equally slow
    // sibling, when present) fits the window.
    auto snap = refpool::snapshot();
    auto base = select_base(snap, 150.0, 150.0);
    REQUIRE(base.entry->id == "NasNet Large");
    auto set = build_exploration_set(snap, *base.entry, 150.0, 150.0);
    CHECK(set.window.half_width_ms == doctest::Approx(37.75).epsilon(1e-12));
    CHECK(set.window.lower_ms() == doctest::Approx(112.25).epsilon(1e-12));
    CHECK(set.window.upper_ms() == doctest::Approx(187.75).epsilon(1e-12));
    REQUIRE(set.members.size() == 1);
    CHECK(set.members[0].model_id == "NasNet Large");

    auto wide = refpool::snapshot(1.0, /*with_fictional=*/true);
    auto base2 = select_base(wide, 150.0, 150.0);
    REQUIRE(base2.entry->id == "NasNet Large");
    auto set2 = build_exploration_set(wide, *base2.entry, 150.0, 150.0);
    REQUIRE(set2.members.size() == 2);
    CHECK(set2.members[0].model_id == "NasNet Large");
    CHECK(set2.members[1].model_id == "NasNet Fictional");
}

TEST_CASE("the base is always a member, even with a near-degenerate window") {
    auto snap = make_snap({{"only", 0.8, 50.0, 0.5}});
    auto base = select_base(snap, 100.0, 50.0);  // 49.5 < 50, 50.5 < 100
    REQUIRE(base.path == SelectionPath::normal);
    auto set = build_exploration_set(snap, *base.entry, 100.0, 50.0);
    REQUIRE(set.members.size() == 1);
    CHECK(set.members[0].model_id == "only");
    CHECK(set.window.half_width_ms == 0.5);

    auto rng = make_stream(3, "policy");
    auto r = normalize_and_sample(set, rng);
    CHECK(r.index == 0);
    CHECK(set.members[0].probability == 1.0);
}

TEST_CASE("exact-profile members must bring something the base lacks") {
    auto snap = make_snap({
        {"base", 0.8, 40.0, 0.0},
        {"known_worse", 0.7, 45.0, 0.0},   // certain and no more accurate: dropped
        {"known_better", 0.9, 55.0, 0.0},  // certain but more accurate: kept
        {"uncertain_worse", 0.6, 50.0, 2.0},  // less accurate but unsettled: kept
    });
    auto base = select_base(snap, 100.0, 50.0);
    REQUIRE(base.entry->id == "base");
    auto set = build_exploration_set(snap, *base.entry, 100.0, 50.0);
    REQUIRE(set.members.size() == 3);
    CHECK(set.members[0].model_id == "base");
    CHECK(set.members[1].model_id == "known_better");
    CHECK(set.members[2].model_id == "uncertain_worse");
}

// ---------------------------------------------------------------------------
// Stage three: utilities, probabilities, sampling
// ---------------------------------------------------------------------------

TEST_CASE("utility is accuracy-weighted headroom over soft-limit distance") {
    ModelProfile p;
    p.mean_ms = 50.85;
    p.var_ms2 = 0.33 * 0.33;
    p.seeded = true;
    double u = utility(p, 0.775, 70.0, 50.0);
    CHECK(u == doctest::Approx(0.775 * (70.0 - 51.18) / 0.85).epsilon(1e-12));

    // No headroom -> no utility.
    ModelProfile q;
    q.mean_ms = 60.0;
    q.seeded = true;
    CHECK_THROWS_AS(utility(q, 0.5, 60.0, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(utility(q, 0.5, 59.0, 50.0), std::invalid_argument);
    CHECK_NOTHROW(utility(q, 0.5, 60.5, 50.0));

    // Sitting exactly on the soft limit floors the denominator.
    ModelProfile at_soft;
    at_soft.mean_ms = 50.0;
    at_soft.seeded = true;
    CHECK(utility(at_soft, 0.8, 100.0, 50.0) ==
          doctest::Approx(0.8 * 50.0 / 1e-6).epsilon(1e-12));
}

TEST_CASE("reference pool probabilities match the hand-derived values") {
    auto snap = refpool::snapshot();
    const double tu = 70.0, tl = 50.0;
    auto base = select_base(snap, tu, tl);
    auto set = build_exploration_set(snap, *base.entry, tu, tl);
    auto rng = make_stream(11, "policy");
    normalize_and_sample(set, rng);
    REQUIRE(set.members.size() == 3);

    // Straight-line re-derivation from the profile numbers.
    double u_irn = 0.775 * (tu - (50.85 + 0.33)) / std::fabs(tl - 50.85);
    double u_iv3 = 0.779 * (tu - (31.11 + 0.19)) / std::fabs(tl - 31.11);
    double u_iv4 = 0.801 * (tu - (59.21 + 0.22)) / std::fabs(tl - 59.21);
    double total = u_irn + u_iv3 + u_iv4;

    CHECK(set.members[0].utility == doctest::Approx(u_irn).epsilon(1e-12));
    CHECK(set.members[1].utility == doctest::Approx(u_iv3).epsilon(1e-12));
    CHECK(set.members[2].utility == doctest::Approx(u_iv4).epsilon(1e-12));

    CHECK(set.members[0].probability == doctest::Approx(u_irn / total).epsilon(1e-12));
    CHECK(set.members[1].probability == doctest::Approx(u_iv3 / total).epsilon(1e-12));
    CHECK(set.members[2].probability == doctest::Approx(u_iv4 / total).epsilon(1e-12));

    // Independently frozen decimals.
    CHECK(std::fabs(set.members[0].probability - 0.87216) < 1e-3);
    CHECK(std::fabs(set.members[1].probability - 0.08112) < 1e-3);
    CHECK(std::fabs(set.members[2].probability - 0.04672) < 1e-3);

    double sum = 0.0;
    for (const auto& m : set.members) sum += m.probability;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sampling is inverse-CDF in member order over the recorded draw") {
    auto snap = refpool::snapshot();
    auto base = select_base(snap, 70.0, 50.0);
    auto rng = make_stream(17, "policy");
    for (int i = 0; i < 1000; ++i) {
        auto probe = rng;  // replay the next draw independently
        double u = uniform01(probe);
        auto set = build_exploration_set(snap, *base.entry, 70.0, 50.0);
        auto r = normalize_and_sample(set, rng);
        CHECK(r.draw == u);
        CHECK(r.draw >= 0.0);
        CHECK(r.draw < 1.0);
        double cum = 0.0;
        std::size_t want = set.members.size() - 1;
        for (std::size_t k = 0; k < set.members.size(); ++k) {
            cum += set.members[k].probability;
            if (u < cum) {
                want = k;
                break;
            }
        }
        CHECK(r.index == want);
    }
}

TEST_CASE("equal utilities split draws evenly") {
    auto snap = make_snap({{"a", 0.8, 50.0, 1.0}, {"b", 0.8, 50.0, 1.0}});
    auto base = select_base(snap, 100.0, 52.0);
    auto rng = make_stream(23, "policy");
    int first = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto set = build_exploration_set(snap, *base.entry, 100.0, 52.0);
        REQUIRE(set.members.size() == 2);
        auto r = normalize_and_sample(set, rng);
        CHECK(set.members[0].probability == doctest::Approx(0.5).epsilon(1e-12));
        if (r.index == 0) ++first;
    }
    CHECK(std::fabs(double(first) / n - 0.5) < 0.01);
}

TEST_CASE("full selection draws members at their stated probabilities") {
    auto snap = refpool::snapshot();
    auto budget = limits(70.0, 50.0);
    auto rng = make_stream(29, "policy");
    std::map<std::string, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto d = select_modipick(snap, budget, rng);
        REQUIRE(d.path == SelectionPath::normal);
        REQUIRE(d.exploration.has_value());
        counts[d.model_id]++;
    }
    CHECK(std::fabs(counts["InceptionResNetV2"] / double(n) - 0.87216) < 0.005);
    CHECK(std::fabs(counts["InceptionV3"] / double(n) - 0.08112) < 0.005);
    CHECK(std::fabs(counts["InceptionV4"] / double(n) - 0.04672) < 0.005);
}

TEST_CASE("degenerate sets are rejected by the sampler") {
    ExplorationSet empty;
    auto rng = make_stream(31, "policy");
    CHECK_THROWS_AS(normalize_and_sample(empty, rng), std::invalid_argument);

    ExplorationSet zero;
    zero.members.push_back(ExplorationMember{"m", 0.5, 10.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(normalize_and_sample(zero, rng), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Randomized structural properties of the three-stage pipeline
// ---------------------------------------------------------------------------

TEST_CASE("selection invariants hold across randomized pools and limits") {
    std::mt19937_64 gen(424242);
    auto unif = [&gen](double lo, double hi) {
        return lo + (hi - lo) * uniform01(gen);
    };
    auto rng = make_stream(37, "policy");

    for (int iter = 0; iter < 2000; ++iter) {
        CAPTURE(iter);
        int n = 1 + int(gen() % 8);
        std::vector<Row> rows;
        for (int k = 0; k < n; ++k) {
            rows.push_back(Row{"m" + std::to_string(k),
                               0.01 + 0.99 * uniform01(gen),
                               unif(1.0, 200.0),
                               (gen() % 3 == 0) ? 0.0 : unif(0.0, 20.0)});
        }
        auto snap = make_snap(rows);
        double tu = unif(1.0, 250.0);
        double tl = tu - unif(0.0, 150.0);

        // Brute-force stage one.
        const SnapshotEntry* want_base = nullptr;
        for (const auto& e : snap.entries) {
            double m = e.profile.mean_ms, s = e.profile.std_ms();
            if (!(m + s < tu && m - s < tl)) continue;
            if (!want_base || e.accuracy > want_base->accuracy ||
                (e.accuracy == want_base->accuracy &&
                 (m < want_base->profile.mean_ms ||
                  (m == want_base->profile.mean_ms && e.id < want_base->id)))) {
                want_base = &e;
            }
        }

        auto d = select_modipick(snap, limits(tu, tl), rng);
        if (!want_base) {
            CHECK(d.path == SelectionPath::fallback_fastest);
            CHECK_FALSE(d.exploration.has_value());
            continue;
        }
        REQUIRE(d.path == SelectionPath::normal);
        REQUIRE(d.exploration.has_value());
        const auto& set = *d.exploration;
        CHECK(set.base_id == want_base->id);

        double half = std::fabs(tl - want_base->profile.mean_ms) +
                      want_base->profile.std_ms();
        CHECK(set.window.center_ms == tl);
        CHECK(set.window.half_width_ms == doctest::Approx(half).epsilon(1e-12));

        // Membership is exactly the predicate, in registration order; the base
        // anchors the window, so it is a member by construction rather than by
        // re-testing (the re-test can lose to rounding on the window edge).
        std::vector<std::string> want_members;
        for (const auto& e : snap.entries) {
            double m = e.profile.mean_ms, s = e.profile.std_ms();
            bool is_base = e.id == want_base->id;
            if (!is_base) {
                if (!(s > 0.0 || e.accuracy > want_base->accuracy)) continue;
                if (m < tl - half || m > tl + half) continue;
                if (!(m + s < tu)) continue;
            }
            want_members.push_back(e.id);
        }
        REQUIRE(set.members.size() == want_members.size());
        double sum = 0.0;
        bool base_in = false;
        for (std::size_t k = 0; k < set.members.size(); ++k) {
            const auto& m = set.members[k];
            CHECK(m.model_id == want_members[k]);
            CHECK(m.utility > 0.0);
            CHECK(m.probability > 0.0);
            CHECK(m.mean_ms + m.std_ms < tu);
            if (m.model_id != set.base_id) CHECK(set.window.contains(m.mean_ms));
            sum += m.probability;
            if (m.model_id == set.base_id) base_in = true;
        }
        CHECK(base_in);
        CHECK(std::fabs(sum - 1.0) < 1e-9);
        CHECK(d.draw >= 0.0);
        CHECK(d.draw < 1.0);
    }
}

TEST_CASE("probabilities are invariant under uniform accuracy scaling") {
    auto snap = refpool::snapshot();
    auto scaled = snap;
    for (auto& e : scaled.entries) e.accuracy *= 0.5;

    auto b1 = select_base(snap, 70.0, 50.0);
    auto b2 = select_base(scaled, 70.0, 50.0);
    CHECK(b1.entry->id == b2.entry->id);

    auto s1 = build_exploration_set(snap, *b1.entry, 70.0, 50.0);
    auto s2 = build_exploration_set(scaled, *b2.entry, 70.0, 50.0);
    auto r1 = make_stream(41, "policy");
    auto r2 = make_stream(41, "policy");
    normalize_and_sample(s1, r1);
    normalize_and_sample(s2, r2);
    REQUIRE(s1.members.size() == s2.members.size());
    for (std::size_t i = 0; i < s1.members.size(); ++i) {
        CHECK(s2.members[i].utility ==
              doctest::Approx(0.5 * s1.members[i].utility).epsilon(1e-12));
        CHECK(s2.members[i].probability ==
              doctest::Approx(s1.members[i].probability).epsilon(1e-12));
    }
}

// ---------------------------------------------------------------------------
// Greedy baselines
// ---------------------------------------------------------------------------

TEST_CASE("static greedy picks the most accurate model within the SLA") {
    auto snap = refpool::snapshot();
    CHECK(select_static_greedy(snap, 100.0).model_id == "InceptionV4");
    CHECK(select_static_greedy(snap, 1000.0).model_id == "NasNet Large");

    auto no_fit = select_static_greedy(snap, 3.0);
    CHECK(no_fit.path == SelectionPath::fallback_fastest);
    CHECK(no_fit.model_id == "MobileNetV1 0.25");

    // The fit test is non-strict on the limit: at exactly 59.21 InceptionV4
    // (mean 59.21, top-1 0.801) qualifies; a hair below it the best remaining
    // fit is InceptionV3 (0.779).
    CHECK(select_static_greedy(snap, 59.21).model_id == "InceptionV4");
    CHECK(select_static_greedy(snap, 59.20).model_id == "InceptionV3");

    auto zero = select_static_greedy(snap, 0.0);
    CHECK(zero.path == SelectionPath::fallback_fastest);
}

TEST_CASE("dynamic greedy fits against the per-request budget") {
    auto snap = refpool::snapshot();
    CHECK(select_dynamic_greedy(snap, 30.0).model_id == "NasNet Mobile");
    CHECK(select_dynamic_greedy(snap, 134.26).model_id == "NasNet Large");

    auto neg = select_dynamic_greedy(snap, -20.0);
    CHECK(neg.path == SelectionPath::fallback_fastest);
    CHECK(neg.model_id == "MobileNetV1 0.25");
}

TEST_CASE("with exact profiles and a zero threshold the full policy is greedy") {
    auto snap = refpool::snapshot(0.0);  // certainty: believed std = 0
    auto rng = make_stream(43, "policy");
    for (int b = 0; b <= 200; ++b) {
        CAPTURE(b);
        auto greedy = select_dynamic_greedy(snap, double(b));
        auto full = select_modipick(snap, limits(double(b), double(b)), rng);
        CHECK(full.model_id == greedy.model_id);
        CHECK(to_string(full.path) == to_string(greedy.path));
        if (full.path == SelectionPath::normal) {
            REQUIRE(full.exploration.has_value());
            CHECK(full.exploration->members.size() == 1);
        }
    }
}

// ---------------------------------------------------------------------------
// Decomposition baselines
// ---------------------------------------------------------------------------

TEST_CASE("pure random is uniform over the pool") {
    auto snap = refpool::snapshot(1.0, /*with_fictional=*/true);
    auto rng = make_stream(47, "policy");
    std::map<std::string, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto d = select_pure_random(snap, rng);
        CHECK(d.path == SelectionPath::normal);
        CHECK(d.draw >= 0.0);
        CHECK(d.draw < 1.0);
        counts[d.model_id]++;
    }
    REQUIRE(counts.size() == 12);
    for (const auto& [id, c] : counts) {
        CAPTURE(id);
        CHECK(std::fabs(c / double(n) - 1.0 / 12.0) < 0.01);
    }
}

TEST_CASE("related random is uniform over the exploration set only") {
    auto snap = refpool::snapshot();
    auto budget = limits(70.0, 50.0);
    auto rng = make_stream(53, "policy");
    std::map<std::string, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[select_related_random(snap, budget, rng).model_id]++;
    REQUIRE(counts.size() == 3);
    for (const auto& [id, c] : counts) {
        CAPTURE(id);
        CHECK(std::fabs(c / double(n) - 1.0 / 3.0) < 0.01);
    }

    auto wide = refpool::snapshot(1.0, /*with_fictional=*/true);
    auto slow = limits(150.0, 150.0);
    std::map<std::string, int> pair_counts;
    for (int i = 0; i < n; ++i)
        pair_counts[select_related_random(wide, slow, rng).model_id]++;
    REQUIRE(pair_counts.size() == 2);
    CHECK(std::fabs(pair_counts["NasNet Large"] / double(n) - 0.5) < 0.01);
    CHECK(std::fabs(pair_counts["NasNet Fictional"] / double(n) - 0.5) < 0.01);
}

TEST_CASE("related accurate deterministically takes the best member") {
    auto snap = refpool::snapshot();
    auto rng = make_stream(59, "policy");
    auto d = select_related_accurate(snap, limits(70.0, 50.0), rng);
    CHECK(d.model_id == "InceptionV4");
    CHECK(d.path == SelectionPath::normal);
    CHECK(d.draw == -1.0);
    REQUIRE(d.exploration.has_value());
    CHECK(d.exploration->members.size() == 3);
}

TEST_CASE("the anytime variant stops at the base") {
    auto snap = refpool::snapshot();
    auto d = select_modipick_anytime(snap, limits(70.0, 50.0));
    CHECK(d.model_id == "InceptionV3");
    CHECK(d.path == SelectionPath::normal);
    CHECK_FALSE(d.exploration.has_value());
    CHECK(d.draw == -1.0);

    auto fb = select_modipick_anytime(snap, limits(2.0, 2.0));
    CHECK(fb.model_id == "MobileNetV1 0.25");
    CHECK(fb.path == SelectionPath::fallback_fastest);
}

// ---------------------------------------------------------------------------
// Dispatch and input validation
// ---------------------------------------------------------------------------

TEST_CASE("the dispatcher routes the SLA to static and the budget to the rest") {
    auto snap = refpool::snapshot();
    auto budget = limits(30.0, 30.0);
    auto rng = make_stream(61, "policy");
    // Same call, different limit source.
    CHECK(select(PolicyKind::static_greedy, snap, 100.0, budget, rng).model_id ==
          "InceptionV4");
    CHECK(select(PolicyKind::dynamic_greedy, snap, 100.0, budget, rng).model_id ==
          "NasNet Mobile");

    auto r1 = make_stream(67, "policy");
    auto r2 = make_stream(67, "policy");
    auto via_dispatch = select(PolicyKind::modipick, snap, 100.0, limits(70.0, 50.0), r1);
    auto direct = select_modipick(snap, limits(70.0, 50.0), r2);
    CHECK(via_dispatch.model_id == direct.model_id);
    CHECK(via_dispatch.draw == direct.draw);
}

TEST_CASE("profiles without an estimate are invisible to selection") {
    ProfileSnapshot snap;
    ModelProfile seeded;
    seeded.mean_ms = 10.0;
    seeded.seeded = true;
    ModelProfile blank;  // no prior, no observations
    snap.entries.push_back({"ghost", 0.99, blank});
    snap.entries.push_back({"real", 0.50, seeded});

    CHECK(select_static_greedy(snap, 100.0).model_id == "real");
    auto rng = make_stream(71, "policy");
    CHECK(select_modipick(snap, limits(100.0, 50.0), rng).model_id == "real");
    CHECK(select_pure_random(snap, rng).model_id == "real");

    ProfileSnapshot all_blank;
    all_blank.entries.push_back({"ghost", 0.99, blank});
    CHECK_THROWS_AS(select_static_greedy(all_blank, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(select_modipick(all_blank, limits(100.0, 50.0), rng),
                    std::invalid_argument);

    ProfileSnapshot empty;
    CHECK_THROWS_AS(select_pure_random(empty, rng), std::invalid_argument);
}

TEST_CASE("policy names round-trip") {
    for (PolicyKind k : all_policies()) {
        CHECK(policy_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(policy_from_string("bogus"), std::invalid_argument);
    CHECK(std::string(to_string(SelectionPath::normal)) == "normal");
    CHECK(std::string(to_string(SelectionPath::fallback_fastest)) == "fallback_fastest");
}
