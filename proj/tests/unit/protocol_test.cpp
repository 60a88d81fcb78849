#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qnd/protocol.hpp"

using namespace qnd;
using std::numbers::pi;

namespace {

const PreparationParams kAlice{pi / 6, pi / 6};
const PreparationParams kBob{pi / 3, pi / 6};

ProtocolConfig honest_config(std::uint64_t groups = 1) {
    ProtocolConfig cfg;
    cfg.num_groups = groups;
    return cfg;
}

// Exact mode still sizes the check thresholds by group_size; a large
// nominal size keeps them from masking the round trip.
ProtocolConfig exact_config(std::uint64_t groups = 1) {
    ProtocolConfig cfg = honest_config(groups);
    cfg.group_size = 100000000;
    return cfg;
}

GroupOptions exact() {
    GroupOptions o;
    o.exact_probabilities = true;
    return o;
}

std::string source_digits(const PreparationParams& a, const PreparationParams& b, int D) {
    return value_digits(std::cos(a.theta), D) + value_digits(std::cos(a.phi), D) + value_digits(std::cos(b.theta), D) +
           value_digits(std::cos(b.phi), D);
}

}  // namespace

TEST(Checks, AccuracyIdenticalEntriesPass) {
    EXPECT_TRUE(accuracy_check({0.07, 0.02, 0.02, 0.07}, 100));
}

TEST(Checks, AccuracyLargeGapFails) {
    EXPECT_FALSE(accuracy_check({0.3, 0.02, 0.02, 0.1}, 100));
    EXPECT_FALSE(accuracy_check({0.07, 0.25, 0.05, 0.07}, 100));
}

TEST(Checks, AccuracyHonestPassRate) {
    const auto table = honest_probabilities(kAlice, kBob);
    int pass = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto c = sample_counts(table, 100, 1.0, derive_seed(81, s));
        pass += accuracy_check(estimate_probabilities(c), c.n_received);
    }
    EXPECT_GE(pass, 180);
}

TEST(Checks, EavesdropUniformFails) {
    const double u = 1.0 / 16;
    EXPECT_FALSE(eavesdrop_check({u, u, u, u}, 100));
    EXPECT_FALSE(eavesdrop_check({u, u, u, u}, 1000000));
}

TEST(Checks, EavesdropPerfectCorrelationPasses) {
    // cos(phi_a + phi_b) = 1 with theta_a = theta_b = pi/4 - 0.1
    const PreparationParams a{pi / 4 - 0.1, 0.0}, b{pi / 4 - 0.1, 0.0};
    EXPECT_TRUE(eavesdrop_check(conclusive_probabilities(a, b), 100));
}

TEST(Checks, EavesdropFixtureIsMarginalAtHundred) {
    const auto q = conclusive_probabilities(kAlice, kBob);
    const double sep = q.symmetric_mean() - q.antisymmetric_mean();
    const double thr = 2 * accuracy_halfwidth(100, q.sum() / 4);
    EXPECT_NEAR(sep, 6.0 / 128, 1e-15);
    EXPECT_LT(sep, thr);
    EXPECT_TRUE(eavesdrop_check(q, 1000));
}

TEST(Checks, PhiDegeneracy) {
    EXPECT_TRUE(phi_degeneracy_check(0.5, 0.1));
    EXPECT_TRUE(phi_degeneracy_check(-0.5, 0.1));
    EXPECT_FALSE(phi_degeneracy_check(0.05, 0.1));
}

TEST(DigitComparisonTest, MatchingDigitsPass) {
    const auto c = digit_comparison("8358", "8358", 2, 5);
    EXPECT_TRUE(c.pass);
    EXPECT_EQ(c.positions.size(), 2u);
    EXPECT_EQ(c.alice_kept.size(), 2u);
    EXPECT_EQ(c.alice_kept, c.bob_kept);
}

TEST(DigitComparisonTest, MismatchFails) {
    EXPECT_FALSE(digit_comparison("8358", "8368", 4, 5).pass);
    // A mismatch outside the compared positions goes unnoticed.
    const auto pos = comparison_positions(4, 1, 5);
    std::string bob = "8358";
    const int other = pos[0] == 0 ? 1 : 0;
    bob[other] = '0';
    EXPECT_TRUE(digit_comparison("8358", bob, 1, 5).pass);
}

TEST(DigitComparisonTest, PositionsDeterministicSortedDistinct) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto p = comparison_positions(8, 3, s);
        EXPECT_EQ(p, comparison_positions(8, 3, s));
        EXPECT_TRUE(std::is_sorted(p.begin(), p.end()));
        EXPECT_EQ(std::set<int>(p.begin(), p.end()).size(), 3u);
        for (int i : p) EXPECT_TRUE(i >= 0 && i < 8);
    }
    EXPECT_THROW(comparison_positions(4, 5, 0), std::invalid_argument);
    EXPECT_THROW(digit_comparison("12", "123", 1, 0), std::invalid_argument);
}

TEST(DigitComparisonTest, EveryPositionGetsChosen) {
    std::array<int, 4> hits{};
    for (std::uint64_t s = 0; s < 400; ++s)
        for (int p : comparison_positions(4, 1, s)) ++hits[p];
    for (int h : hits) EXPECT_GT(h, 60);
}

TEST(RunGroup, NoiselessRoundTrip) {
    const auto g = run_group(kAlice, kBob, exact_config(), 3, exact());
    EXPECT_TRUE(g.verdicts.all_pass());
    EXPECT_TRUE(g.kept());
    EXPECT_EQ(g.alice_digits, source_digits(kAlice, kBob, 1));
    EXPECT_EQ(g.bob_digits, g.alice_digits);
    EXPECT_EQ(g.kept_digits.size(), 2u);
    EXPECT_EQ(g.kept_digits, g.bob_kept_digits);
}

TEST(RunGroup, FullInterceptFailsEavesdropCheck) {
    auto cfg = honest_config();
    cfg.attack.kind = AttackKind::kInterceptResend;
    cfg.attack.fraction = 1.0;
    const auto g = run_group(kAlice, kBob, cfg, 3, exact());
    EXPECT_FALSE(g.verdicts.eavesdrop);
    EXPECT_FALSE(g.kept());
    EXPECT_TRUE(g.kept_digits.empty());
    cfg.group_size = 100000;
    const auto sampled = run_group(kAlice, kBob, cfg, 4);
    EXPECT_FALSE(sampled.verdicts.eavesdrop);
}

TEST(RunGroup, PhiSumAtRightAngleIsDiscarded) {
    const PreparationParams a{pi / 6, pi / 4}, b{pi / 3, pi / 4};
    const auto g = run_group(a, b, exact_config(), 3, exact());
    EXPECT_FALSE(g.verdicts.phi_degeneracy);
    EXPECT_FALSE(g.kept());
}

TEST(RunGroup, SampledGroupReachesGroupSize) {
    auto cfg = honest_config();
    cfg.channel = {0.2, 25, 1, 0};
    const auto g = run_group(kAlice, kBob, cfg, 11);
    EXPECT_EQ(g.n_received, cfg.group_size);
    EXPECT_GT(g.n_sent, g.n_received);
    EXPECT_EQ(g.counts.n_received, g.n_received);
}

TEST(RunGroup, KeptImpliesAllVerdicts) {
    ProtocolConfig cfg = honest_config();
    cfg.group_size = 2000;
    Rng rng(5);
    int kept = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto [a, b] = draw_group_params(rng, cfg.tolerances);
        const auto g = run_group(a, b, cfg, s);
        ASSERT_EQ(g.kept(), g.verdicts.all_pass());
        if (g.kept()) {
            ++kept;
            ASSERT_EQ(g.kept_digits.size(), 2u);
        } else {
            ASSERT_TRUE(g.kept_digits.empty());
        }
    }
    EXPECT_GT(kept, 0);
}

TEST(Session, ZeroGroupsIsEmpty) {
    const auto r = run_session(honest_config(0));
    EXPECT_TRUE(r.groups.empty());
    EXPECT_TRUE(r.final_key.empty());
    EXPECT_EQ(r.efficiency(), 0.0);
    EXPECT_EQ(r.discard_rate(), 0.0);
}

TEST(Session, Deterministic) {
    auto cfg = honest_config(20);
    cfg.master_seed = 99;
    const auto a = run_session(cfg), b = run_session(cfg);
    EXPECT_EQ(a.final_key, b.final_key);
    ASSERT_EQ(a.groups.size(), b.groups.size());
    for (std::size_t i = 0; i < a.groups.size(); ++i) {
        EXPECT_EQ(a.groups[i].alice_params, b.groups[i].alice_params);
        EXPECT_EQ(a.groups[i].counts.n1010, b.groups[i].counts.n1010);
        EXPECT_EQ(a.groups[i].discard_reason, b.groups[i].discard_reason);
    }
}

TEST(Session, ComparedDigitsNeverReachKey) {
    auto cfg = honest_config(200);
    cfg.digits_per_value = 2;
    cfg.digits_sacrificed = 3;
    cfg.group_size = 5000;
    const auto r = run_session(cfg);
    std::uint64_t total = 0;
    for (const auto& g : r.groups) {
        if (!g.kept()) continue;
        std::string rebuilt;
        for (int i = 0; i < 8; ++i)
            if (!std::binary_search(g.compared_positions.begin(), g.compared_positions.end(), i))
                rebuilt.push_back(g.alice_digits[i]);
        ASSERT_EQ(rebuilt, g.kept_digits);
        ASSERT_EQ(g.kept_digits.size(), 5u);
        total += g.kept_digits.size();
    }
    EXPECT_EQ(r.final_key.size(), total);
    EXPECT_GT(total, 0u);
}

TEST(Session, ExactSoundness) {
    const auto r = run_session(exact_config(100), exact());
    EXPECT_EQ(r.groups_kept, 100u);
    EXPECT_TRUE(r.keys_agree());
    std::string expect;
    for (const auto& g : r.groups) {
        const std::string src = source_digits(g.alice_params, g.bob_params, 1);
        ASSERT_EQ(g.alice_digits, src);
        ASSERT_EQ(g.bob_digits, src);
        expect += g.kept_digits;
    }
    EXPECT_EQ(r.final_key, expect);
    EXPECT_EQ(r.final_key.size(), 200u);
}

TEST(Session, DrawnParamsAreAdmissible) {
    Rng rng(8);
    CheckTolerances tol;
    for (int i = 0; i < 2000; ++i) {
        const auto [a, b] = draw_group_params(rng, tol);
        ASSERT_TRUE(is_admissible(a, tol.theta_margin));
        ASSERT_TRUE(is_admissible(b, tol.theta_margin));
        ASSERT_GE(std::abs(std::cos(a.phi + b.phi)), tol.phi_sum_floor);
    }
}

TEST(Session, DiscardRateMonotoneInFraction) {
    double prev = -1.0;
    for (double f : {0.0, 0.5, 1.0}) {
        auto cfg = honest_config(500);
        cfg.attack.kind = AttackKind::kInterceptResend;
        cfg.attack.fraction = f;
        cfg.master_seed = 2024;
        const double rate = run_session(cfg).discard_rate();
        EXPECT_GE(rate, prev - 0.02) << f;  // allowance for sampling noise
        prev = rate;
    }
}

TEST(Config, ValidationMessagesNameFields) {
    auto expect_field = [](ProtocolConfig cfg, const std::string& field) {
        try {
            cfg.validate();
            FAIL() << field;
        } catch (const std::invalid_argument& e) {
            EXPECT_EQ(std::string(e.what()).rfind(field, 0), 0u) << e.what();
        }
    };
    auto c = honest_config();
    c.group_size = 0;
    expect_field(c, "protocol.group_size");
    c = honest_config();
    c.digits_sacrificed = 5;
    expect_field(c, "protocol.digits_sacrificed");
    c = honest_config();
    c.digits_per_value = 0;
    expect_field(c, "protocol.digits_per_value");
    c = honest_config();
    c.attack.fraction = -1;
    expect_field(c, "attack.fraction");
    c = honest_config();
    c.tolerances.phi_sum_floor = 1.0;
    expect_field(c, "tolerances.phi_sum_floor");
}

TEST(Parties, AnnouncementsUseOnlyOwnOutcomes) {
    Party alice(Role::kAlice, kAlice, 1);
    Party bob(Role::kBob, kBob, 1);
    alice.measure({BellIndex{1, 0}, std::nullopt, BellIndex{0, 1}});
    bob.measure({BellIndex{1, 1}, std::nullopt, BellIndex{1, 0}});
    Transcript t;
    bob.announce(t);
    alice.announce(t);
    ASSERT_EQ(t.record.size(), 3u);
    EXPECT_EQ(t.record[0].alice, Announcement::kPhi10);
    EXPECT_EQ(t.record[0].bob, Announcement::kPhi11);
    EXPECT_EQ(t.record[1].bob, Announcement::kLost);
    EXPECT_EQ(t.record[2].alice, Announcement::kInconclusive);
    alice.estimate(t, Normalization::kReceived, 0.1);
    EXPECT_EQ(alice.counts().n_received, 2u);
    EXPECT_EQ(alice.counts().n1011, 1u);
    EXPECT_EQ(alice.digits().size(), 4u);
}
