#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qnd/analytic.hpp"
#include "qnd/qmath.hpp"
#include "qnd/sampling.hpp"

using namespace qnd;

namespace {

constexpr double kTol = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void expect_amps(const PureState& s, std::initializer_list<cplx> want) {
    ASSERT_EQ(s.size(), want.size());
    std::size_t i = 0;
    for (const auto& w : want) {
        EXPECT_NEAR(std::abs(s[i] - w), 0.0, kTol) << "index " << i;
        ++i;
    }
}

PureState random_site(Rng& rng, int d) {
    std::vector<cplx> c(d);
    for (auto& v : c) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    double n = 0;
    for (auto& v : c) n += std::norm(v);
    for (auto& v : c) v /= std::sqrt(n);
    return PureState::site(c);
}

}  // namespace

TEST(BellState, QubitPhiPlus) { expect_amps(bell_state(2, {0, 0}), {kInvSqrt2, 0, 0, kInvSqrt2}); }

TEST(BellState, QubitPsiMinus) { expect_amps(bell_state(2, {1, 1}), {0, kInvSqrt2, -kInvSqrt2, 0}); }

TEST(BellState, QubitRemainingTwo) {
    expect_amps(bell_state(2, {0, 1}), {kInvSqrt2, 0, 0, -kInvSqrt2});
    expect_amps(bell_state(2, {1, 0}), {0, kInvSqrt2, kInvSqrt2, 0});
}

TEST(BellState, QutritShiftOne) {
    const auto s = bell_state(3, {1, 0});
    const double c = 1.0 / std::sqrt(3.0);
    for (std::size_t i = 0; i < 9; ++i) {
        const bool on = i == 1 || i == 5 || i == 6;  // |01>, |12>, |20>
        EXPECT_NEAR(std::abs(s[i] - cplx(on ? c : 0.0)), 0.0, kTol) << i;
    }
}

TEST(BellState, RejectsBadInput) {
    EXPECT_THROW(bell_state(1, {0, 0}), std::invalid_argument);
    EXPECT_THROW(bell_state(2, {2, 0}), std::invalid_argument);
    EXPECT_THROW(bell_state(3, {0, -1}), std::invalid_argument);
}

TEST(BellState, OrthonormalUpToFive) {
    for (int d = 2; d <= 5; ++d) {
        for (int s = 0; s < d; ++s)
            for (int p = 0; p < d; ++p)
                for (int s2 = 0; s2 < d; ++s2)
                    for (int p2 = 0; p2 < d; ++p2) {
                        const cplx ip = inner(bell_state(d, {s, p}), bell_state(d, {s2, p2}));
                        const double want = (s == s2 && p == p2) ? 1.0 : 0.0;
                        ASSERT_NEAR(std::abs(ip - want), 0.0, kTol) << d << ' ' << s << p << s2 << p2;
                    }
    }
}

TEST(BellIndex, Reduced) {
    const auto b = BellIndex::reduced(-1, 7, 3);
    EXPECT_EQ(b.shift, 2);
    EXPECT_EQ(b.phase, 1);
}

TEST(PureStateTest, Validation) {
    EXPECT_THROW(PureState(1, 1, {1.0}), std::invalid_argument);
    EXPECT_THROW(PureState(2, 0, {}), std::invalid_argument);
    EXPECT_THROW(PureState(2, 2, {1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(PureState(2, 1, {1.0, 1.0}), std::invalid_argument);
    EXPECT_NO_THROW(PureState(2, 1, {0.6, 0.8}));
}

TEST(PureStateTest, NormalizedScales) {
    const auto s = PureState::normalized(2, 1, {3.0, 4.0});
    EXPECT_NEAR(s[0].real(), 0.6, kTol);
    EXPECT_NEAR(s[1].real(), 0.8, kTol);
    EXPECT_THROW(PureState::normalized(2, 1, {0.0, 0.0}), std::invalid_argument);
}

TEST(PureStateTest, BasisIsBigEndian) {
    const int digits[] = {1, 0, 1};
    const auto s = PureState::basis(2, digits);
    EXPECT_EQ(s.num_sites(), 3);
    EXPECT_EQ(s[5], cplx(1.0));
}

TEST(Tensor, SingleIsIdentity) {
    const int zero[] = {0};
    const auto s = PureState::basis(2, zero);
    expect_amps(tensor({s}), {1.0, 0.0});
}

TEST(Tensor, BasisProductIsSiteMajor) {
    const int zero[] = {0}, one[] = {1};
    const auto s = tensor({PureState::basis(2, zero), PureState::basis(2, one)});
    expect_amps(s, {0.0, 1.0, 0.0, 0.0});
}

TEST(Tensor, PlusPlusIsUniform) {
    const auto plus = PureState::site({kInvSqrt2, kInvSqrt2});
    expect_amps(tensor({plus, plus}), {0.5, 0.5, 0.5, 0.5});
}

TEST(Tensor, RejectsMixedDims) {
    const auto q = PureState::site({1.0, 0.0});
    const auto t = PureState::site({1.0, 0.0, 0.0});
    EXPECT_THROW(tensor({q, t}), std::invalid_argument);
}

TEST(Tensor, RejectsOversizedComposite) {
    const auto s = PureState::site({1.0, 0.0, 0.0, 0.0, 0.0});
    std::vector<PureState> seven(7, s);
    EXPECT_THROW(tensor(seven), std::invalid_argument);
}

TEST(JointBell, ProductOfBellPairs) {
    const auto s = tensor({bell_state(2, {0, 0}), bell_state(2, {0, 0})});
    const auto t = joint_bell_coefficients(s, {{0, 1}, {2, 3}});
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(std::abs(t.entries[i] - cplx(i == 0 ? 1.0 : 0.0)), 0.0, kTol);
}

TEST(JointBell, MixedLabelsLandOnTheirEntry) {
    const auto s = tensor({bell_state(3, {2, 1}), bell_state(3, {0, 2})});
    const auto t = joint_bell_coefficients(s, {{0, 1}, {2, 3}});
    EXPECT_NEAR(std::abs(t.at({{2, 1}, {0, 2}})), 1.0, kTol);
    EXPECT_NEAR(total(squared_magnitudes(t)), 1.0, kTol);
}

TEST(JointBell, UnitPreparationsGiveEightEqualEntries) {
    const PreparationParams zero{0.0, 0.0};
    const auto t = joint_bell_coefficients(honest_state(zero, zero), honest_pairing());
    int nonzero = 0;
    for (const auto& e : t.entries) {
        if (std::abs(e) > 1e-9) {
            ++nonzero;
            EXPECT_NEAR(std::abs(e), 1.0 / (2.0 * std::sqrt(2.0)), kTol);
        }
    }
    EXPECT_EQ(nonzero, 8);
}

TEST(JointBell, RejectsBadPairings) {
    const auto s = tensor({bell_state(2, {0, 0}), bell_state(2, {0, 0})});
    EXPECT_THROW(joint_bell_coefficients(s, {{0, 1}, {1, 2}}), std::invalid_argument);
    EXPECT_THROW(joint_bell_coefficients(s, {{0, 1}}), std::invalid_argument);
    EXPECT_THROW(joint_bell_coefficients(s, {{0, 0}, {2, 3}}), std::invalid_argument);
    EXPECT_THROW(joint_bell_coefficients(s, {{0, 4}, {2, 3}}), std::invalid_argument);
    const auto six = tensor({bell_state(2, {0, 0}), bell_state(2, {0, 0}), bell_state(2, {0, 0})});
    EXPECT_THROW(joint_bell_coefficients(six, {{0, 1}, {2, 3}}), std::invalid_argument);
    EXPECT_THROW(joint_bell_coefficients_6(s, {{0, 1}, {2, 3}}), std::invalid_argument);
}

TEST(JointBell, NormConservedOnRandomInputs) {
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const int d = 2 + t % 3;
        const auto s = tensor({random_site(rng, d), random_site(rng, d), random_site(rng, d), random_site(rng, d)});
        const auto tab = joint_bell_coefficients(s, {{0, 2}, {1, 3}});
        ASSERT_NEAR(total(squared_magnitudes(tab)), 1.0, kTol);
    }
}

TEST(JointBell, ReconstructionRoundTrip) {
    Rng rng(12);
    for (int d = 2; d <= 3; ++d) {
        const auto s = tensor({random_site(rng, d), bell_state(d, {1, 0}), random_site(rng, d)});
        const Pairing pairing{{0, 2}, {1, 3}};
        const auto tab = joint_bell_coefficients(s, pairing);
        std::vector<cplx> acc(s.size());
        for (std::size_t f = 0; f < tab.size(); ++f) {
            const auto labels = tab.labels(f);
            const auto basis = bell_product_state(d, pairing, labels);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += tab.entries[f] * basis[i];
        }
        for (std::size_t i = 0; i < acc.size(); ++i) ASSERT_NEAR(std::abs(acc[i] - s[i]), 0.0, kTol);
    }
}

TEST(JointBell6, AlignedBellPairsGiveSingleEntry) {
    const auto s = tensor({bell_state(2, {1, 0}), bell_state(2, {0, 1}), bell_state(2, {1, 1})});
    const auto t = joint_bell_coefficients_6(s, {{0, 1}, {2, 3}, {4, 5}});
    EXPECT_NEAR(std::abs(t.at({{1, 0}, {0, 1}, {1, 1}})), 1.0, kTol);
    EXPECT_NEAR(total(squared_magnitudes(t)), 1.0, kTol);
}

TEST(JointBell6, EntangleStateConservesNorm) {
    Rng rng(13);
    for (int t = 0; t < 10; ++t) {
        const PreparationParams a{rng.uniform(0, 1.5), rng.uniform(0, 1.5)};
        const PreparationParams b{rng.uniform(0, 1.5), rng.uniform(0, 1.5)};
        const PreparationParams e{rng.uniform(0, 1.5), rng.uniform(0, 1.5)};
        const auto tab = joint_bell_coefficients_6(entangle_measure_state(a, b, e), entangle_measure_pairing());
        ASSERT_NEAR(total(squared_magnitudes(tab)), 1.0, kTol);
    }
}

TEST(Tables, QubitIndexLayout) {
    EXPECT_EQ(qubit_index(1, 0, 1, 0), 10u);
    EXPECT_EQ(qubit_index(1, 0, 1, 1), 11u);
    EXPECT_EQ(qubit_index(1, 1, 1, 0), 14u);
    EXPECT_EQ(qubit_index(1, 1, 1, 1), 15u);
    ProbabilityTable t(2, 2);
    const BellIndex labels[] = {{1, 1}, {1, 0}};
    EXPECT_EQ(t.flat(labels), 14u);
    const auto back = t.labels(14);
    EXPECT_EQ(back[0].shift, 1);
    EXPECT_EQ(back[0].phase, 1);
    EXPECT_EQ(back[1].shift, 1);
    EXPECT_EQ(back[1].phase, 0);
}

TEST(Tables, MarginalizeLastPair) {
    ProbabilityTable t(2, 3);
    ASSERT_EQ(t.size(), 64u);
    for (auto& e : t.entries) e = 1.0 / 64;
    const auto m = marginalize_last_pair(t);
    EXPECT_EQ(m.arity, 2);
    for (double e : m.entries) EXPECT_NEAR(e, 1.0 / 16, kTol);
}

TEST(Math, RootOfUnity) {
    EXPECT_NEAR(std::abs(root_of_unity(4, 1) - cplx(0, 1)), 0.0, kTol);
    EXPECT_NEAR(std::abs(root_of_unity(3, -1) - root_of_unity(3, 2)), 0.0, kTol);
    EXPECT_EQ(ipow(5, 6), 15625u);
}
