#include "quni/decision.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace quni;

namespace {

GateSet set_of(int d, int arity, std::initializer_list<const char*> names) {
  GateSet s{d, arity, {}};
  for (const char* n : names) s.gates.push_back(builtin_gate(n, d, arity));
  return s;
}

}  // namespace

TEST(RegularityBound, Values) {
  EXPECT_EQ(regularity_bound(256, 2), 257u);
  EXPECT_EQ(regularity_bound(2, 2), 3u);
  EXPECT_EQ(regularity_bound(256, 6), 1281u);
  EXPECT_EQ(universality_bound(2, 2), 257u);
  EXPECT_EQ(universality_bound(2, 6), 1281u);
  EXPECT_EQ(universality_bound(3, 2), 6562u);
  EXPECT_THROW(regularity_bound(0, 2), Error);
}

TEST(CheckComplete, HadamardAndT) {
  const auto v = check_complete(set_of(2, 1, {"H", "T"}));
  EXPECT_EQ(v.status, CompletenessStatus::Complete);
  EXPECT_EQ(v.k_used, 6);
  EXPECT_EQ(v.baseline, 132u);
  EXPECT_EQ(v.measured, 132);
  EXPECT_FALSE(v.finite_order.has_value());
}

TEST(CheckComplete, CliffordIsIncompleteByBothOracles) {
  const auto v = check_complete(set_of(2, 1, {"H", "S"}));
  EXPECT_EQ(v.status, CompletenessStatus::Incomplete);
  ASSERT_TRUE(v.finite_order.has_value());
  EXPECT_EQ(v.report.method, ReportMethod::FiniteGroupCharacter);
  EXPECT_GT(v.measured, 132);

  DecisionOptions no_shortcut;
  no_shortcut.finite_group_shortcut = false;
  const auto numeric = check_complete(set_of(2, 1, {"H", "S"}), no_shortcut);
  EXPECT_EQ(numeric.status, CompletenessStatus::Incomplete);
  EXPECT_EQ(numeric.measured, v.measured);
  EXPECT_EQ(numeric.report.method, ReportMethod::HermitianDense);
}

TEST(CheckComplete, QutritUsesItsOwnBaseline) {
  const auto weyl = check_complete(set_of(3, 1, {"SHIFT", "CLOCK"}));
  EXPECT_EQ(weyl.status, CompletenessStatus::Incomplete);
  EXPECT_EQ(weyl.baseline, 23u);
  EXPECT_EQ(*weyl.finite_order, 27u);

  std::mt19937_64 rng(3);
  GateSet random{3, 1, {UnitaryGate(3, haar_unitary(3, rng)), UnitaryGate(3, haar_unitary(3, rng))}};
  const auto v = check_complete(random);
  EXPECT_EQ(v.status, CompletenessStatus::Complete);
  EXPECT_EQ(v.measured, 23);
}

TEST(CheckComplete, ResourceExhaustionIsUncertain) {
  DecisionOptions opts;
  opts.invariants.mem_budget_bytes = 64u << 20;
  const auto v = check_N_universal(set_of(2, 2, {"H", "T", "CNOT"}), 3, opts);
  EXPECT_EQ(v.status, CompletenessStatus::Uncertain);
  EXPECT_NE(v.diagnostics.find("MemoryBudget"), std::string::npos);
}

TEST(CheckComplete, Deterministic) {
  const auto a = check_complete(set_of(2, 1, {"H", "T"}));
  const auto b = check_complete(set_of(2, 1, {"H", "T"}));
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.measured, b.measured);
  EXPECT_EQ(a.report.gap_ratio, b.report.gap_ratio);
}

TEST(CheckNUniversal, CnotAloneIsFinite) {
  const auto v = check_N_universal(set_of(2, 2, {"CNOT"}), 2);
  EXPECT_EQ(v.status, CompletenessStatus::Incomplete);
  EXPECT_TRUE(v.finite_order.has_value());
  EXPECT_EQ(v.k_used, 4);
  EXPECT_EQ(v.baseline, 24u);
}

TEST(CheckNUniversal, StatusIndependentOfSymmetricGroupGenerators) {
  const GateSet cnot = set_of(2, 2, {"CNOT"});
  for (int N : {2, 3}) {
    const auto standard = check_N_universal(cnot, N);
    std::vector<UnitaryGate> alt{extend_to_N(cnot.gates[0], N)};
    for (int i = 0; i + 1 < N; ++i) {
      alt.push_back(UnitaryGate::permutation(2, FactorPermutation::transposition(N, i, i + 1)));
    }
    const auto other = check_complete(alt);
    EXPECT_EQ(standard.status, other.status) << "N=" << N;
    EXPECT_EQ(standard.measured, other.measured) << "N=" << N;
  }
}

TEST(CheckUniversal, OneQuditSetsAreNeverUniversal) {
  for (int cap : {1, 2, 5}) {
    const auto v = check_universal(set_of(2, 1, {"H"}), cap);
    EXPECT_EQ(v.status, UniversalityStatus::NotUniversal);
    EXPECT_EQ(v.reason, "one-qudit");
    EXPECT_TRUE(v.per_N.empty());
  }
}

TEST(CheckUniversal, CnotSweepIsInconclusive) {
  const auto v = check_universal(set_of(2, 2, {"CNOT"}), 3);
  EXPECT_EQ(v.status, UniversalityStatus::Inconclusive);
  EXPECT_EQ(v.N, 3);
  EXPECT_EQ(v.theoretical_bound, 257u);
  ASSERT_EQ(v.per_N.size(), 2u);
  for (const auto& [N, verdict] : v.per_N) {
    EXPECT_EQ(verdict.status, CompletenessStatus::Incomplete) << "N=" << N;
    EXPECT_GE(static_cast<std::uint64_t>(verdict.measured), verdict.baseline);
  }
  EXPECT_THROW(check_universal(set_of(2, 2, {"CNOT"}), 1), Error);
}

TEST(CheckUniversal, UncertainEntryForcesInconclusive) {
  DecisionOptions opts;
  opts.invariants.mem_budget_bytes = 16u << 20;
  opts.finite_group_shortcut = false;
  const auto v = check_universal(set_of(2, 2, {"H", "T", "CNOT"}), 2, opts);
  EXPECT_EQ(v.status, UniversalityStatus::Inconclusive);
  ASSERT_EQ(v.per_N.size(), 1u);
  EXPECT_EQ(v.per_N[0].second.status, CompletenessStatus::Uncertain);
}
