// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails.

#include "quni/decision.hpp"
#include "quni/hilbert.hpp"
#include "quni/invariants.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace quni;

namespace {

// runtime limits in seconds
constexpr double kLimitBaselines = 60;
constexpr double kLimitQubit = 120;
constexpr double kLimitTwoQubit = 900;
constexpr double kLimitUniversality = 1200;
constexpr double kLimitCorrespondence = 300;
constexpr double kLimitLazard = 120;

// sample sizes and tolerances
constexpr int kHaarCount = 3;
constexpr int kCorrespondenceCases = 20;
constexpr int kLazardCases = 200;
constexpr int kInvarianceTrials = 50;
constexpr double kGapFloor = 1e3;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Criterion {
 public:
  explicit Criterion(Outcome& o) : o_(o) {}
  void require(bool ok, const std::string& what) {
    if (!ok) {
      o_.pass = false;
      if (!o_.detail.empty()) o_.detail += "; ";
      o_.detail += what;
    }
  }

 private:
  Outcome& o_;
};

bool run(int id, const char* title, double limit, const std::function<void(Criterion&, std::string&)>& body) {
  Outcome o;
  std::string summary;
  const auto start = std::chrono::steady_clock::now();
  try {
    Criterion c(o);
    body(c, summary);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit > 0 && secs > limit) {
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("over time limit");
  }
  std::printf("criterion %d %s: %s (%.1f s)", id, title, o.pass ? "PASS" : "FAIL", secs);
  if (!summary.empty()) std::printf(" [%s]", summary.c_str());
  if (!o.detail.empty()) std::printf(" %s", o.detail.c_str());
  std::printf("\n");
  std::fflush(stdout);
  return o.pass;
}

GateSet set_of(int d, int arity, std::initializer_list<const char*> names) {
  GateSet s{d, arity, {}};
  for (const char* n : names) s.gates.push_back(builtin_gate(n, d, arity));
  return s;
}

std::string str(std::int64_t v) { return std::to_string(v); }

// a small generator family with varied invariant dimensions
std::vector<Matrix> sample_generators(int D, int trial, std::mt19937_64& rng) {
  auto named = [D](const char* name) { return builtin_gate(name, 2, D == 4 ? 2 : 1).matrix(); };
  switch (trial % 5) {
    case 0:
      return {haar_unitary(D, rng), haar_unitary(D, rng)};
    case 1:
      return {haar_unitary(D, rng)};
    case 2:
      return D == 2 ? std::vector<Matrix>{named("H"), named("S")} : std::vector<Matrix>{named("CNOT"), named("SWAP")};
    case 3:
      return D == 2 ? std::vector<Matrix>{named("T")} : std::vector<Matrix>{named("CZ"), named("H")};
    default:
      return D == 2 ? std::vector<Matrix>{named("X"), named("Z")} : std::vector<Matrix>{named("SWAP")};
  }
}

}  // namespace

int main() {
  bool all = true;

  all &= run(1, "baselines", kLimitBaselines, [](Criterion& c, std::string& s) {
    for (int m = 4; m <= 8; ++m) c.require(gl_baseline(m, 4) == 24, "gl_baseline(" + str(m) + ",4) != 24");
    for (int m = 2; m <= 64; ++m) c.require(gl_baseline(m, 2) == 2, "gl_baseline(" + str(m) + ",2) != 2");
    std::vector<std::pair<int, int>> grid;
    for (int m = 1; m <= 64; ++m) {
      std::uint64_t p = 1;
      for (int k = 1; k <= 6; ++k) {
        p *= static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(m);
        if (p > 4096) break;
        grid.emplace_back(m, k);
      }
    }
    grid.emplace_back(3, 4);
    int checked = 0;
    for (const auto& [m, k] : grid) {
      const auto r = haar_oracle(m, k, kHaarCount, static_cast<std::uint64_t>(1000 * m + k));
      const auto expected = static_cast<std::int64_t>(gl_baseline(m, k));
      c.require(r.certain && r.value == expected,
                "haar(" + str(m) + "," + str(k) + ")=" + str(r.value) + " expected " + str(expected));
      ++checked;
    }
    c.require(gl_baseline(2, 4) == 14 && gl_baseline(3, 4) == 23 && gl_baseline(2, 6) == 132, "derived values");
    s = str(checked) + " (m,k) pairs";
  });

  all &= run(2, "completeness D=2", kLimitQubit, [](Criterion& c, std::string& s) {
    const auto ht = check_complete(set_of(2, 1, {"H", "T"}));
    c.require(ht.status == CompletenessStatus::Complete && ht.measured == 132,
              "{H,T} " + std::string(to_string(ht.status)) + " " + str(ht.measured));
    const auto hs = check_complete(set_of(2, 1, {"H", "S"}));
    c.require(hs.status == CompletenessStatus::Incomplete, "{H,S} " + std::string(to_string(hs.status)));
    InvariantOptions dense;
    dense.method = Method::Dense;
    const std::vector<Matrix> clifford{*builtin_gate_matrix("H", 2), *builtin_gate_matrix("S", 2)};
    const auto d = m2k(clifford, 6, dense);
    const auto fg = finite_group_m2k(clifford, 6);
    c.require(fg.has_value() && d.certain && d.value == fg->value, "dense and finite-group values differ");
    s = "{H,T} " + str(ht.measured) + ", {H,S} dense " + str(d.value) + " finite " + (fg ? str(fg->value) : "none");
  });

  all &= run(3, "completeness D=4", kLimitTwoQubit, [](Criterion& c, std::string& s) {
    const auto v = check_complete(set_of(2, 2, {"H", "T", "CNOT"}));
    c.require(v.status == CompletenessStatus::Complete, "status " + std::string(to_string(v.status)));
    c.require(v.measured == 24, "measured " + std::string(v.report.lower_bound ? ">= " : "") + str(v.measured));
    c.require(v.report.method == ReportMethod::SubspaceIteration, "not iterative");
    c.require(v.report.gap_ratio >= kGapFloor, "gap ratio below 1e3");
    std::ostringstream g;
    g << "method " << to_string(v.report.method) << ", gap " << v.report.gap_ratio << ", " << v.report.iterations
      << " iterations";
    s = g.str();
  });

  all &= run(4, "universality decisions", kLimitUniversality, [](Criterion& c, std::string& s) {
    const auto htc = check_universal(set_of(2, 2, {"H", "T", "CNOT"}), 2);
    c.require(htc.status == UniversalityStatus::Universal && htc.N == 2,
              "{H,T,CNOT} " + std::string(to_string(htc.status)));
    c.require(htc.theoretical_bound == 257, "bound " + str(static_cast<std::int64_t>(htc.theoretical_bound)));
    for (int cap : {1, 2, 3, 257}) {
      const auto h = check_universal(set_of(2, 1, {"H"}), cap);
      c.require(h.status == UniversalityStatus::NotUniversal && h.reason == "one-qudit", "{H} cap " + str(cap));
    }
    const auto ht2 = check_N_universal(set_of(2, 1, {"H", "T"}), 2);
    c.require(ht2.status == CompletenessStatus::Incomplete && ht2.measured > 24,
              "{H,T} N=2 " + std::string(to_string(ht2.status)) + " " + str(ht2.measured));
    s = "{H,T,CNOT} N=2 measured " + str(htc.per_N.empty() ? -1 : htc.per_N.back().second.measured) +
        ", {H,T} N=2 measured " + std::string(ht2.report.lower_bound ? ">= " : "") + str(ht2.measured);
  });

  all &= run(5, "bound and NotUniversal rules", 0, [](Criterion& c, std::string& s) {
    c.require(universality_bound(2, 2) == 257, "universality_bound(2,2)");
    c.require(regularity_bound(256, 2) == 257, "regularity_bound(256,2)");
    c.require(universality_bound(3, 2) == 6562, "universality_bound(3,2)");
    DecisionOptions tight;
    tight.invariants.mem_budget_bytes = 256u << 20;
    std::mt19937_64 rng(5);
    std::vector<std::pair<GateSet, int>> cases{
        {set_of(2, 1, {"H"}), 4},           {set_of(2, 1, {"H", "T"}), 2},      {set_of(3, 1, {"SHIFT", "CLOCK"}), 3},
        {set_of(2, 2, {"CNOT"}), 3},        {set_of(2, 2, {"CNOT", "SWAP"}), 3}, {set_of(2, 2, {"CZ"}), 2},
        {set_of(2, 2, {"H", "S", "CNOT"}), 2}, {GateSet{2, 2, {UnitaryGate(2, haar_unitary(4, rng))}}, 3}};
    int not_universal = 0;
    for (const auto& [set, cap] : cases) {
      const auto v = check_universal(set, cap, tight);
      if (v.status != UniversalityStatus::NotUniversal) continue;
      ++not_universal;
      const bool one_qudit = v.reason == "one-qudit" && set.arity == 1 && v.per_N.empty();
      bool exhausted = v.reason == "bound-exhausted" && !v.per_N.empty() &&
                       static_cast<std::uint64_t>(v.per_N.back().first) >= v.theoretical_bound;
      for (const auto& [n, e] : v.per_N) exhausted &= e.status == CompletenessStatus::Incomplete && e.report.certain;
      c.require(one_qudit || exhausted, "NotUniversal with reason '" + v.reason + "'");
      c.require(set.arity == 1, "multi-qudit set below the bound declared NotUniversal");
    }
    s = str(static_cast<std::int64_t>(cases.size())) + " sets, " + str(not_universal) + " NotUniversal";
  });

  all &= run(6, "correspondence", kLimitCorrespondence, [](Criterion& c, std::string& s) {
    Matrix z = Matrix::Zero(2, 2);
    z.diagonal() << 1, -1;
    const std::vector<std::vector<Matrix>> trivial{{Matrix::Identity(2, 2)}, {z}};
    for (const auto& ops : trivial) {
      for (int N = 1; N <= 6; ++N) {
        const auto r = correspondence_check(ops, 2, 1, N);
        c.require(r.lhs == r.rhs, "trivial N=" + str(N) + ": " + str(r.lhs) + " vs " + str(r.rhs));
      }
    }
    int compared = 0;
    for (int i = 0; i < kCorrespondenceCases; ++i) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(600 + i));
      const std::vector<Matrix> ops{haar_unitary(4, rng)};
      for (int N = 2; N <= 4; ++N) {
        const auto r = correspondence_check(ops, 2, 2, N);
        c.require(r.lhs == r.rhs, "seed " + str(600 + i) + " N=" + str(N) + ": " + str(r.lhs) + " vs " + str(r.rhs));
        ++compared;
      }
    }
    s = str(compared + 12) + " comparisons";
  });

  all &= run(7, "regularity bound", kLimitLazard, [](Criterion& c, std::string& s) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> small(1, 3);
    std::uniform_int_distribution<int> extra(0, 2);
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::normal_distribution<double> normal(0.0, 1.0);
    int accepted = 0;
    int drawn = 0;
    int worst = 0;
    while (accepted < kLazardCases) {
      ++drawn;
      const int m = small(rng);
      const int n = small(rng);
      const auto size = static_cast<Eigen::Index>(monomial_count(m, n));
      const bool integer = drawn % 2 == 0;
      GradedIdeal J{m, n, {}};
      const int count = m + extra(rng);
      for (int g = 0; g < count; ++g) {
        Polynomial p{m, n, Vector::Zero(size)};
        for (Eigen::Index i = 0; i < size; ++i) {
          p.coeffs[i] = integer ? cplx(coeff(rng), 0.0) : cplx(normal(rng), normal(rng));
        }
        J.generators.push_back(p);
      }
      const int bound = m * (n - 1) + 1;
      const HilbertTable t = hilbert_table(J, bound + 8);
      RegularityResult r;
      try {
        r = regularity_and_dimension(t);
      } catch (const Error&) {
        c.require(false, "tail did not stabilize for m=" + str(m) + " n=" + str(n));
        ++accepted;
        continue;
      }
      if (r.dimension != 0) continue;
      ++accepted;
      worst = std::max(worst, r.regularity - bound);
      c.require(r.regularity <= bound, "m=" + str(m) + " n=" + str(n) + " regularity " + str(r.regularity));
    }
    s = str(accepted) + " zero-dimensional ideals of " + str(drawn) + " drawn, max regularity - bound " + str(worst);
  });

  all &= run(8, "invariance", 0, [](Criterion& c, std::string& s) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    int phase_checks = 0;
    int basis_checks = 0;
    for (int trial = 0; trial < kInvarianceTrials; ++trial) {
      for (int D : {2, 4}) {
        for (int k : {1, 2}) {
          const auto gens = sample_generators(D, trial, rng);
          const auto base = m2k(gens, k);
          const Matrix q = haar_unitary(D, rng);
          std::vector<Matrix> phased;
          std::vector<Matrix> rotated;
          for (const auto& g : gens) {
            phased.push_back(std::polar(1.0, angle(rng)) * g);
            rotated.push_back(q * g * q.adjoint());
          }
          const auto p = m2k(phased, k);
          const auto b = m2k(rotated, k);
          c.require(base.certain && p.certain && p.value == base.value,
                    "phase trial " + str(trial) + " D=" + str(D) + " k=" + str(k));
          c.require(b.certain && b.value == base.value, "basis trial " + str(trial) + " D=" + str(D) + " k=" + str(k));
          ++phase_checks;
          ++basis_checks;
        }
      }
    }
    int mono_checks = 0;
    for (int trial = 0; trial < kInvarianceTrials; ++trial) {
      const int D = trial % 2 == 0 ? 2 : 4;
      const int k = 1 + (trial / 2) % 2;
      const auto gens = sample_generators(D, trial, rng);
      std::vector<Matrix> larger = gens;
      larger.push_back(trial % 3 == 0 ? sample_generators(D, trial + 2, rng).front() : haar_unitary(D, rng));
      const auto before = m2k(gens, k);
      const auto after = m2k(larger, k);
      c.require(before.certain && after.certain && after.value <= before.value,
                "monotonicity trial " + str(trial) + ": " + str(after.value) + " > " + str(before.value));
      ++mono_checks;
    }
    const auto violations = baseline_audit().violations.load();
    c.require(violations == 0, str(static_cast<std::int64_t>(violations)) + " certain reports below baseline");
    s = str(phase_checks) + " phase, " + str(basis_checks) + " basis, " + str(mono_checks) + " monotonicity, " +
        str(static_cast<std::int64_t>(baseline_audit().checked.load())) + " audited reports";
  });

  return all ? 0 : 1;
}
