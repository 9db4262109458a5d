#pragma once

// Completeness, N-universality and universality verdicts.

#include "quni/core.hpp"
#include "quni/gateset.hpp"
#include "quni/invariants.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace quni {

enum class CompletenessStatus { Complete, Incomplete, Uncertain };

inline std::string_view to_string(CompletenessStatus s) {
  switch (s) {
    case CompletenessStatus::Complete: return "Complete";
    case CompletenessStatus::Incomplete: return "Incomplete";
    case CompletenessStatus::Uncertain: return "Uncertain";
  }
  return "Uncertain";
}

struct CompletenessVerdict {
  CompletenessStatus status = CompletenessStatus::Uncertain;
  int k_used = 4;
  std::int64_t measured = 0;
  std::uint64_t baseline = 0;
  InvariantReport report;
  /// Group order when the closure shortcut certified the verdict.
  std::optional<std::size_t> finite_order;
  std::string diagnostics;
};

struct DecisionOptions {
  InvariantOptions invariants;
  /// Try closing the generated group before any fixed-space computation.
  bool finite_group_shortcut = true;
  std::size_t closure_cap = kDefaultClosureCap;
};

/// m(n−1)+1, the bound on the regularity of a zero-dimensional ideal
/// generated in degree n in m variables.
inline std::uint64_t regularity_bound(std::uint64_t m, std::uint64_t n) {
  if (m < 1 || n < 1) {
    throw Error(ErrorKind::InvalidArgument, "regularity_bound needs m, n >= 1");
  }
  if (n - 1 != 0 && m > (UINT64_MAX - 1) / (n - 1)) {
    throw Error(ErrorKind::InvalidArgument, "regularity bound overflows 64 bits");
  }
  return m * (n - 1) + 1;
}

/// d⁸(n−1)+1.
inline std::uint64_t universality_bound(int d, int n) {
  return regularity_bound(checked_pow(static_cast<std::uint64_t>(d), 8), static_cast<std::uint64_t>(n));
}

namespace detail {

inline bool closure_fits(std::uint64_t D, const DecisionOptions& opts) {
  if (D > 64) {
    return false;
  }
  // elements plus their bucket keys
  const double bytes = static_cast<double>(opts.closure_cap) * static_cast<double>(D * D) * 2.0 * sizeof(cplx);
  return bytes <= static_cast<double>(opts.invariants.mem_budget_bytes);
}

inline CompletenessVerdict classify(CompletenessVerdict v) {
  if (!v.report.certain) {
    v.status = CompletenessStatus::Uncertain;
    if (v.diagnostics.empty()) {
      v.diagnostics = v.report.note.empty() ? "invariant count is not certain" : v.report.note;
    }
  } else if (v.report.lower_bound) {
    v.status = static_cast<std::uint64_t>(v.measured) > v.baseline ? CompletenessStatus::Incomplete
                                                                    : CompletenessStatus::Uncertain;
  } else if (static_cast<std::uint64_t>(v.measured) == v.baseline) {
    v.status = CompletenessStatus::Complete;
  } else if (static_cast<std::uint64_t>(v.measured) > v.baseline) {
    v.status = CompletenessStatus::Incomplete;
  } else {
    v.status = CompletenessStatus::Uncertain;
    v.diagnostics = "measured value below the full-group baseline";
  }
  return v;
}

}  // namespace detail

/// Decides whether the gates generate a dense subgroup of U(D) by comparing
/// M_8 (M_12 when D = 2) with the full-group value.
inline CompletenessVerdict check_complete(const std::vector<UnitaryGate>& gates, const DecisionOptions& opts = {}) {
  if (gates.empty()) {
    throw Error(ErrorKind::InvalidArgument, "check_complete needs at least one gate");
  }
  const std::uint64_t D = gates.front().dim();
  if (D < 2) {
    throw Error(ErrorKind::InvalidArgument, "completeness needs dimension at least 2");
  }
  CompletenessVerdict v;
  v.k_used = D > 2 ? 4 : 6;
  v.baseline = gl_baseline(static_cast<int>(std::min<std::uint64_t>(D, 64)), v.k_used);
  v.report.k = v.k_used;

  if (opts.finite_group_shortcut && detail::closure_fits(D, opts)) {
    std::vector<Matrix> dense;
    for (const auto& g : gates) dense.push_back(g.matrix(64));
    try {
      if (auto fg = finite_group_m2k(dense, v.k_used, opts.closure_cap)) {
        v.finite_order = fg->order;
        v.measured = fg->value;
        v.report.value = fg->value;
        v.report.method = ReportMethod::FiniteGroupCharacter;
        v.report.certain = true;
        v.report.gap_ratio = kGapCap;
        v.report.tolerance = 1e-6;
        v.report.total_dim = static_cast<std::size_t>(checked_pow(D, static_cast<unsigned>(2 * v.k_used)));
        v.report.note = "finite group of order " + std::to_string(fg->order);
        return detail::classify(std::move(v));
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NumericallyAmbiguous) throw;
    }
  }

  InvariantOptions inv = opts.invariants;
  inv.stop_above = static_cast<std::size_t>(v.baseline) + 1;
  try {
    v.report = m2k(gates, v.k_used, inv);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::MemoryBudget && e.kind() != ErrorKind::OverDenseLimit &&
        e.kind() != ErrorKind::NumericallyAmbiguous) {
      throw;
    }
    v.status = CompletenessStatus::Uncertain;
    v.diagnostics = std::string(to_string(e.kind())) + ": " + e.what();
    return v;
  }
  v.measured = v.report.value;
  return detail::classify(std::move(v));
}

inline CompletenessVerdict check_complete(const GateSet& set, const DecisionOptions& opts = {}) {
  set.validate();
  return check_complete(set.gates, opts);
}

/// Completeness of Γ_N ∪ Σ on (C^d)^{⊗N}.
inline CompletenessVerdict check_N_universal(const GateSet& set, int N, const DecisionOptions& opts = {}) {
  return check_complete(universality_generators(set, N), opts);
}

enum class UniversalityStatus { Universal, NotUniversal, Inconclusive };

inline std::string_view to_string(UniversalityStatus s) {
  switch (s) {
    case UniversalityStatus::Universal: return "Universal";
    case UniversalityStatus::NotUniversal: return "NotUniversal";
    case UniversalityStatus::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

struct UniversalityVerdict {
  UniversalityStatus status = UniversalityStatus::Inconclusive;
  /// N₀ for Universal, the largest N tried for Inconclusive.
  int N = 0;
  /// "one-qudit" or "bound-exhausted" for NotUniversal.
  std::string reason;
  std::uint64_t theoretical_bound = 0;
  std::vector<std::pair<int, CompletenessVerdict>> per_N;
};

/// Sweeps N = n, n+1, … up to min(capN, d⁸(n−1)+1).
inline UniversalityVerdict check_universal(const GateSet& set, int capN, const DecisionOptions& opts = {}) {
  set.validate();
  UniversalityVerdict out;
  out.theoretical_bound = universality_bound(set.d, set.arity);
  if (set.arity == 1) {
    out.status = UniversalityStatus::NotUniversal;
    out.reason = "one-qudit";
    return out;
  }
  if (capN < set.arity) {
    throw Error(ErrorKind::InvalidArgument, "capN must be at least the gate arity");
  }
  const auto last = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(capN), out.theoretical_bound));
  bool all_incomplete = true;
  for (int N = set.arity; N <= last; ++N) {
    CompletenessVerdict v = check_N_universal(set, N, opts);
    const CompletenessStatus status = v.status;
    out.per_N.emplace_back(N, std::move(v));
    if (status == CompletenessStatus::Complete) {
      out.status = UniversalityStatus::Universal;
      out.N = N;
      return out;
    }
    all_incomplete = all_incomplete && status == CompletenessStatus::Incomplete;
  }
  if (all_incomplete && static_cast<std::uint64_t>(last) == out.theoretical_bound) {
    out.status = UniversalityStatus::NotUniversal;
    out.reason = "bound-exhausted";
    return out;
  }
  out.status = UniversalityStatus::Inconclusive;
  out.N = last;
  return out;
}

}  // namespace quni
