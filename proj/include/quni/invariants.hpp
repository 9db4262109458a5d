#pragma once

// Dimensions of common fixed spaces: M_{2k} of gate sets, the full-group
// baseline from Schur–Weyl duality, and two independent oracles (character
// averaging over finite groups, Haar-random generators).

#include "quni/core.hpp"
#include "quni/gateset.hpp"
#include "quni/linalg.hpp"
#include "quni/tensorop.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace quni {

enum class Method { Auto, Dense, Iterative };

enum class ReportMethod { DenseSvd, HermitianDense, SubspaceIteration, FiniteGroupCharacter };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Dense: return "dense";
    case Method::Iterative: return "iterative";
  }
  return "auto";
}

inline std::string_view to_string(ReportMethod m) {
  switch (m) {
    case ReportMethod::DenseSvd: return "dense-svd";
    case ReportMethod::HermitianDense: return "hermitian-dense";
    case ReportMethod::SubspaceIteration: return "subspace-iteration";
    case ReportMethod::FiniteGroupCharacter: return "finite-group-character";
  }
  return "unknown";
}

inline Method parse_method(std::string_view s) {
  if (s == "auto") return Method::Auto;
  if (s == "dense") return Method::Dense;
  if (s == "iterative") return Method::Iterative;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(s) + "'");
}

struct InvariantOptions {
  Method method = Method::Auto;
  std::uint64_t seed = 0;
  std::size_t dense_limit = kDefaultDenseLimit;
  std::size_t mem_budget_bytes = std::size_t{4096} << 20;
  /// Initial block size of subspace iteration; 0 picks 16.
  int block_size = 0;
  int max_iterations = 500;
  /// Degree of the Chebyshev filter applied between Rayleigh–Ritz steps.
  int filter_degree = 12;
  /// Upper end of the interval the Chebyshev filter damps, unless the block
  /// already resolves a lower one.
  double filter_cut = 0.8;
  /// Subspace iteration stops once this many fixed vectors are certain
  /// (0 disables); the report then holds a lower bound.
  std::size_t stop_above = 0;
  /// Random words in the generators (and inverses) added to the averaging
  /// operator of subspace iteration. They are group elements, so the common
  /// fixed space is unchanged while the spectral gap widens.
  int mixing_words = 4;
  int word_length = 32;
  /// Relative zero threshold for dense spectra.
  double zero_tol = kZeroThreshold;
  /// Optional progress sink (iteration diagnostics).
  std::function<void(const std::string&)> log;
};

struct InvariantReport {
  int k = 0;
  std::int64_t value = 0;
  ReportMethod method = ReportMethod::HermitianDense;
  double gap_ratio = kGapCap;
  double tolerance = kZeroThreshold;
  bool certain = false;
  int iterations = 0;
  std::size_t total_dim = 0;
  /// `value` is only a lower bound on the fixed-space dimension.
  bool lower_bound = false;
  std::string note;
};

// --- Schur–Weyl baseline ----------------------------------------------------

namespace detail {

inline void partitions(int remaining, int max_part, int max_rows, std::vector<int>& current,
                       const std::function<void(const std::vector<int>&)>& visit) {
  if (remaining == 0) {
    visit(current);
    return;
  }
  if (static_cast<int>(current.size()) == max_rows) {
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    current.push_back(part);
    partitions(remaining - part, part, max_rows, current, visit);
    current.pop_back();
  }
}

/// Number of standard Young tableaux of shape λ (hook length formula).
inline std::uint64_t standard_tableaux(const std::vector<int>& shape) {
  int k = 0;
  for (int r : shape) k += r;
  std::vector<int> column_len(shape.empty() ? 0 : static_cast<std::size_t>(shape.front()), 0);
  for (int r : shape) {
    for (int c = 0; c < r; ++c) ++column_len[static_cast<std::size_t>(c)];
  }
  // k!/∏hooks, accumulated as a reduced fraction to stay exact
  unsigned __int128 num = 1;
  unsigned __int128 den = 1;
  for (int i = 2; i <= k; ++i) num *= static_cast<unsigned>(i);
  for (std::size_t row = 0; row < shape.size(); ++row) {
    for (int c = 0; c < shape[row]; ++c) {
      const int arm = shape[row] - c - 1;
      const int leg = column_len[static_cast<std::size_t>(c)] - static_cast<int>(row) - 1;
      den *= static_cast<unsigned>(arm + leg + 1);
    }
  }
  return static_cast<std::uint64_t>(num / den);
}

}  // namespace detail

/// M_{2k}(GL_m(C)) = Σ_{λ ⊢ k, ≤ m rows} (f^λ)²; equals k! when k ≤ m.
inline std::uint64_t gl_baseline(int m, int k) {
  if (m < 1 || k < 1) {
    throw Error(ErrorKind::InvalidArgument, "gl_baseline needs m, k >= 1");
  }
  if (k > 20) {
    throw Error(ErrorKind::InvalidArgument, "gl_baseline supports k <= 20");
  }
  std::uint64_t total = 0;
  std::vector<int> current;
  detail::partitions(k, k, m, current, [&](const std::vector<int>& shape) {
    const std::uint64_t f = detail::standard_tableaux(shape);
    total += f * f;
  });
  return total;
}

// --- audit of certain reports -------------------------------------------------

/// Process-wide tally of certain M_{2k} reports that fell below the
/// full-group baseline. Any nonzero count is a numerical defect.
struct BaselineAudit {
  std::atomic<long> checked{0};
  std::atomic<long> violations{0};
};

inline BaselineAudit& baseline_audit() {
  static BaselineAudit audit;
  return audit;
}

// --- fixed-space dimension ------------------------------------------------------

namespace detail {

inline void emit(const InvariantOptions& opts, const std::string& msg) {
  if (opts.log) opts.log(msg);
}

/// Spectral decomposition of every slot of a Kronecker-form operator.
struct SlotSpectra {
  std::vector<UnitaryEigen> slots;
};

inline SlotSpectra slot_spectra(const std::vector<Matrix>& slots) {
  SlotSpectra out;
  for (const auto& m : slots) {
    out.slots.push_back(unitary_eigen(m));
  }
  return out;
}

/// Product-basis indices whose eigenvalue product is within `tol` of 1.
/// With a null `out`, indices are counted but not stored.
inline std::size_t candidate_indices(const SlotSpectra& spectra, double tol, std::vector<std::uint32_t>* out) {
  const std::size_t slots = spectra.slots.size();
  std::vector<std::size_t> dims(slots);
  for (std::size_t s = 0; s < slots; ++s) dims[s] = static_cast<std::size_t>(spectra.slots[s].values.size());
  std::vector<std::size_t> digit(slots, 0);
  std::vector<cplx> partial(slots + 1, cplx(1.0, 0.0));
  std::size_t count = 0;
  std::size_t index = 0;
  // odometer over the product basis, maintaining prefix products
  for (std::size_t s = 0; s < slots; ++s) partial[s + 1] = partial[s] * spectra.slots[s].values[0];
  while (true) {
    if (std::abs(partial[slots] - cplx(1.0, 0.0)) <= tol) {
      ++count;
      if (out) out->push_back(static_cast<std::uint32_t>(index));
    }
    std::size_t s = slots;
    bool advanced = false;
    while (s > 0) {
      --s;
      if (++digit[s] < dims[s]) {
        advanced = true;
        break;
      }
      digit[s] = 0;
    }
    if (!advanced) break;
    ++index;
    for (std::size_t t = s; t < slots; ++t) {
      partial[t + 1] = partial[t] * spectra.slots[t].values[static_cast<Eigen::Index>(digit[t])];
    }
  }
  return count;
}

inline bool kronecker_reducible(const std::vector<StructuredOperator>& ops) {
  const auto& first = ops.front().kronecker_slots();
  if (!first) return false;
  for (const auto& op : ops) {
    const auto& slots = op.kronecker_slots();
    if (!slots || slots->size() != first->size()) return false;
    for (std::size_t s = 0; s < slots->size(); ++s) {
      if ((*slots)[s].rows() != (*first)[s].rows() || (*slots)[s].rows() > 64) return false;
    }
  }
  return true;
}

inline constexpr double kCandidateTol = 1e-6;

struct ReductionPlan {
  std::size_t reducer = 0;
  std::size_t candidates = 0;
};

inline ReductionPlan plan_reduction(const std::vector<StructuredOperator>& ops) {
  ReductionPlan best{0, SIZE_MAX};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto count = candidate_indices(slot_spectra(*ops[i].kronecker_slots()), kCandidateTol, nullptr);
    if (count < best.candidates) best = {i, count};
  }
  return best;
}

inline InvariantReport finish_dense(const Matrix& gram, std::size_t total_dim, std::size_t reduced_away,
                                    const InvariantOptions& opts) {
  InvariantReport rep;
  rep.method = ReportMethod::HermitianDense;
  rep.total_dim = total_dim;
  rep.tolerance = opts.zero_tol;
  const Matrix h = 0.5 * (gram + gram.adjoint());
  const auto cluster = split_zero_cluster(hermitian_eigenvalues(h), opts.zero_tol, 1.0);
  rep.value = static_cast<std::int64_t>(cluster.zeros);
  rep.gap_ratio = cluster.gap_ratio;
  rep.certain = cluster.certain;
  if (reduced_away > 0) {
    rep.note = "restricted to " + std::to_string(h.rows()) + " candidate directions of " + std::to_string(total_dim);
  }
  return rep;
}

/// Σ_g (2I − R_g − R_g^†) restricted to the eigen-candidates of one
/// Kronecker-form generator, computed in that generator's eigenbasis.
inline InvariantReport dense_reduced(const std::vector<StructuredOperator>& ops, const ReductionPlan& plan,
                                     const InvariantOptions& opts) {
  const std::size_t total = ops.front().total_dim();
  const auto spectra = slot_spectra(*ops[plan.reducer].kronecker_slots());
  std::vector<std::uint32_t> cand;
  cand.reserve(plan.candidates);
  candidate_indices(spectra, kCandidateTol, &cand);
  const auto n = static_cast<Eigen::Index>(cand.size());
  if (n == 0) {
    InvariantReport rep;
    rep.method = ReportMethod::HermitianDense;
    rep.total_dim = total;
    rep.value = 0;
    rep.certain = true;
    rep.note = "no eigen-candidates";
    return rep;
  }
  emit(opts, "dense: " + std::to_string(cand.size()) + " candidate directions of " + std::to_string(total));
  Matrix gram = Matrix::Zero(n, n);
  Vector e = Vector::Zero(static_cast<Eigen::Index>(total));
  Vector y(static_cast<Eigen::Index>(total));
  std::vector<cplx> scratch(total);
  for (const auto& op : ops) {
    std::vector<Matrix> rotated;
    for (std::size_t s = 0; s < op.kronecker_slots()->size(); ++s) {
      const Matrix& q = spectra.slots[s].vectors;
      rotated.push_back(q.adjoint() * (*op.kronecker_slots())[s] * q);
    }
    const auto rop = StructuredOperator::kronecker(std::move(rotated));
    Matrix block(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      e[cand[static_cast<std::size_t>(j)]] = 1.0;
      rop.apply(std::span<const cplx>(e.data(), total), std::span<cplx>(y.data(), total), scratch);
      e[cand[static_cast<std::size_t>(j)]] = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) block(i, j) = y[cand[static_cast<std::size_t>(i)]];
    }
    gram += 2.0 * Matrix::Identity(n, n) - block - block.adjoint();
  }
  return finish_dense(gram, total, total - cand.size(), opts);
}

inline InvariantReport dense_full(const std::vector<StructuredOperator>& ops, const InvariantOptions& opts) {
  const std::size_t total = ops.front().total_dim();
  if (total > opts.dense_limit) {
    throw Error(ErrorKind::OverDenseLimit, "dense fixed-space computation on dimension " + std::to_string(total) +
                                               " exceeds the dense limit " + std::to_string(opts.dense_limit));
  }
  const auto n = static_cast<Eigen::Index>(total);
  Matrix gram = Matrix::Zero(n, n);
  for (const auto& op : ops) {
    const Matrix r = op.materialize(opts.dense_limit);
    gram += 2.0 * Matrix::Identity(n, n) - r - r.adjoint();
  }
  return finish_dense(gram, total, 0, opts);
}

/// x ↦ (x + Σ_g (R_g x + R_g^† x)/2)/(s+1): Hermitian, spectrum in [−1, 1],
/// eigenvalue 1 exactly on the common fixed space.
class AveragingOperator {
 public:
  explicit AveragingOperator(const std::vector<StructuredOperator>& ops) : ops_(ops) {
    for (const auto& op : ops_) adjoints_.push_back(op.adjoint());
    dim_ = ops_.front().total_dim();
  }

  [[nodiscard]] std::size_t dim() const { return dim_; }

  void apply_block(const Matrix& x, Matrix& out) const {
    out.resize(x.rows(), x.cols());
    std::vector<cplx> scratch(dim_);
    Vector tmp(static_cast<Eigen::Index>(dim_));
    const double w = 1.0 / static_cast<double>(ops_.size() + 1);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      auto dst = out.col(c);
      dst = x.col(c);
      const std::span<const cplx> in(x.col(c).data(), dim_);
      for (std::size_t g = 0; g < ops_.size(); ++g) {
        ops_[g].apply(in, std::span<cplx>(tmp.data(), dim_), scratch);
        dst += 0.5 * tmp;
        adjoints_[g].apply(in, std::span<cplx>(tmp.data(), dim_), scratch);
        dst += 0.5 * tmp;
      }
      dst *= w;
    }
  }

 private:
  const std::vector<StructuredOperator>& ops_;
  std::vector<StructuredOperator> adjoints_;
  std::size_t dim_ = 0;
};

inline constexpr double kRitzFixed = 1.0 - 1e-9;
inline constexpr double kRitzSeparated = 1.0 - 1e-5;
inline constexpr int kStableIterations = 10;
inline constexpr double kResidualFraction = 0.1;

/// Chebyshev-filtered block subspace iteration on the averaging operator.
inline InvariantReport iterative(const std::vector<StructuredOperator>& ops, const std::vector<StructuredOperator>& mixers,
                                 const InvariantOptions& opts) {
  std::vector<StructuredOperator> all = ops;
  all.insert(all.end(), mixers.begin(), mixers.end());
  const AveragingOperator avg(all);
  const std::size_t total = avg.dim();
  const auto rows = static_cast<Eigen::Index>(total);
  Eigen::Index block = opts.block_size > 0 ? opts.block_size : 16;
  block = std::min<Eigen::Index>(block, rows);

  auto check_memory = [&](Eigen::Index b) {
    // X, AX, three filter iterates and QR workspace
    const double bytes = 7.0 * static_cast<double>(b) * static_cast<double>(total) * sizeof(cplx);
    if (bytes > static_cast<double>(opts.mem_budget_bytes)) {
      throw Error(ErrorKind::MemoryBudget, "subspace iteration needs about " +
                                               std::to_string(static_cast<long long>(bytes / (1 << 20))) +
                                               " MiB, over the memory budget");
    }
  };
  check_memory(block);

  std::mt19937_64 rng(opts.seed);
  Matrix x = orthonormalize(gaussian_block(rows, block, rng));
  Matrix ax;
  Eigen::VectorXd theta;

  auto rayleigh_ritz = [&]() {
    avg.apply_block(x, ax);
    Matrix h = x.adjoint() * ax;
    h = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    // descending order
    const Eigen::Index b = h.rows();
    Matrix w(b, b);
    theta.resize(b);
    for (Eigen::Index i = 0; i < b; ++i) {
      w.col(i) = eig.eigenvectors().col(b - 1 - i);
      theta[i] = eig.eigenvalues()[b - 1 - i];
    }
    x = x * w;
    ax = ax * w;
  };

  rayleigh_ritz();

  InvariantReport rep;
  rep.method = ReportMethod::SubspaceIteration;
  rep.total_dim = total;
  rep.tolerance = 1.0 - kRitzFixed;

  int stable = 0;
  std::size_t previous = SIZE_MAX;
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    std::size_t fixed = 0;
    bool separated = true;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      if (theta[i] >= kRitzFixed) {
        ++fixed;
      } else if (theta[i] > kRitzSeparated) {
        separated = false;
      }
    }
    if (opts.stop_above > 0 && fixed >= opts.stop_above) {
      // by interlacing, at least `fixed` eigenvalues are ≥ kRitzFixed
      rep.lower_bound = fixed < static_cast<std::size_t>(rows);
      converged = true;
      break;
    }
    if (fixed == static_cast<std::size_t>(x.cols())) {
      if (x.cols() == rows) {
        converged = true;
        break;
      }
      // the whole block is fixed: the fixed space may be larger, widen it
      const Eigen::Index grown = std::min<Eigen::Index>(2 * x.cols(), rows);
      check_memory(grown);
      Matrix wider(rows, grown);
      wider << x, gaussian_block(rows, grown - x.cols(), rng);
      x = orthonormalize(wider);
      rayleigh_ritz();
      stable = 0;
      previous = SIZE_MAX;
      emit(opts, "iterative: block widened to " + std::to_string(grown));
      continue;
    }
    // the leading non-fixed Ritz pair must itself be converged, so that the
    // eigenvalue it approximates is known to lie away from 1
    const auto lead = static_cast<Eigen::Index>(fixed);
    const double lead_residual = (ax.col(lead) - theta[lead] * x.col(lead)).norm();
    const bool resolved = lead_residual <= kResidualFraction * (1.0 - theta[lead]);
    if (separated && resolved && fixed == previous) {
      ++stable;
    } else {
      stable = (separated && resolved) ? 1 : 0;
    }
    previous = fixed;
    if (stable >= kStableIterations) {
      converged = true;
      break;
    }
    emit(opts, "iterative: it=" + std::to_string(it) + " block=" + std::to_string(x.cols()) +
                   " fixed=" + std::to_string(fixed) + " lead=" + std::to_string(theta[lead]) +
                   " residual=" + std::to_string(lead_residual) + " last=" + std::to_string(theta[theta.size() - 1]));
    // Chebyshev filter damping [−1, cut] relative to the eigenvalue 1
    const double cut = std::clamp(std::min(theta[theta.size() - 1], opts.filter_cut), -0.5, 1.0 - 1e-7);
    const double half_width = (cut + 1.0) / 2.0;
    const double center = (cut - 1.0) / 2.0;
    const int degree = stable > 0 ? 1 : std::max(1, opts.filter_degree);
    Matrix prev = x;
    Matrix cur = (ax - center * x) / half_width;
    Matrix next;
    Matrix acur;
    for (int j = 1; j < degree; ++j) {
      avg.apply_block(cur, acur);
      next = (2.0 / half_width) * (acur - center * cur) - prev;
      prev.swap(cur);
      cur.swap(next);
    }
    x = orthonormalize(cur);
    rayleigh_ritz();
  }
  rep.iterations = it;

  std::size_t fixed = 0;
  double largest_zero = 0.0;
  double smallest_free = 2.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double e = std::max(1.0 - theta[i], 0.0);
    if (theta[i] >= kRitzFixed) {
      ++fixed;
      largest_zero = std::max(largest_zero, e);
    } else {
      smallest_free = std::min(smallest_free, e);
    }
  }
  rep.value = static_cast<std::int64_t>(fixed);
  rep.gap_ratio = fixed == static_cast<std::size_t>(theta.size())
                      ? kGapCap
                      : std::min(smallest_free / std::max(largest_zero, std::numeric_limits<double>::epsilon()),
                                 kGapCap);
  rep.certain = converged && rep.gap_ratio >= kCertaintyGap;
  if (rep.lower_bound) {
    rep.certain = true;
    rep.note = "stopped early: at least " + std::to_string(fixed) + " fixed vectors";
  }
  if (!converged) {
    rep.note = "no convergence after " + std::to_string(it) + " iterations";
  }
  return rep;
}

}  // namespace detail

/// dim ∩_g ker(R_g − I) over a set of unitary operators on a common space.
/// `mixers` must be elements of the group generated by `ops`; only the
/// iterative path uses them.
inline InvariantReport fixed_space_dim(const std::vector<StructuredOperator>& ops, const InvariantOptions& opts = {},
                                       const std::vector<StructuredOperator>& mixers = {}) {
  if (ops.empty()) {
    throw Error(ErrorKind::InvalidArgument, "fixed_space_dim needs at least one operator");
  }
  const std::size_t total = ops.front().total_dim();
  for (const auto& op : ops) {
    if (op.total_dim() != total) {
      throw Error(ErrorKind::DimensionMismatch, "operators act on spaces of different dimension");
    }
  }
  const bool reducible = detail::kronecker_reducible(ops);
  std::optional<detail::ReductionPlan> plan;
  if (reducible && opts.method != Method::Iterative) {
    plan = detail::plan_reduction(ops);
  }
  Method method = opts.method;
  if (method == Method::Auto) {
    const bool small = total <= opts.dense_limit;
    const bool reduced_small = plan && plan->candidates <= opts.dense_limit;
    method = (small || reduced_small) ? Method::Dense : Method::Iterative;
  }
  if (method == Method::Dense) {
    if (plan && plan->candidates <= opts.dense_limit) {
      return detail::dense_reduced(ops, *plan, opts);
    }
    return detail::dense_full(ops, opts);
  }
  for (const auto& op : mixers) {
    if (op.total_dim() != total) {
      throw Error(ErrorKind::DimensionMismatch, "mixing operators act on a different space");
    }
  }
  return detail::iterative(ops, mixers, opts);
}

/// Products of `length` letters drawn uniformly from the generators and
/// their inverses.
inline std::vector<Matrix> random_words(const std::vector<Matrix>& gates, int count, int length, std::uint64_t seed) {
  std::vector<Matrix> words;
  if (gates.empty() || count <= 0 || length <= 0) {
    return words;
  }
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  std::uniform_int_distribution<std::size_t> pick(0, 2 * gates.size() - 1);
  for (int w = 0; w < count; ++w) {
    Matrix word = Matrix::Identity(gates.front().rows(), gates.front().cols());
    for (int l = 0; l < length; ++l) {
      const std::size_t c = pick(rng);
      const Matrix& g = gates[c / 2];
      word = (c % 2 == 0 ? Matrix(g) : Matrix(g.adjoint())) * word;
    }
    words.push_back(std::move(word));
  }
  return words;
}

/// M_{2k} of the closed group generated by unitaries on C^D.
inline InvariantReport m2k(const std::vector<StructuredOperator>& rho_ops, std::size_t D, int k,
                           InvariantOptions opts = {}, const std::vector<StructuredOperator>& mixers = {}) {
  if (k < 1 || k > 6) {
    throw Error(ErrorKind::InvalidArgument, "k must be in 1..6");
  }
  if (opts.block_size == 0) {
    opts.block_size = static_cast<int>(std::min<std::uint64_t>(gl_baseline(static_cast<int>(std::min<std::size_t>(D, 64)), k) + 16, 1u << 20));
  }
  InvariantReport rep = fixed_space_dim(rho_ops, opts, mixers);
  rep.k = k;
  if (rep.certain) {
    auto& audit = baseline_audit();
    ++audit.checked;
    if (static_cast<std::uint64_t>(rep.value) < gl_baseline(static_cast<int>(std::min<std::size_t>(D, 64)), k)) {
      ++audit.violations;
    }
  }
  return rep;
}

inline InvariantReport m2k(const std::vector<Matrix>& gates, int k, const InvariantOptions& opts = {}) {
  if (gates.empty()) {
    throw Error(ErrorKind::InvalidArgument, "m2k needs at least one gate");
  }
  std::vector<StructuredOperator> ops;
  for (const auto& g : gates) {
    if (g.rows() != gates.front().rows()) {
      throw Error(ErrorKind::DimensionMismatch, "gates act on spaces of different dimension");
    }
    ops.push_back(rho2k(g, k));
  }
  std::vector<StructuredOperator> mixers;
  if (opts.method != Method::Dense) {
    for (const auto& w : random_words(gates, opts.mixing_words, opts.word_length, opts.seed)) {
      mixers.push_back(rho2k(w, k));
    }
  }
  return m2k(ops, static_cast<std::size_t>(gates.front().rows()), k, opts, mixers);
}

inline InvariantReport m2k(const std::vector<UnitaryGate>& gates, int k, const InvariantOptions& opts = {}) {
  if (gates.empty()) {
    throw Error(ErrorKind::InvalidArgument, "m2k needs at least one gate");
  }
  std::vector<StructuredOperator> ops;
  for (const auto& g : gates) {
    if (g.dim() != gates.front().dim()) {
      throw Error(ErrorKind::DimensionMismatch, "gates act on spaces of different dimension");
    }
    ops.push_back(rho2k(g, k));
  }
  std::vector<StructuredOperator> mixers;
  if (opts.method != Method::Dense && gates.front().dim() <= 64) {
    std::vector<Matrix> dense;
    for (const auto& g : gates) dense.push_back(g.matrix());
    for (const auto& w : random_words(dense, opts.mixing_words, opts.word_length, opts.seed)) {
      mixers.push_back(rho2k(w, k));
    }
  }
  return m2k(ops, static_cast<std::size_t>(gates.front().dim()), k, opts, mixers);
}

// --- finite group oracle --------------------------------------------------------

inline constexpr std::size_t kDefaultClosureCap = 200000;

struct FiniteGroupInvariant {
  std::size_t order = 0;
  std::int64_t value = 0;
  double mean = 0.0;
};

namespace detail {

struct BucketHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto v : key) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

inline std::vector<std::int64_t> bucket_key(const Matrix& m) {
  std::vector<std::int64_t> key;
  key.reserve(static_cast<std::size_t>(2 * m.size()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      key.push_back(std::llround(m(i, j).real() * 1e6));
      key.push_back(std::llround(m(i, j).imag() * 1e6));
    }
  }
  return key;
}

}  // namespace detail

/// Closure of ⟨generators⟩ by breadth-first multiplication (elements
/// bucketed at 1e-6, phases not quotiented), then the character average
/// mean |tr g|^{2k}. Returns nullopt when more than `cap` elements appear.
inline std::optional<FiniteGroupInvariant> finite_group_m2k(const std::vector<Matrix>& generators, int k,
                                                            std::size_t cap = kDefaultClosureCap, Eigen::Index dim = 0) {
  if (cap < 1) {
    throw Error(ErrorKind::InvalidArgument, "closure cap must be positive");
  }
  if (generators.empty() && dim == 0) {
    throw Error(ErrorKind::InvalidArgument, "an empty generator list needs an explicit dimension");
  }
  const Eigen::Index d = generators.empty() ? dim : generators.front().rows();
  for (const auto& g : generators) {
    if (g.rows() != d || g.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "generators act on spaces of different dimension");
    }
  }
  std::vector<Matrix> elements{Matrix::Identity(d, d)};
  std::unordered_map<std::vector<std::int64_t>, std::size_t, detail::BucketHash> seen;
  seen.emplace(detail::bucket_key(elements.front()), 0);
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const auto& g : generators) {
      Matrix p = g * elements[head];
      auto key = detail::bucket_key(p);
      if (seen.find(key) == seen.end()) {
        if (elements.size() >= cap) {
          return std::nullopt;
        }
        seen.emplace(std::move(key), elements.size());
        elements.push_back(std::move(p));
      }
    }
  }
  long double sum = 0.0L;
  for (const auto& e : elements) {
    sum += std::pow(static_cast<long double>(std::abs(e.trace())), 2 * k);
  }
  FiniteGroupInvariant out;
  out.order = elements.size();
  out.mean = static_cast<double>(sum / static_cast<long double>(elements.size()));
  out.value = std::llround(out.mean);
  if (std::abs(out.mean - static_cast<double>(out.value)) > 1e-6) {
    throw Error(ErrorKind::NumericallyAmbiguous,
                "character average " + std::to_string(out.mean) + " is not within 1e-6 of an integer");
  }
  return out;
}

// --- Haar oracle --------------------------------------------------------------

/// Common fixed space of ρ_{2k} of `count` Haar-random unitaries on C^m.
inline InvariantReport haar_oracle(int m, int k, int count, std::uint64_t seed, InvariantOptions opts = {}) {
  if (count < 2) {
    throw Error(ErrorKind::InvalidArgument, "haar_oracle needs at least two unitaries");
  }
  std::mt19937_64 rng(seed);
  std::vector<Matrix> gates;
  for (int i = 0; i < count; ++i) {
    gates.push_back(haar_unitary(m, rng));
  }
  opts.seed = seed;
  return m2k(gates, k, opts);
}

}  // namespace quni
