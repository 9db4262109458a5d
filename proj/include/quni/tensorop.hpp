#pragma once

// Matrix-free operators on tensor product spaces.
//
// A StructuredOperator is a product of stages. A stage either applies a small
// matrix to a contiguous group of tensor factors (identity elsewhere) or
// permutes tensor factors. Vectors are stored in big-endian digit order: the
// first tensor factor is the most significant digit of the flat index.

#include "quni/core.hpp"
#include "quni/factor_permutation.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace quni {

/// Row-compressed copy of a small dense matrix, keeping exact nonzeros only.
class SparseLocalMatrix {
 public:
  explicit SparseLocalMatrix(const Matrix& m) : dense_(m) {
    row_start_.reserve(static_cast<std::size_t>(m.rows()) + 1);
    row_start_.push_back(0);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(i, j) != cplx(0.0, 0.0)) {
          col_.push_back(static_cast<std::uint32_t>(j));
          val_.push_back(m(i, j));
        }
      }
      row_start_.push_back(col_.size());
    }
  }

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(dense_.rows()); }
  [[nodiscard]] const Matrix& dense() const { return dense_; }
  [[nodiscard]] std::size_t nonzeros() const { return val_.size(); }

  // out[l, i, r] = sum_j M(i, j) in[l, j, r]
  void apply(const cplx* in, cplx* out, std::size_t left, std::size_t right) const {
    const std::size_t block = dim();
    for (std::size_t l = 0; l < left; ++l) {
      const cplx* in_l = in + l * block * right;
      cplx* out_l = out + l * block * right;
      for (std::size_t i = 0; i < block; ++i) {
        cplx* dst = out_l + i * right;
        const std::size_t begin = row_start_[i];
        const std::size_t end = row_start_[i + 1];
        if (begin == end) {
          std::fill(dst, dst + right, cplx(0.0, 0.0));
          continue;
        }
        {
          const cplx v = val_[begin];
          const cplx* src = in_l + col_[begin] * right;
          for (std::size_t r = 0; r < right; ++r) {
            dst[r] = v * src[r];
          }
        }
        for (std::size_t p = begin + 1; p < end; ++p) {
          const cplx v = val_[p];
          const cplx* src = in_l + col_[p] * right;
          for (std::size_t r = 0; r < right; ++r) {
            dst[r] += v * src[r];
          }
        }
      }
    }
  }

 private:
  Matrix dense_;
  std::vector<std::size_t> row_start_;
  std::vector<std::uint32_t> col_;
  std::vector<cplx> val_;
};

namespace detail {

/// Index maps are cached per (local dimension, permutation).
inline std::shared_ptr<const std::vector<std::uint32_t>> cached_index_map(int local_dim,
                                                                          const FactorPermutation& perm) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::vector<int>>, std::shared_ptr<const std::vector<std::uint32_t>>> cache;
  const auto key = std::make_pair(local_dim, perm.images());
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) {
      return it->second;
    }
  }
  auto map = std::make_shared<const std::vector<std::uint32_t>>(permutation_index_map(local_dim, perm));
  std::lock_guard lock(mutex);
  // entries above 2^22 are not retained, so large sweeps do not pin memory
  if (map->size() <= (std::size_t{1} << 22)) {
    cache.emplace(key, map);
  }
  return map;
}

}  // namespace detail

struct LocalStage {
  std::shared_ptr<const SparseLocalMatrix> matrix;
  std::size_t left = 1;
  std::size_t right = 1;
};

struct PermutationStage {
  int local_dim = 2;
  FactorPermutation perm;
  std::shared_ptr<const std::vector<std::uint32_t>> map;
};

using Stage = std::variant<LocalStage, PermutationStage>;

class StructuredOperator {
 public:
  StructuredOperator() = default;

  static StructuredOperator identity(std::size_t dim) {
    StructuredOperator op;
    op.total_dim_ = dim;
    return op;
  }

  /// ⊗_s slots[s], one stage per slot.
  static StructuredOperator kronecker(std::vector<Matrix> slots) {
    StructuredOperator op;
    std::size_t total = 1;
    for (const auto& m : slots) {
      if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorKind::DimensionMismatch, "Kronecker slot matrix must be square and nonempty");
      }
      if (total > SIZE_MAX / static_cast<std::size_t>(m.rows())) {
        throw Error(ErrorKind::MemoryBudget, "Kronecker product dimension overflows");
      }
      total *= static_cast<std::size_t>(m.rows());
    }
    op.total_dim_ = total;
    std::size_t left = 1;
    for (const auto& m : slots) {
      const auto block = static_cast<std::size_t>(m.rows());
      const std::size_t right = total / (left * block);
      op.stages_.emplace_back(LocalStage{std::make_shared<const SparseLocalMatrix>(m), left, right});
      left *= block;
    }
    op.slots_ = std::move(slots);
    return op;
  }

  /// `m` acting on consecutive factors of (C^q)^{⊗n} starting at factor
  /// `first`; the size of `m` fixes how many.
  static StructuredOperator local(int local_dim, int num_factors, int first, const Matrix& m) {
    const std::size_t q = static_cast<std::size_t>(local_dim);
    const std::size_t total = checked_pow(q, static_cast<unsigned>(num_factors));
    const auto block = static_cast<std::size_t>(m.rows());
    std::size_t left = checked_pow(q, static_cast<unsigned>(first));
    if (m.rows() != m.cols() || left * block > total || total % (left * block) != 0) {
      throw Error(ErrorKind::DimensionMismatch, "local matrix does not fit the factor layout");
    }
    StructuredOperator op;
    op.total_dim_ = total;
    op.stages_.emplace_back(LocalStage{std::make_shared<const SparseLocalMatrix>(m), left, total / (left * block)});
    return op;
  }

  static StructuredOperator permutation(int local_dim, const FactorPermutation& perm) {
    StructuredOperator op;
    op.total_dim_ = checked_pow(static_cast<std::uint64_t>(local_dim), static_cast<unsigned>(perm.size()));
    if (!perm.is_identity()) {
      op.stages_.emplace_back(PermutationStage{local_dim, perm, detail::cached_index_map(local_dim, perm)});
    }
    return op;
  }

  [[nodiscard]] std::size_t total_dim() const { return total_dim_; }
  [[nodiscard]] const std::vector<Stage>& stages() const { return stages_; }

  /// Per-slot matrices when the operator is a plain Kronecker product.
  [[nodiscard]] const std::optional<std::vector<Matrix>>& kronecker_slots() const { return slots_; }

  /// Operator applying `this` first and then `next`.
  [[nodiscard]] StructuredOperator then(const StructuredOperator& next) const {
    if (next.total_dim_ != total_dim_) {
      throw Error(ErrorKind::DimensionMismatch, "composing operators of different dimension");
    }
    StructuredOperator op;
    op.total_dim_ = total_dim_;
    op.stages_ = stages_;
    op.stages_.insert(op.stages_.end(), next.stages_.begin(), next.stages_.end());
    if (stages_.empty()) {
      op.slots_ = next.slots_;
    } else if (next.stages_.empty()) {
      op.slots_ = slots_;
    } else if (slots_ && next.slots_ && slots_->size() == next.slots_->size()) {
      std::vector<Matrix> prod;
      for (std::size_t s = 0; s < slots_->size(); ++s) {
        if ((*slots_)[s].rows() != (*next.slots_)[s].rows()) {
          prod.clear();
          break;
        }
        prod.push_back((*next.slots_)[s] * (*slots_)[s]);
      }
      if (!prod.empty()) {
        op.slots_ = std::move(prod);
      }
    }
    return op;
  }

  [[nodiscard]] StructuredOperator adjoint() const {
    StructuredOperator op;
    op.total_dim_ = total_dim_;
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
      if (const auto* local = std::get_if<LocalStage>(&*it)) {
        op.stages_.emplace_back(LocalStage{std::make_shared<const SparseLocalMatrix>(local->matrix->dense().adjoint()),
                                           local->left, local->right});
      } else {
        const auto& ps = std::get<PermutationStage>(*it);
        const auto inv = ps.perm.inverse();
        op.stages_.emplace_back(PermutationStage{ps.local_dim, inv, detail::cached_index_map(ps.local_dim, inv)});
      }
    }
    if (slots_) {
      std::vector<Matrix> adj;
      for (const auto& m : *slots_) {
        adj.push_back(m.adjoint());
      }
      op.slots_ = std::move(adj);
    }
    return op;
  }

  /// out = Op(in). `scratch` must hold total_dim() entries; in and out may alias.
  void apply(std::span<const cplx> in, std::span<cplx> out, std::span<cplx> scratch) const {
    if (in.size() != total_dim_ || out.size() != total_dim_ || scratch.size() < total_dim_) {
      throw Error(ErrorKind::DimensionMismatch, "vector length does not match operator dimension");
    }
    if (stages_.empty()) {
      if (in.data() != out.data()) {
        std::copy(in.begin(), in.end(), out.begin());
      }
      return;
    }
    // ping-pong so that the last stage writes into `out`
    std::vector<cplx> copy;
    const cplx* src = in.data();
    if (in.data() == out.data()) {
      copy.assign(in.begin(), in.end());
      src = copy.data();
    }
    cplx* bufs[2] = {out.data(), scratch.data()};
    int cur = (stages_.size() % 2 == 1) ? 0 : 1;
    for (std::size_t s = 0; s < stages_.size(); ++s) {
      cplx* dst = bufs[cur];
      if (const auto* local = std::get_if<LocalStage>(&stages_[s])) {
        local->matrix->apply(src, dst, local->left, local->right);
      } else {
        const auto& map = *std::get<PermutationStage>(stages_[s]).map;
        for (std::size_t i = 0; i < total_dim_; ++i) {
          dst[map[i]] = src[i];
        }
      }
      src = dst;
      cur ^= 1;
    }
  }

  [[nodiscard]] Vector apply(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != total_dim_) {
      throw Error(ErrorKind::DimensionMismatch, "vector length does not match operator dimension");
    }
    Vector out(x.size());
    std::vector<cplx> scratch(total_dim_);
    apply(std::span<const cplx>(x.data(), total_dim_), std::span<cplx>(out.data(), total_dim_), scratch);
    return out;
  }

  /// Column-wise application to a block of vectors.
  [[nodiscard]] Matrix apply_block(const Matrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != total_dim_) {
      throw Error(ErrorKind::DimensionMismatch, "block row count does not match operator dimension");
    }
    Matrix out(x.rows(), x.cols());
    std::vector<cplx> scratch(total_dim_);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      apply(std::span<const cplx>(x.col(c).data(), total_dim_), std::span<cplx>(out.col(c).data(), total_dim_),
            scratch);
    }
    return out;
  }

  [[nodiscard]] Matrix materialize(std::size_t dense_limit = kDefaultDenseLimit) const {
    if (total_dim_ > dense_limit) {
      throw Error(ErrorKind::OverDenseLimit,
                  "operator dimension " + std::to_string(total_dim_) + " exceeds dense limit " +
                      std::to_string(dense_limit));
    }
    const auto n = static_cast<Eigen::Index>(total_dim_);
    return apply_block(Matrix::Identity(n, n));
  }

 private:
  std::size_t total_dim_ = 1;
  std::vector<Stage> stages_;
  std::optional<std::vector<Matrix>> slots_;
};

/// ρ_{2k}(g) = g^{⊗k} ⊗ conj(g)^{⊗k} on (C^D)^{⊗2k}.
inline StructuredOperator rho2k(const Matrix& g, int k) {
  if (k < 1) {
    throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  }
  if (g.rows() != g.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "gate matrix must be square");
  }
  if (!is_unitary(g)) {
    throw Error(ErrorKind::NonUnitary, "representation requires a unitary matrix");
  }
  std::vector<Matrix> slots;
  slots.reserve(static_cast<std::size_t>(2 * k));
  for (int s = 0; s < k; ++s) {
    slots.push_back(g);
  }
  const Matrix conj = g.conjugate();
  for (int s = 0; s < k; ++s) {
    slots.push_back(conj);
  }
  return StructuredOperator::kronecker(std::move(slots));
}

inline Vector apply_rho2k(const Matrix& g, int k, const Vector& x) {
  const auto d = static_cast<std::uint64_t>(g.rows());
  if (static_cast<std::uint64_t>(x.size()) != checked_pow(d, static_cast<unsigned>(2 * k))) {
    throw Error(ErrorKind::DimensionMismatch, "vector length must be D^(2k)");
  }
  return rho2k(g, k).apply(x);
}

/// Re-indexes x by σ over the tensor factors of (C^q)^{⊗n}.
inline Vector apply_factor_permutation(int local_dim, const FactorPermutation& perm, const Vector& x) {
  const auto total = checked_pow(static_cast<std::uint64_t>(local_dim), static_cast<unsigned>(perm.size()));
  if (static_cast<std::uint64_t>(x.size()) != total) {
    throw Error(ErrorKind::DimensionMismatch, "vector length does not match the permuted factor layout");
  }
  return StructuredOperator::permutation(local_dim, perm).apply(x);
}

}  // namespace quni
