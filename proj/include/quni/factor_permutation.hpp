#pragma once

#include "quni/core.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace quni {

/// A permutation of the tensor factors of (C^q)^{⊗N}.
///
/// Positions are 0-based. `images()[i]` is the position that factor i is
/// moved to, so the induced operator P maps
/// |j_0⟩⊗…⊗|j_{N-1}⟩ to the product state whose factor at position
/// images()[i] is |j_i⟩. Composition follows operator products:
/// P_{a.compose(b)} = P_a P_b.
class FactorPermutation {
 public:
  FactorPermutation() = default;

  explicit FactorPermutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<int> sorted = images_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != static_cast<int>(i)) {
        throw Error(ErrorKind::InvalidArgument, "factor permutation images are not a bijection");
      }
    }
  }

  static FactorPermutation identity(int n) {
    std::vector<int> im(static_cast<std::size_t>(n));
    std::iota(im.begin(), im.end(), 0);
    return FactorPermutation(std::move(im));
  }

  static FactorPermutation transposition(int n, int a, int b) {
    auto p = identity(n);
    std::swap(p.images_.at(static_cast<std::size_t>(a)), p.images_.at(static_cast<std::size_t>(b)));
    return p;
  }

  /// The cycle 0 -> 1 -> ... -> n-1 -> 0.
  static FactorPermutation cycle(int n) {
    std::vector<int> im(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      im[static_cast<std::size_t>(i)] = (i + 1) % n;
    }
    return FactorPermutation(std::move(im));
  }

  [[nodiscard]] int size() const { return static_cast<int>(images_.size()); }
  [[nodiscard]] const std::vector<int>& images() const { return images_; }
  [[nodiscard]] int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }

  [[nodiscard]] bool is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (images_[i] != static_cast<int>(i)) {
        return false;
      }
    }
    return true;
  }

  [[nodiscard]] FactorPermutation inverse() const {
    std::vector<int> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) {
      inv[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
    }
    return FactorPermutation(std::move(inv));
  }

  /// this ∘ other: apply `other` first.
  [[nodiscard]] FactorPermutation compose(const FactorPermutation& other) const {
    if (other.size() != size()) {
      throw Error(ErrorKind::ArityMismatch, "composing permutations of different sizes");
    }
    std::vector<int> im(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) {
      im[i] = images_[static_cast<std::size_t>(other.images_[i])];
    }
    return FactorPermutation(std::move(im));
  }

  /// The same permutation repeated on `copies` consecutive blocks of
  /// size() factors each.
  [[nodiscard]] FactorPermutation lifted(int copies) const {
    std::vector<int> im;
    im.reserve(images_.size() * static_cast<std::size_t>(copies));
    for (int c = 0; c < copies; ++c) {
      for (int v : images_) {
        im.push_back(c * size() + v);
      }
    }
    return FactorPermutation(std::move(im));
  }

  [[nodiscard]] bool is_odd() const {
    std::vector<bool> seen(images_.size(), false);
    std::size_t transpositions = 0;
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (seen[i]) {
        continue;
      }
      std::size_t len = 0;
      for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(images_[j])) {
        seen[j] = true;
        ++len;
      }
      transpositions += len - 1;
    }
    return transpositions % 2 == 1;
  }

  friend bool operator==(const FactorPermutation&, const FactorPermutation&) = default;

 private:
  std::vector<int> images_;
};

/// Index map of P_σ on (C^q)^{⊗N} in big-endian digit order:
/// (P_σ x)[map[i]] = x[i].
inline std::vector<std::uint32_t> permutation_index_map(int local_dim, const FactorPermutation& perm) {
  const int n = perm.size();
  const std::uint64_t total = checked_pow(static_cast<std::uint64_t>(local_dim), static_cast<unsigned>(n));
  if (total > UINT32_MAX) {
    throw Error(ErrorKind::MemoryBudget, "permutation index map larger than 2^32 entries");
  }
  // stride of each output position
  std::vector<std::uint64_t> out_stride(static_cast<std::size_t>(n));
  std::uint64_t s = 1;
  for (int pos = n - 1; pos >= 0; --pos) {
    out_stride[static_cast<std::size_t>(pos)] = s;
    s *= static_cast<std::uint64_t>(local_dim);
  }
  std::vector<std::uint32_t> map(total);
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t out = 0;
    for (int f = 0; f < n; ++f) {
      out += static_cast<std::uint64_t>(digits[static_cast<std::size_t>(f)]) *
             out_stride[static_cast<std::size_t>(perm(f))];
    }
    map[idx] = static_cast<std::uint32_t>(out);
    for (int f = n - 1; f >= 0; --f) {
      if (++digits[static_cast<std::size_t>(f)] < local_dim) {
        break;
      }
      digits[static_cast<std::size_t>(f)] = 0;
    }
  }
  return map;
}

}  // namespace quni
