#pragma once

// Symmetric algebra over W = C^m at desk scale: symmetrization of tensors,
// ideals generated by symmetrized group complements, Hilbert functions and
// their eventual polynomials.

#include "quni/core.hpp"
#include "quni/factor_permutation.hpp"
#include "quni/invariants.hpp"
#include "quni/linalg.hpp"
#include "quni/tensorop.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace quni {

using Exponent = std::vector<int>;

/// C(m+j−1, j), the number of monomials of degree j in m variables.
inline std::uint64_t monomial_count(int m, int j) {
  if (m < 1 || j < 0) {
    throw Error(ErrorKind::InvalidArgument, "monomial_count needs m >= 1 and j >= 0");
  }
  // C(m−1+j, m−1) built up one factor at a time; each step stays integral
  unsigned __int128 c = 1;
  for (int i = 1; i < m; ++i) {
    c = c * static_cast<unsigned>(j + i) / static_cast<unsigned>(i);
    if (c > UINT64_MAX) {
      throw Error(ErrorKind::InvalidArgument, "monomial count overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(c);
}

/// Degree-j monomials in graded-lex order (x₁^j first).
class MonomialBasis {
 public:
  MonomialBasis(int m, int j) : m_(m), j_(j) {
    if (m < 1 || j < 0) {
      throw Error(ErrorKind::InvalidArgument, "monomial basis needs m >= 1 and j >= 0");
    }
    Exponent e(static_cast<std::size_t>(m), 0);
    fill(0, j, e);
    for (std::size_t i = 0; i < list_.size(); ++i) index_.emplace(list_[i], i);
  }

  [[nodiscard]] int variables() const { return m_; }
  [[nodiscard]] int degree() const { return j_; }
  [[nodiscard]] std::size_t size() const { return list_.size(); }
  [[nodiscard]] const Exponent& operator[](std::size_t i) const { return list_[i]; }
  [[nodiscard]] const std::vector<Exponent>& monomials() const { return list_; }

  [[nodiscard]] std::size_t index(const Exponent& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) {
      throw Error(ErrorKind::DimensionMismatch, "exponent vector is not a degree-" + std::to_string(j_) + " monomial");
    }
    return it->second;
  }

 private:
  void fill(std::size_t var, int remaining, Exponent& e) {
    if (var + 1 == e.size()) {
      e[var] = remaining;
      list_.push_back(e);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      e[var] = a;
      fill(var + 1, remaining - a, e);
    }
    e[var] = 0;
  }

  int m_;
  int j_;
  std::vector<Exponent> list_;
  std::map<Exponent, std::size_t> index_;
};

/// Homogeneous polynomial: coefficients over MonomialBasis(m, degree).
struct Polynomial {
  int m = 1;
  int degree = 0;
  Vector coeffs;
};

/// Image of a tensor in W^{⊗j} (big-endian word index) under W^{⊗j} → R^j.
inline Polynomial symmetrize(const Vector& tensor, int m, int j) {
  const std::uint64_t len = checked_pow(static_cast<std::uint64_t>(m), static_cast<unsigned>(j));
  if (static_cast<std::uint64_t>(tensor.size()) != len) {
    throw Error(ErrorKind::DimensionMismatch, "tensor length " + std::to_string(tensor.size()) + " is not m^j = " +
                                                  std::to_string(len));
  }
  const MonomialBasis basis(m, j);
  Polynomial p{m, j, Vector::Zero(static_cast<Eigen::Index>(basis.size()))};
  Exponent e(static_cast<std::size_t>(m));
  for (std::uint64_t word = 0; word < len; ++word) {
    std::fill(e.begin(), e.end(), 0);
    std::uint64_t w = word;
    for (int f = 0; f < j; ++f) {
      ++e[static_cast<std::size_t>(w % static_cast<std::uint64_t>(m))];
      w /= static_cast<std::uint64_t>(m);
    }
    p.coeffs[static_cast<Eigen::Index>(basis.index(e))] += tensor[static_cast<Eigen::Index>(word)];
  }
  return p;
}

/// Orthonormal basis (columns) of span{g w − w : g ∈ ops, w}.
inline Matrix invariant_complement(const std::vector<Matrix>& ops) {
  if (ops.empty()) {
    throw Error(ErrorKind::InvalidArgument, "invariant_complement needs at least one operator");
  }
  const Eigen::Index n = ops.front().rows();
  Matrix gram = Matrix::Zero(n, n);
  for (const auto& g : ops) {
    if (g.rows() != n || g.cols() != n) {
      throw Error(ErrorKind::DimensionMismatch, "operators act on spaces of different dimension");
    }
    const Matrix diff = g - Matrix::Identity(n, n);
    gram += diff * diff.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const ZeroCluster zc = split_zero_cluster(eig.eigenvalues(), kZeroThreshold, 1.0);
  if (!zc.certain) {
    throw Error(ErrorKind::NumericallyAmbiguous, "complement rank is ambiguous (gap ratio " +
                                                     std::to_string(zc.gap_ratio) + ")");
  }
  const auto zeros = static_cast<Eigen::Index>(zc.zeros);
  return eig.eigenvectors().rightCols(n - zeros);
}

/// Homogeneous ideal generated in degree n.
struct GradedIdeal {
  int m = 1;
  int n = 1;
  std::vector<Polynomial> generators;

  void validate() const {
    if (m < 1 || n < 0) {
      throw Error(ErrorKind::InvalidArgument, "ideal needs m >= 1 and n >= 0");
    }
    const auto size = static_cast<Eigen::Index>(monomial_count(m, n));
    for (const auto& g : generators) {
      if (g.m != m || g.degree != n || g.coeffs.size() != size) {
        throw Error(ErrorKind::DimensionMismatch, "generator is not a degree-" + std::to_string(n) + " form in " +
                                                      std::to_string(m) + " variables");
      }
    }
  }
};

/// J(G): the ideal generated by the symmetrized complement of the
/// invariants of `ops` acting on W^{⊗n}, W = C^m.
inline GradedIdeal ideal_of_group(const std::vector<Matrix>& ops, int m, int n) {
  const std::uint64_t dim = checked_pow(static_cast<std::uint64_t>(m), static_cast<unsigned>(n));
  if (ops.empty() || static_cast<std::uint64_t>(ops.front().rows()) != dim) {
    throw Error(ErrorKind::DimensionMismatch, "group operators must act on W^{⊗n}");
  }
  const Matrix complement = invariant_complement(ops);
  GradedIdeal J{m, n, {}};
  if (complement.cols() == 0) {
    return J;
  }
  const auto size = static_cast<Eigen::Index>(monomial_count(m, n));
  Matrix images(size, complement.cols());
  for (Eigen::Index c = 0; c < complement.cols(); ++c) {
    images.col(c) = symmetrize(complement.col(c), m, n).coeffs;
  }
  // orthonormal basis of the image; the complement columns are orthonormal
  // and symmetrization has norm at least 1, so 1 is a safe scale floor
  Eigen::SelfAdjointEigenSolver<Matrix> eig(images * images.adjoint());
  Eigen::VectorXd ev = eig.eigenvalues();
  const double scale = std::max(ev.maxCoeff(), 1.0);
  for (Eigen::Index i = 0; i < size; ++i) {
    if (ev[i] > kZeroThreshold * scale) {
      J.generators.push_back(Polynomial{m, n, eig.eigenvectors().col(i)});
    }
  }
  return J;
}

struct HilbertOptions {
  std::size_t dense_limit = kDefaultDenseLimit;
  double zero_tol = kZeroThreshold;
};

/// h(N) = dim R^N − dim J^N.
inline std::int64_t hilbert_function(const GradedIdeal& J, int N, const HilbertOptions& opts = {}) {
  J.validate();
  if (N < 0) {
    throw Error(ErrorKind::InvalidArgument, "degree must be nonnegative");
  }
  const std::uint64_t count = monomial_count(J.m, N);
  if (N < J.n || J.generators.empty()) {
    return static_cast<std::int64_t>(count);
  }
  if (count > opts.dense_limit) {
    throw Error(ErrorKind::OverDenseLimit, "degree-" + std::to_string(N) + " piece has " + std::to_string(count) +
                                               " monomials, over the dense limit");
  }
  const MonomialBasis target(J.m, N);
  const MonomialBasis shifts(J.m, N - J.n);
  const MonomialBasis source(J.m, J.n);
  const auto size = static_cast<Eigen::Index>(count);
  // Gram matrix of all products x^α g, accumulated row by row
  Matrix gram = Matrix::Zero(size, size);
  std::vector<std::pair<Eigen::Index, cplx>> row;
  Exponent e(static_cast<std::size_t>(J.m));
  for (const auto& g : J.generators) {
    for (const auto& alpha : shifts.monomials()) {
      row.clear();
      for (Eigen::Index t = 0; t < g.coeffs.size(); ++t) {
        if (g.coeffs[t] == cplx(0.0, 0.0)) continue;
        const Exponent& beta = source[static_cast<std::size_t>(t)];
        for (std::size_t v = 0; v < e.size(); ++v) e[v] = alpha[v] + beta[v];
        row.emplace_back(static_cast<Eigen::Index>(target.index(e)), g.coeffs[t]);
      }
      for (const auto& [i, a] : row) {
        for (const auto& [j, b] : row) gram(i, j) += std::conj(a) * b;
      }
    }
  }
  const ZeroCluster zc = split_zero_cluster(hermitian_eigenvalues(gram), opts.zero_tol);
  if (!zc.certain) {
    throw Error(ErrorKind::NumericallyAmbiguous, "rank of the degree-" + std::to_string(N) +
                                                     " piece is ambiguous (gap ratio " + std::to_string(zc.gap_ratio) +
                                                     ")");
  }
  return static_cast<std::int64_t>(zc.zeros);
}

/// Hilbert function values with the fitted eventual polynomial.
/// `eventual_polynomial` holds c_i with p(N) = Σ c_i·C(N, i).
struct HilbertTable {
  int m = 1;
  int n = 1;
  std::vector<std::int64_t> values;
  std::optional<int> regularity;
  std::optional<int> dimension;
  std::vector<std::int64_t> eventual_polynomial;
};

inline HilbertTable hilbert_table(const GradedIdeal& J, int up_to, const HilbertOptions& opts = {}) {
  HilbertTable t{J.m, J.n, {}, std::nullopt, std::nullopt, {}};
  for (int N = 0; N <= up_to; ++N) t.values.push_back(hilbert_function(J, N, opts));
  return t;
}

namespace detail {

/// Generalized binomial C(t, i) for any integer t.
inline __int128 binomial(__int128 t, int i) {
  __int128 c = 1;
  for (int r = 0; r < i; ++r) c = c * (t - r) / (r + 1);
  return c;
}

}  // namespace detail

struct RegularityResult {
  int regularity = 0;
  int dimension = 0;
  std::vector<std::int64_t> eventual_polynomial;
};

/// Fits the eventual polynomial to the tail of the table, lowest degree
/// first, and extends it backwards to find where it starts to agree.
inline RegularityResult regularity_and_dimension(const HilbertTable& table) {
  const auto& h = table.values;
  const int len = static_cast<int>(h.size());
  for (int e = 0;; ++e) {
    const int window = std::max(3, e + 2);
    if (window > len) {
      throw Error(ErrorKind::TailNotStabilized, "Hilbert table of length " + std::to_string(len) +
                                                    " has no polynomial tail");
    }
    const int base = len - window;
    // forward differences at `base`
    std::vector<__int128> diff(h.begin() + base, h.end());
    std::vector<__int128> at_base;
    for (int order = 0; order < window; ++order) {
      at_base.push_back(diff.front());
      for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
      diff.pop_back();
    }
    bool fits = true;
    for (int order = e + 1; order < window; ++order) fits = fits && at_base[static_cast<std::size_t>(order)] == 0;
    if (!fits) continue;

    auto p = [&](int N) {
      __int128 s = 0;
      for (int i = 0; i <= e; ++i) s += at_base[static_cast<std::size_t>(i)] * detail::binomial(N - base, i);
      return s;
    };
    RegularityResult out;
    out.regularity = len;
    while (out.regularity > 0 && p(out.regularity - 1) == h[static_cast<std::size_t>(out.regularity - 1)]) {
      --out.regularity;
    }
    // degree of p and its coefficients in the basis C(N, i)
    std::vector<__int128> vals;
    for (int N = 0; N <= e; ++N) vals.push_back(p(N));
    for (int i = 0; i <= e; ++i) {
      out.eventual_polynomial.push_back(static_cast<std::int64_t>(vals.front()));
      for (std::size_t q = 0; q + 1 < vals.size(); ++q) vals[q] = vals[q + 1] - vals[q];
      if (!vals.empty()) vals.pop_back();
    }
    while (!out.eventual_polynomial.empty() && out.eventual_polynomial.back() == 0) out.eventual_polynomial.pop_back();
    out.dimension = out.eventual_polynomial.empty() ? 0 : static_cast<int>(out.eventual_polynomial.size()) - 1;
    return out;
  }
}

inline HilbertTable with_regularity(HilbertTable table) {
  const RegularityResult r = regularity_and_dimension(table);
  table.regularity = r.regularity;
  table.dimension = r.dimension;
  table.eventual_polynomial = r.eventual_polynomial;
  return table;
}

struct Correspondence {
  std::int64_t lhs = 0;
  std::int64_t rhs = 0;
};

/// Compares the invariants of ⟨G⊗I ∪ S_N⟩ on W^{⊗N} with h_J(N) for the
/// ideal J(G). `ops` act on W^{⊗n} with W = C^m.
inline Correspondence correspondence_check(const std::vector<Matrix>& ops, int m, int n, int N,
                                           const InvariantOptions& opts = {}) {
  if (N < n) {
    throw Error(ErrorKind::InvalidArgument, "N must be at least n");
  }
  const std::uint64_t total = checked_pow(static_cast<std::uint64_t>(m), static_cast<unsigned>(N));
  if (total > opts.dense_limit) {
    throw Error(ErrorKind::OverDenseLimit, "W^{⊗N} has dimension " + std::to_string(total) + ", over the dense limit");
  }
  std::vector<StructuredOperator> lifted;
  for (const auto& g : ops) lifted.push_back(StructuredOperator::local(m, N, 0, g));
  if (N >= 2) lifted.push_back(StructuredOperator::permutation(m, FactorPermutation::transposition(N, 0, 1)));
  if (N >= 3) lifted.push_back(StructuredOperator::permutation(m, FactorPermutation::cycle(N)));
  InvariantOptions inv = opts;
  inv.method = Method::Dense;
  const InvariantReport rep = fixed_space_dim(lifted, inv);
  if (!rep.certain) {
    throw Error(ErrorKind::NumericallyAmbiguous, "fixed-space dimension on W^{⊗N} is not certain");
  }
  const GradedIdeal J = ideal_of_group(ops, m, n);
  return {rep.value, hilbert_function(J, N, HilbertOptions{opts.dense_limit, opts.zero_tol})};
}

// --- ideal files ------------------------------------------------------------

inline GradedIdeal ideal_from_json(const nlohmann::json& doc) {
  try {
    GradedIdeal J;
    J.m = doc.at("m").get<int>();
    J.n = doc.at("n").get<int>();
    if (J.m < 1 || J.n < 0) {
      throw Error(ErrorKind::MalformedFile, "ideal needs m >= 1 and n >= 0");
    }
    const MonomialBasis basis(J.m, J.n);
    for (const auto& gen : doc.at("generators")) {
      Polynomial p{J.m, J.n, Vector::Zero(static_cast<Eigen::Index>(basis.size()))};
      for (const auto& term : gen.at("monomial_exponents_to_coeff")) {
        const auto e = term.at(0).get<Exponent>();
        if (static_cast<int>(e.size()) != J.m) {
          throw Error(ErrorKind::MalformedFile, "exponent vector length differs from m");
        }
        int deg = 0;
        for (int x : e) {
          if (x < 0) throw Error(ErrorKind::MalformedFile, "negative exponent");
          deg += x;
        }
        if (deg != J.n) {
          throw Error(ErrorKind::MalformedFile, "generator term has degree " + std::to_string(deg) + ", expected " +
                                                    std::to_string(J.n));
        }
        const auto& c = term.at(1);
        p.coeffs[static_cast<Eigen::Index>(basis.index(e))] += cplx(c.at(0).get<double>(), c.at(1).get<double>());
      }
      J.generators.push_back(std::move(p));
    }
    return J;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedFile, std::string("ideal file: ") + e.what());
  }
}

inline GradedIdeal parse_ideal(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedFile, std::string("ideal file is not JSON: ") + e.what());
  }
  return ideal_from_json(doc);
}

inline nlohmann::json ideal_to_json(const GradedIdeal& J) {
  const MonomialBasis basis(J.m, J.n);
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : J.generators) {
    nlohmann::json terms = nlohmann::json::array();
    for (Eigen::Index i = 0; i < g.coeffs.size(); ++i) {
      if (g.coeffs[i] != cplx(0.0, 0.0)) {
        terms.push_back({basis[static_cast<std::size_t>(i)], {g.coeffs[i].real(), g.coeffs[i].imag()}});
      }
    }
    gens.push_back({{"monomial_exponents_to_coeff", terms}});
  }
  return {{"m", J.m}, {"n", J.n}, {"generators", gens}};
}

}  // namespace quni
