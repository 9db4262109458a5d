#pragma once

// Gates, gate sets and the generator collections used by the universality
// reduction.

#include "quni/core.hpp"
#include "quni/factor_permutation.hpp"
#include "quni/tensorop.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace quni {

/// A unitary on (C^d)^{⊗arity}, stored in factored form
///
///     G = P_left · (core ⊗ I) · P_right
///
/// where core acts on the first core_arity qudits. Dense gates have
/// core_arity == arity and identity permutations. The factored form lets
/// extensions and wire permutations of large systems stay symbolic; matrix()
/// materializes on demand below the dense limit.
class UnitaryGate {
 public:
  UnitaryGate() = default;

  /// Dense gate; arity is inferred from the matrix dimension.
  UnitaryGate(int d, Matrix matrix, std::string name = {})
      : d_(d), core_(std::move(matrix)), name_(std::move(name)) {
    if (d < 2) {
      throw Error(ErrorKind::InvalidArgument, "qudit dimension d must be at least 2");
    }
    if (core_.rows() != core_.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "gate matrix must be square");
    }
    core_arity_ = arity_for_dim(d, static_cast<std::uint64_t>(core_.rows()));
    if (core_arity_ < 1) {
      throw Error(ErrorKind::DimensionMismatch, "matrix dimension " + std::to_string(core_.rows()) +
                                                    " is not a positive power of d=" + std::to_string(d));
    }
    if (!is_unitary(core_)) {
      throw Error(ErrorKind::NonUnitary, "gate '" + name_ + "' deviates from unitarity by more than 1e-10");
    }
    arity_ = core_arity_;
    left_ = FactorPermutation::identity(arity_);
    right_ = left_;
  }

  /// The factor permutation P_σ on (C^d)^{⊗σ.size()} as a gate.
  static UnitaryGate permutation(int d, const FactorPermutation& sigma, std::string name = {}) {
    UnitaryGate g;
    g.d_ = d;
    g.arity_ = sigma.size();
    g.core_arity_ = 0;
    g.core_ = Matrix::Identity(1, 1);
    g.left_ = sigma;
    g.right_ = FactorPermutation::identity(sigma.size());
    g.name_ = std::move(name);
    return g;
  }

  [[nodiscard]] int d() const { return d_; }
  [[nodiscard]] int arity() const { return arity_; }
  [[nodiscard]] int core_arity() const { return core_arity_; }
  [[nodiscard]] const Matrix& core() const { return core_; }
  [[nodiscard]] const FactorPermutation& left() const { return left_; }
  [[nodiscard]] const FactorPermutation& right() const { return right_; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] std::uint64_t dim() const { return checked_pow(static_cast<std::uint64_t>(d_), static_cast<unsigned>(arity_)); }
  [[nodiscard]] bool is_dense_form() const {
    return core_arity_ == arity_ && left_.is_identity() && right_.is_identity();
  }

  /// Matrix-free form on (C^d)^{⊗arity}.
  [[nodiscard]] StructuredOperator as_operator() const {
    StructuredOperator op = StructuredOperator::permutation(d_, right_);
    // a 1×1 core still carries the global phase
    if (core_arity_ > 0 || core_(0, 0) != cplx(1.0, 0.0)) {
      op = op.then(StructuredOperator::local(d_, arity_, 0, core_));
    }
    return op.then(StructuredOperator::permutation(d_, left_));
  }

  [[nodiscard]] Matrix matrix(std::size_t dense_limit = kDefaultDenseLimit) const {
    if (is_dense_form()) {
      return core_;
    }
    if (dim() > dense_limit) {
      throw Error(ErrorKind::OverDenseLimit, "gate dimension " + std::to_string(dim()) + " exceeds the dense limit");
    }
    return as_operator().materialize(dense_limit);
  }

  [[nodiscard]] UnitaryGate with_name(std::string name) const {
    UnitaryGate g = *this;
    g.name_ = std::move(name);
    return g;
  }

  static int arity_for_dim(int d, std::uint64_t dim) {
    int n = 0;
    std::uint64_t p = 1;
    while (p < dim) {
      p *= static_cast<std::uint64_t>(d);
      ++n;
    }
    return p == dim ? n : -1;
  }

 private:
  friend UnitaryGate normalize(const UnitaryGate& u);
  friend UnitaryGate extend_to_N(const UnitaryGate& u, int N);
  friend UnitaryGate permute_gate(const UnitaryGate& v, const FactorPermutation& sigma);

  int d_ = 2;
  int arity_ = 0;
  int core_arity_ = 0;
  Matrix core_ = Matrix::Identity(1, 1);
  FactorPermutation left_;
  FactorPermutation right_;
  std::string name_;
};

struct GateSet {
  int d = 2;
  int arity = 1;
  std::vector<UnitaryGate> gates;

  [[nodiscard]] std::uint64_t dim() const { return checked_pow(static_cast<std::uint64_t>(d), static_cast<unsigned>(arity)); }

  /// Validates that every gate shares (d, arity) and the set is nonempty.
  void validate() const {
    if (gates.empty()) {
      throw Error(ErrorKind::MalformedFile, "gate set must contain at least one gate");
    }
    for (const auto& g : gates) {
      if (g.d() != d || g.arity() != arity) {
        throw Error(ErrorKind::ArityMismatch, "gate '" + g.name() + "' does not act on (C^" + std::to_string(d) +
                                                  ")^" + std::to_string(arity));
      }
    }
  }
};

namespace detail {

/// Sign of the permutation induced on the d^N computational basis states by
/// a factor permutation.
inline int basis_permutation_sign(int d, const FactorPermutation& sigma) {
  const int n = sigma.size();
  if (n < 2 || !sigma.is_odd()) {
    return 1;
  }
  // a factor transposition swaps d^{N-2} · d(d-1)/2 pairs of basis states
  const bool pairs_odd = (d * (d - 1) / 2) % 2 == 1 && (n == 2 || d % 2 == 1);
  return pairs_odd ? -1 : 1;
}

inline double wrap_angle(long double a) {
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  a = std::fmod(a, two_pi);
  if (a > std::numbers::pi_v<long double>) {
    a -= two_pi;
  } else if (a <= -std::numbers::pi_v<long double>) {
    a += two_pi;
  }
  return static_cast<double>(a);
}

}  // namespace detail

/// (det u)^{-1/D} · u with the principal D-th root: the phase removed is
/// exp(i·Arg(det u)/D), Arg in (-π, π]. The result has determinant 1 up to
/// round-off and differs from u by a global phase.
inline UnitaryGate normalize(const UnitaryGate& u) {
  const cplx det_core = u.core_.determinant();
  const long double multiplicity =
      std::pow(static_cast<long double>(u.d_), static_cast<long double>(u.arity_ - u.core_arity_));
  long double angle = multiplicity * static_cast<long double>(std::arg(det_core));
  if (detail::basis_permutation_sign(u.d_, u.left_.compose(u.right_)) < 0) {
    angle += std::numbers::pi_v<long double>;
  }
  const double principal = detail::wrap_angle(angle);
  const long double dim = std::pow(static_cast<long double>(u.d_), static_cast<long double>(u.arity_));
  const double phase = static_cast<double>(-static_cast<long double>(principal) / dim);
  UnitaryGate out = u;
  out.core_ *= std::polar(1.0, phase);
  return out;
}

/// u ⊗ I on N qudits; u acts on the first u.arity() qudits.
inline UnitaryGate extend_to_N(const UnitaryGate& u, int N) {
  if (N < u.arity_) {
    throw Error(ErrorKind::ArityMismatch, "cannot extend a " + std::to_string(u.arity_) + "-qudit gate to " +
                                              std::to_string(N) + " qudits");
  }
  auto pad = [N](const FactorPermutation& p) {
    std::vector<int> im = p.images();
    for (int i = p.size(); i < N; ++i) {
      im.push_back(i);
    }
    return FactorPermutation(std::move(im));
  };
  UnitaryGate out = u;
  out.arity_ = N;
  out.left_ = pad(u.left_);
  out.right_ = pad(u.right_);
  return out;
}

/// v^σ = P_σ v P_σ^{-1}.
inline UnitaryGate permute_gate(const UnitaryGate& v, const FactorPermutation& sigma) {
  if (sigma.size() != v.arity_) {
    throw Error(ErrorKind::ArityMismatch, "permutation size " + std::to_string(sigma.size()) +
                                              " differs from gate arity " + std::to_string(v.arity_));
  }
  UnitaryGate out = v;
  out.left_ = sigma.compose(v.left_);
  out.right_ = v.right_.compose(sigma.inverse());
  return out;
}

/// Γ_N ∪ Σ with Σ = {(1 2), (1 2 … N)} for N ≥ 3, {(1 2)} for N = 2 and
/// empty for N = 1.
inline std::vector<UnitaryGate> universality_generators(const GateSet& gates, int N) {
  gates.validate();
  if (N < gates.arity) {
    throw Error(ErrorKind::ArityMismatch, "N must be at least the gate arity");
  }
  std::vector<UnitaryGate> out;
  for (const auto& g : gates.gates) {
    out.push_back(extend_to_N(g, N));
  }
  if (N >= 2) {
    out.push_back(UnitaryGate::permutation(gates.d, FactorPermutation::transposition(N, 0, 1), "P(1 2)"));
  }
  if (N >= 3) {
    out.push_back(UnitaryGate::permutation(gates.d, FactorPermutation::cycle(N), "P(1..N)"));
  }
  return out;
}

/// ρ_{2k} of a gate. Gates of dimension ≤ 64 use the Kronecker form with
/// the materialized matrix on each slot; larger gates act qudit-wise with
/// the wire permutations lifted to all 2k slots.
inline StructuredOperator rho2k(const UnitaryGate& g, int k) {
  if (g.dim() <= 64) {
    return rho2k(g.matrix(), k);
  }
  const int n = g.arity();
  const int slots = 2 * k;
  StructuredOperator op = StructuredOperator::permutation(g.d(), g.right().lifted(slots));
  if (g.core_arity() > 0) {
    const Matrix conj = g.core().conjugate();
    for (int s = 0; s < slots; ++s) {
      op = op.then(StructuredOperator::local(g.d(), slots * n, s * n, s < k ? g.core() : conj));
    }
  }
  return op.then(StructuredOperator::permutation(g.d(), g.left().lifted(slots)));
}

// --- built-in gates --------------------------------------------------------

namespace detail {

inline Matrix shift_matrix(int d) {
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    m((j + 1) % d, j) = 1.0;
  }
  return m;
}

inline Matrix clock_matrix(int d) {
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    m(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
  }
  return m;
}

inline Matrix controlled(const Matrix& target, int controls) {
  const Eigen::Index dim = target.rows() << controls;
  Matrix m = Matrix::Identity(dim, dim);
  m.bottomRightCorner(target.rows(), target.cols()) = target;
  return m;
}

}  // namespace detail

/// Matrix of a built-in gate, or nullopt when the name is unknown for d.
inline std::optional<Matrix> builtin_gate_matrix(const std::string& name, int d) {
  using namespace std::complex_literals;
  if (name == "I") {
    return Matrix::Identity(d, d);
  }
  if (name == "SHIFT") {
    return detail::shift_matrix(d);
  }
  if (name == "CLOCK") {
    return detail::clock_matrix(d);
  }
  if (d != 2) {
    return std::nullopt;
  }
  const double r = std::numbers::sqrt2 / 2.0;
  Matrix m(2, 2);
  if (name == "X") {
    m << 0, 1, 1, 0;
  } else if (name == "Y") {
    m << 0, -1i, 1i, 0;
  } else if (name == "Z") {
    m << 1, 0, 0, -1;
  } else if (name == "H") {
    m << r, r, r, -r;
  } else if (name == "S") {
    m << 1, 0, 0, 1i;
  } else if (name == "T") {
    m << 1, 0, 0, std::polar(1.0, std::numbers::pi / 4.0);
  } else if (name == "CNOT") {
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    return detail::controlled(x, 1);
  } else if (name == "CZ") {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    return detail::controlled(z, 1);
  } else if (name == "SWAP") {
    Matrix s = Matrix::Zero(4, 4);
    s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
    return s;
  } else if (name == "TOFFOLI") {
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    return detail::controlled(x, 2);
  } else {
    return std::nullopt;
  }
  return m;
}

/// Built-in gate extended to `arity` qudits (acting on the leading qudits).
inline UnitaryGate builtin_gate(const std::string& name, int d, int arity) {
  auto m = builtin_gate_matrix(name, d);
  if (!m) {
    throw Error(ErrorKind::UnknownGateName, "no built-in gate '" + name + "' for d=" + std::to_string(d));
  }
  UnitaryGate g(d, std::move(*m), name);
  if (g.arity() > arity) {
    throw Error(ErrorKind::ArityMismatch, "gate '" + name + "' needs arity >= " + std::to_string(g.arity()));
  }
  return extend_to_N(g, arity);
}

// --- gate file I/O ----------------------------------------------------------

namespace detail {

inline Matrix parse_matrix(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty()) {
    throw Error(ErrorKind::MalformedFile, "matrix must be a nonempty array of rows");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& e = row[static_cast<std::size_t>(j)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw Error(ErrorKind::MalformedFile, "matrix entries must be [re, im] pairs");
      }
      m(i, j) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline GateSet gateset_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("d") || !doc.contains("arity") || !doc.contains("gates")) {
    throw Error(ErrorKind::MalformedFile, "gate file needs keys \"d\", \"arity\" and \"gates\"");
  }
  if (!doc["d"].is_number_integer() || !doc["arity"].is_number_integer() || !doc["gates"].is_array()) {
    throw Error(ErrorKind::MalformedFile, "\"d\" and \"arity\" must be integers and \"gates\" an array");
  }
  GateSet set;
  set.d = doc["d"].get<int>();
  set.arity = doc["arity"].get<int>();
  if (set.d < 2 || set.arity < 1) {
    throw Error(ErrorKind::MalformedFile, "need d >= 2 and arity >= 1");
  }
  const std::uint64_t dim = set.dim();
  for (const auto& entry : doc["gates"]) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string()) {
      throw Error(ErrorKind::MalformedFile, "each gate needs a string \"name\"");
    }
    const auto name = entry["name"].get<std::string>();
    if (name == "custom") {
      if (!entry.contains("matrix")) {
        throw Error(ErrorKind::MalformedFile, "custom gate needs a \"matrix\"");
      }
      const std::string label = entry.contains("label") && entry["label"].is_string()
                                    ? entry["label"].get<std::string>()
                                    : "custom";
      Matrix m = detail::parse_matrix(entry["matrix"]);
      if (static_cast<std::uint64_t>(m.rows()) != dim) {
        throw Error(ErrorKind::DimensionMismatch, "custom gate '" + label + "' has dimension " +
                                                      std::to_string(m.rows()) + ", expected d^arity = " +
                                                      std::to_string(dim));
      }
      set.gates.emplace_back(set.d, std::move(m), label);
    } else {
      set.gates.push_back(builtin_gate(name, set.d, set.arity));
    }
  }
  set.validate();
  return set;
}

inline GateSet parse_gateset(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedFile, e.what());
  }
  return gateset_from_json(doc);
}

/// Every gate written as a custom matrix.
inline nlohmann::json gateset_to_json(const GateSet& set) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : set.gates) {
    gates.push_back({{"name", "custom"}, {"label", g.name()}, {"matrix", detail::matrix_to_json(g.matrix())}});
  }
  return {{"d", set.d}, {"arity", set.arity}, {"gates", std::move(gates)}};
}

inline std::string serialize_gateset(const GateSet& set) { return gateset_to_json(set).dump(2); }

}  // namespace quni
