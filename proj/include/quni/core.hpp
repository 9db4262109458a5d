#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace quni {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Largest operator dimension that is ever stored as a dense matrix.
inline constexpr std::size_t kDefaultDenseLimit = 4096;

/// Entrywise bound on |u^dagger u - I| accepted as unitary.
inline constexpr double kUnitarityTol = 1e-10;

inline constexpr std::string_view kVersion = "0.3.0";

enum class ErrorKind {
  NonUnitary,
  DimensionMismatch,
  UnknownGateName,
  MalformedFile,
  ArityMismatch,
  OverDenseLimit,
  MemoryBudget,
  NotClosed,
  TailNotStabilized,
  NumericallyAmbiguous,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonUnitary: return "NonUnitary";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownGateName: return "UnknownGateName";
    case ErrorKind::MalformedFile: return "MalformedFile";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::OverDenseLimit: return "OverDenseLimit";
    case ErrorKind::MemoryBudget: return "MemoryBudget";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::TailNotStabilized: return "TailNotStabilized";
    case ErrorKind::NumericallyAmbiguous: return "NumericallyAmbiguous";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Integer power with overflow detection; throws InvalidArgument on overflow.
inline std::uint64_t checked_pow(std::uint64_t base, unsigned exponent) {
  std::uint64_t result = 1;
  for (unsigned i = 0; i < exponent; ++i) {
    if (base != 0 && result > UINT64_MAX / base) {
      throw Error(ErrorKind::InvalidArgument,
                  "integer overflow in " + std::to_string(base) + "^" + std::to_string(exponent));
    }
    result *= base;
  }
  return result;
}

inline double max_abs_entry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_unitary(const Matrix& u, double tol = kUnitarityTol) {
  if (u.rows() != u.cols()) {
    return false;
  }
  const Matrix gram = u.adjoint() * u;
  return max_abs_entry(gram - Matrix::Identity(u.rows(), u.cols())) <= tol;
}

}  // namespace quni
