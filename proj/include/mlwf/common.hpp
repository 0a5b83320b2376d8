#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mlwf {

using cdouble = std::complex<double>;

/// Base of all error families thrown by the engine. Each family maps to a
/// distinct CLI exit code (see tools/).
class Error : public std::runtime_error {
 public:
  Error(std::string family, const std::string& what)
      : std::runtime_error(what), family_(std::move(family)) {}
  const std::string& family() const noexcept { return family_; }

 private:
  std::string family_;
};

struct SingularBasis : Error {
  explicit SingularBasis(const std::string& w) : Error("SingularBasis", w) {}
};

struct InvalidGridSize : Error {
  explicit InvalidGridSize(const std::string& w) : Error("InvalidGridSize", w) {}
};

struct EigFailure : Error {
  explicit EigFailure(const std::string& w) : Error("EigFailure", w) {}
};

struct GapViolation : Error {
  GapViolation(int k_index_, double gap_, const std::string& w)
      : Error("GapViolation", w), k_index(k_index_), gap(gap_) {}
  int k_index;
  double gap;
};

struct DegenerateProjection : Error {
  DegenerateProjection(int k_index_, double sigma_min_, const std::string& w)
      : Error("DegenerateProjection", w), k_index(k_index_), sigma_min(sigma_min_) {}
  int k_index;
  double sigma_min;
};

struct TransportGap : Error {
  TransportGap(int step_, const std::string& w) : Error("TransportGap", w), step(step_) {}
  int step;
};

struct NonOrthonormalInput : Error {
  explicit NonOrthonormalInput(const std::string& w) : Error("NonOrthonormalInput", w) {}
};

struct LineSearchStall : Error {
  explicit LineSearchStall(const std::string& w) : Error("LineSearchStall", w) {}
};

struct NotAbelian : Error {
  explicit NotAbelian(const std::string& w) : Error("NotAbelian", w) {}
};

struct NonzeroMean : Error {
  explicit NonzeroMean(const std::string& w) : Error("NonzeroMean", w) {}
};

struct CenterDrift : Error {
  explicit CenterDrift(const std::string& w) : Error("CenterDrift", w) {}
};

struct InsufficientDecay : Error {
  explicit InsufficientDecay(const std::string& w) : Error("InsufficientDecay", w) {}
};

struct QuadratureDivergence : Error {
  explicit QuadratureDivergence(const std::string& w) : Error("QuadratureDivergence", w) {}
};

struct TangencyViolation : Error {
  explicit TangencyViolation(const std::string& w) : Error("TangencyViolation", w) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error("ConfigError", w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error("IoError", w) {}
};

}  // namespace mlwf
