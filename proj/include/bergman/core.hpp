#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace bergman {

using cplx = std::complex<double>;

/// Largest complex dimension supported by the fixed-size point type.
inline constexpr int kMaxDim = 3;

enum class ErrorCode {
  OutsideTubularNeighborhood,
  NoConvergence,
  NotOnBoundary,
  WrongDomainKind,
  BisectionFailure,
  ResolutionExceeded,
  EmptyRegion,
  SingularSample,
  DomainKindUnsupported,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutsideTubularNeighborhood: return "OutsideTubularNeighborhood";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::WrongDomainKind: return "WrongDomainKind";
    case ErrorCode::BisectionFailure: return "BisectionFailure";
    case ErrorCode::ResolutionExceeded: return "ResolutionExceeded";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::SingularSample: return "SingularSample";
    case ErrorCode::DomainKindUnsupported: return "DomainKindUnsupported";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A point of C^n stored as n complex coordinates (n <= kMaxDim).
struct CPoint {
  std::array<cplx, kMaxDim> c{};
  int dim = 1;

  CPoint() = default;
  explicit CPoint(int n) : dim(n) {}
  CPoint(cplx z1) : dim(1) { c[0] = z1; }
  CPoint(cplx z1, cplx z2) : dim(2) {
    c[0] = z1;
    c[1] = z2;
  }

  cplx& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  const cplx& operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  double norm_sq() const {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) acc += std::norm(c[static_cast<std::size_t>(i)]);
    return acc;
  }
  double norm() const { return std::sqrt(norm_sq()); }

  friend CPoint operator-(const CPoint& a, const CPoint& b) {
    CPoint r(a.dim);
    for (int i = 0; i < a.dim; ++i) r[i] = a[i] - b[i];
    return r;
  }
  friend CPoint operator+(const CPoint& a, const CPoint& b) {
    CPoint r(a.dim);
    for (int i = 0; i < a.dim; ++i) r[i] = a[i] + b[i];
    return r;
  }
  friend CPoint operator*(double t, const CPoint& a) {
    CPoint r(a.dim);
    for (int i = 0; i < a.dim; ++i) r[i] = t * a[i];
    return r;
  }
  friend CPoint operator*(cplx t, const CPoint& a) {
    CPoint r(a.dim);
    for (int i = 0; i < a.dim; ++i) r[i] = t * a[i];
    return r;
  }
  friend bool operator==(const CPoint& a, const CPoint& b) {
    if (a.dim != b.dim) return false;
    for (int i = 0; i < a.dim; ++i)
      if (a[i] != b[i]) return false;
    return true;
  }
};

/// Hermitian product <a, b> = sum a_i conj(b_i).
inline cplx hermitian(const CPoint& a, const CPoint& b) {
  cplx acc = 0.0;
  for (int i = 0; i < a.dim; ++i) acc += a[i] * std::conj(b[i]);
  return acc;
}

inline double distance(const CPoint& a, const CPoint& b) { return (a - b).norm(); }

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr const char* kVersion = "0.3.0";

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace bergman
