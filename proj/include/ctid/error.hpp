#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctid {

/// Failure classes raised by the identification pipeline.
enum class Errc {
  MalformedModel,
  UnstableSystem,
  NonPrincipalLog,
  SingularMap,
  DegenerateMap,
  UnstablePredictor,
  DivergedUnstable,
  SingularInformation,
  RankDeficientRegression,
  SingularCovariance,
  NotPositiveDefinite,
  IllConditionedJacobian,
  PathMismatch,
  UnsupportedRegisterLength,
  AliasedFrequency,
  InvalidArgument,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MalformedModel: return "MalformedModel";
    case Errc::UnstableSystem: return "UnstableSystem";
    case Errc::NonPrincipalLog: return "NonPrincipalLog";
    case Errc::SingularMap: return "SingularMap";
    case Errc::DegenerateMap: return "DegenerateMap";
    case Errc::UnstablePredictor: return "UnstablePredictor";
    case Errc::DivergedUnstable: return "DivergedUnstable";
    case Errc::SingularInformation: return "SingularInformation";
    case Errc::RankDeficientRegression: return "RankDeficientRegression";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::IllConditionedJacobian: return "IllConditionedJacobian";
    case Errc::PathMismatch: return "PathMismatch";
    case Errc::UnsupportedRegisterLength: return "UnsupportedRegisterLength";
    case Errc::AliasedFrequency: return "AliasedFrequency";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) raise(code, what);
}

}  // namespace ctid
