#pragma once

#include <stdexcept>
#include <string>

namespace cuspidal {

enum class ErrorKind {
  SingularMatrix,
  NotDefinite,
  BadParameter,
  MixedLattices,
  ZeroVector,
  DependentInput,
  DegenerateComplement,
  MemberOfSummand,
  NotIsometry,
  OddLattice,
  GroupTooLarge,
  NotIsotropic,
  NonIntegralGlue,
  NotNegativeDefinite,
  RootsNotFullRank,
  BadCase,
  BadIndex,
  HypothesisFailed,
  NotSquareFree,
  CandidateRejected,
  ParseError,
  Unsupported,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotDefinite: return "NotDefinite";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::MixedLattices: return "MixedLattices";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DependentInput: return "DependentInput";
    case ErrorKind::DegenerateComplement: return "DegenerateComplement";
    case ErrorKind::MemberOfSummand: return "MemberOfSummand";
    case ErrorKind::NotIsometry: return "NotIsometry";
    case ErrorKind::OddLattice: return "OddLattice";
    case ErrorKind::GroupTooLarge: return "GroupTooLarge";
    case ErrorKind::NotIsotropic: return "NotIsotropic";
    case ErrorKind::NonIntegralGlue: return "NonIntegralGlue";
    case ErrorKind::NotNegativeDefinite: return "NotNegativeDefinite";
    case ErrorKind::RootsNotFullRank: return "RootsNotFullRank";
    case ErrorKind::BadCase: return "BadCase";
    case ErrorKind::BadIndex: return "BadIndex";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::NotSquareFree: return "NotSquareFree";
    case ErrorKind::CandidateRejected: return "CandidateRejected";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the ErrorKind tags.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace cuspidal
