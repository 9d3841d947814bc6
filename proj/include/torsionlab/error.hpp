#pragma once

#include <stdexcept>
#include <string>

namespace torsionlab {

/// Failure categories shared by every module; the C API maps these 1:1 onto
/// `tl_status` codes.
enum class ErrorCode {
  DomainError = 1,
  NonConvergence,
  TruncationFailure,
  Unsupported,
  ExpansionInsufficient,
  DivergenceSuspected,
  FitIllConditioned,
  TailUnbounded,
  Degenerate,
  InvalidArgument,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of the numerical machinery (as opposed to bad input).
  bool is_numerical() const noexcept {
    return code_ == ErrorCode::NonConvergence ||
           code_ == ErrorCode::TruncationFailure ||
           code_ == ErrorCode::ExpansionInsufficient ||
           code_ == ErrorCode::DivergenceSuspected ||
           code_ == ErrorCode::FitIllConditioned ||
           code_ == ErrorCode::TailUnbounded ||
           code_ == ErrorCode::Degenerate;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace torsionlab
