#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermoscan {

enum class Errc {
  BadMagic,
  UnsupportedVersion,
  BadHeader,
  ShapeMismatch,
  NonFiniteTemperature,
  OutOfPhysicalRange,
  Truncated,
  TrailingBytes,
  BadPng,
  SpecInvalid,
  InvalidParameter,
  InvalidConfig,
  EmptyHistogram,
  NoMarkers,
  NoModulesFound,
  LabelNotFound,
  EmptyModule,
  OutOfBounds,
  BadDocument,
  NotSegmented,
  IdConflict,
  Io,
};

std::string_view to_string(Errc code) noexcept;

// Every failure in the toolkit is reported through this type. what() reads
// "<Kind>: <detail>" so a one-line diagnostic always names the error kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  std::string_view kind() const noexcept { return to_string(code_); }

 private:
  Errc code_;
};

}  // namespace thermoscan
