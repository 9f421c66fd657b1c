#include "thermoscan/error.hpp"

namespace thermoscan {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::BadHeader: return "BadHeader";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFiniteTemperature: return "NonFiniteTemperature";
    case Errc::OutOfPhysicalRange: return "OutOfPhysicalRange";
    case Errc::Truncated: return "Truncated";
    case Errc::TrailingBytes: return "TrailingBytes";
    case Errc::BadPng: return "BadPng";
    case Errc::SpecInvalid: return "SpecInvalid";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptyHistogram: return "EmptyHistogram";
    case Errc::NoMarkers: return "NoMarkers";
    case Errc::NoModulesFound: return "NoModulesFound";
    case Errc::LabelNotFound: return "LabelNotFound";
    case Errc::EmptyModule: return "EmptyModule";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::BadDocument: return "BadDocument";
    case Errc::NotSegmented: return "NotSegmented";
    case Errc::IdConflict: return "IdConflict";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace thermoscan
