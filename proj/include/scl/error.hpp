#pragma once

#include <stdexcept>
#include <string>

namespace scl {

/// Failure taxonomy shared by all modules.
enum class errc {
  config_invalid,
  ellipticity_violated,
  numerical_failure,
  mesh_invalid,
  unsupported_convention,
  mass_not_spd,
  use_windowed_solver,
  shift_too_close,
  elliptic_region_violated,
  singular_symbol,
  transport_degenerate,
  expansion_inconsistent,
  no_interface_mode,
  correction_failed,
  not_enough_eigenvalues,
  input_invalid,
  secular_pole,
};

inline const char* errc_name(errc c) noexcept {
  switch (c) {
    case errc::config_invalid: return "ConfigInvalid";
    case errc::ellipticity_violated: return "EllipticityViolated";
    case errc::numerical_failure: return "NumericalFailure";
    case errc::mesh_invalid: return "MeshInvalid";
    case errc::unsupported_convention: return "UnsupportedConvention";
    case errc::mass_not_spd: return "MassNotSPD";
    case errc::use_windowed_solver: return "UseWindowedSolver";
    case errc::shift_too_close: return "ShiftTooClose";
    case errc::elliptic_region_violated: return "EllipticRegionViolated";
    case errc::singular_symbol: return "SingularSymbol";
    case errc::transport_degenerate: return "TransportDegenerate";
    case errc::expansion_inconsistent: return "ExpansionInconsistent";
    case errc::no_interface_mode: return "NoInterfaceMode";
    case errc::correction_failed: return "CorrectionFailed";
    case errc::not_enough_eigenvalues: return "NotEnoughEigenvalues";
    case errc::input_invalid: return "InputInvalid";
    case errc::secular_pole: return "SecularPole";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

}  // namespace scl
