#pragma once

#include <span>

namespace ffr::freq
{

/// Aggregated single-bus frequency response constants. Defaults reproduce the
/// reference case-study system (50 Hz, 1000 MW base).
struct SystemParams
{
    double H = 3.0;      ///< inertia constant, s
    double D = 0.1;      ///< load damping, pu
    double K = 0.5;      ///< droop characteristic, pu; +inf disables droop
    double T_g = 0.3;    ///< governor time constant, s
    double T_c = 0.5;    ///< turbine time constant, s
    double T_r = 12.0;   ///< reheat time constant, s
    double F_h = 0.15;   ///< reheat gain
    double f_nom = 50.0; ///< nominal frequency, Hz
    double S_base = 1000.0; ///< base power, MW

    /// Throws DomainError when any invariant is violated.
    void validate() const;

    /// Converts a signed per-unit deviation to an absolute frequency in Hz.
    double to_hz(double deviation_pu) const { return f_nom * (1.0 + deviation_pu); }

    /// Per-unit magnitude of a frequency limit given in Hz below nominal.
    double limit_from_hz(double nadir_hz) const { return (f_nom - nadir_hz) / f_nom; }

    bool operator==(SystemParams const&) const = default;
};

struct GeneratorUnit
{
    double rating_mva;
    double inertia_s;
};

/// System inertia H = sum(S_g * H_g) / S_sym.
double aggregate_inertia(std::span<GeneratorUnit const> units, double s_sym_mva);

} // namespace ffr::freq
