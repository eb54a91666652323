#pragma once

#include "ffr/freq/polynomial.hpp"
#include "ffr/freq/system_params.hpp"

#include <complex>

namespace ffr::freq
{

/// num(s) / den(s), both ascending-degree.
struct RationalTF
{
    Polynomial num;
    Polynomial den;

    /// Strictly proper, finite coefficients, non-zero leading denominator.
    void validate() const;

    std::complex<double> operator()(std::complex<double> s) const;
};

/// Aggregated governor/turbine model G(s) = (F_h T_r s + 1) / ((T_r s + 1)(T_g s + 1)(T_c s + 1)).
RationalTF build_governor_tf(double T_g, double T_c, double T_r, double F_h);

/// Closed-loop frequency deviation per unit power injection,
/// (2Hs + D)^-1 / (1 + G(s) K^-1 (2Hs + D)^-1), cleared to one rational.
/// With K = +inf the droop path vanishes and the result is 1 / (2Hs + D).
RationalTF build_closed_loop(SystemParams const& params);

/// Direct evaluation of the unreduced closed-loop expression; used to check
/// the cleared form.
std::complex<double> closed_loop_direct(SystemParams const& params, std::complex<double> s);

} // namespace ffr::freq
