#pragma once

#include "ffr/freq/transfer_function.hpp"

#include <complex>
#include <iosfwd>
#include <vector>

namespace ffr::freq
{

/// alpha / (s + pole) with real alpha and pole.
struct RealTerm
{
    double alpha;
    double pole;
};

/// One conjugate pair alpha/(s+p) + conj(alpha)/(s+conj(p)) with
/// alpha = a + jb and p = c + jd, stored with d > 0.
struct ComplexTerm
{
    double a;
    double b;
    double c;
    double d;

    std::complex<double> alpha() const { return {a, b}; }
    std::complex<double> pole() const { return {c, d}; }

    /// The pair as written through its complex residue and pole.
    std::complex<double> pair_sum(std::complex<double> s) const;

    /// The same pair re-expanded to the second-order rational
    /// (2a(s + c) + 2bd) / ((s + c)^2 + d^2).
    std::complex<double> second_order_form(std::complex<double> s) const;
};

/// Partial-fraction expansion of a strictly proper rational with distinct
/// poles. Poles use the alpha/(s+p) convention, so stable poles have
/// positive real part.
struct PoleResidueSet
{
    std::vector<RealTerm> real_terms;
    std::vector<ComplexTerm> complex_terms;

    std::complex<double> operator()(std::complex<double> s) const;

    /// Sum of all residues counting both members of each pair
    /// (the impulse response at 0+).
    double residue_sum() const;

    /// Smallest real part over all poles.
    double slowest_decay() const;

    std::size_t pole_count() const { return real_terms.size() + 2 * complex_terms.size(); }

    bool is_stable() const;
};

struct DecompositionOptions
{
    /// |Im(root)| <= imag_tol * (1 + |Re(root)|) classifies a root as real.
    double imag_tol = 1e-9;
    /// Poles closer than this are rejected as repeated.
    double min_pole_distance = 1e-7;
    bool require_stable = true;
};

PoleResidueSet partial_fractions(RationalTF const& tf, DecompositionOptions const& options = {});

/// Decomposition of tf(s) / (s T_d + 1). With T_d = 0 this is partial_fractions(tf).
PoleResidueSet augment_der_poles(
    RationalTF const& tf, double T_d, DecompositionOptions const& options = {}
);

/// One line per term, `real,<alpha>,<pole>` or `complex,<a>,<b>,<c>,<d>`,
/// printed with 17 significant digits.
void write_pole_set(std::ostream& os, PoleResidueSet const& set);

} // namespace ffr::freq
