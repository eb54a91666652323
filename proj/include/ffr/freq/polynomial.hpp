#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ffr::freq
{

/// Real polynomial coefficients in ascending degree: c[0] + c[1] s + ...
using Polynomial = std::vector<double>;

Polynomial poly_mul(std::span<double const> a, std::span<double const> b);
Polynomial poly_add(std::span<double const> a, std::span<double const> b);
Polynomial poly_scale(std::span<double const> a, double k);
Polynomial poly_derivative(std::span<double const> a);

/// Drops exactly-zero leading (highest degree) coefficients; keeps at least one.
Polynomial poly_trim(std::span<double const> a);

/// Degree after trimming; the zero polynomial has degree 0.
int poly_degree(std::span<double const> a);

double poly_eval(std::span<double const> a, double x);
std::complex<double> poly_eval(std::span<double const> a, std::complex<double> x);

/// All complex roots, from the eigenvalues of the companion matrix followed
/// by one Newton step per root. The leading coefficient must be non-zero.
std::vector<std::complex<double>> poly_roots(std::span<double const> a);

} // namespace ffr::freq
