#include "ffr/freq/pole_residue.hpp"

#include "ffr/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ffr::freq
{

std::complex<double>
ComplexTerm::pair_sum(std::complex<double> s) const
{
    std::complex<double> const al = alpha();
    std::complex<double> const p = pole();
    return al / (s + p) + std::conj(al) / (s + std::conj(p));
}

std::complex<double>
ComplexTerm::second_order_form(std::complex<double> s) const
{
    std::complex<double> const shifted = s + c;
    return (2.0 * a * shifted + 2.0 * b * d) / (shifted * shifted + d * d);
}

std::complex<double>
PoleResidueSet::operator()(std::complex<double> s) const
{
    std::complex<double> acc{0.0, 0.0};
    for (auto const& t : real_terms)
    {
        acc += t.alpha / (s + t.pole);
    }
    for (auto const& t : complex_terms)
    {
        acc += t.pair_sum(s);
    }
    return acc;
}

double
PoleResidueSet::residue_sum() const
{
    double acc = 0.0;
    for (auto const& t : real_terms)
    {
        acc += t.alpha;
    }
    for (auto const& t : complex_terms)
    {
        acc += 2.0 * t.a;
    }
    return acc;
}

double
PoleResidueSet::slowest_decay() const
{
    double slowest = std::numeric_limits<double>::infinity();
    for (auto const& t : real_terms)
    {
        slowest = std::min(slowest, t.pole);
    }
    for (auto const& t : complex_terms)
    {
        slowest = std::min(slowest, t.c);
    }
    return slowest;
}

bool
PoleResidueSet::is_stable() const
{
    return pole_count() == 0 || slowest_decay() > 0.0;
}

PoleResidueSet
partial_fractions(RationalTF const& tf, DecompositionOptions const& options)
{
    tf.validate();
    std::vector<std::complex<double>> const roots = poly_roots(tf.den);

    for (std::size_t i = 0; i < roots.size(); ++i)
    {
        for (std::size_t j = i + 1; j < roots.size(); ++j)
        {
            if (std::abs(roots[i] - roots[j]) < options.min_pole_distance)
            {
                throw UnsupportedStructureError(fmt::format(
                    "partial_fractions: repeated pole near {}{:+}j",
                    -roots[i].real(),
                    -roots[i].imag()
                ));
            }
        }
    }

    Polynomial const dden = poly_derivative(tf.den);
    auto residue_at = [&](std::complex<double> r) {
        return poly_eval(tf.num, r) / poly_eval(dden, r);
    };

    PoleResidueSet set;
    std::vector<std::complex<double>> upper;
    std::vector<std::complex<double>> lower;
    for (auto const& r : roots)
    {
        double const tol = options.imag_tol * (1.0 + std::abs(r.real()));
        if (std::abs(r.imag()) <= tol)
        {
            double const root = r.real();
            // Polish on the real axis so the residue is computed from a real root.
            double refined = root;
            double const dv = poly_eval(dden, root);
            if (dv != 0.0)
            {
                double const step = poly_eval(tf.den, root) / dv;
                if (std::isfinite(step) && std::abs(step) < options.min_pole_distance)
                {
                    refined = root - step;
                }
            }
            double const alpha = poly_eval(tf.num, refined) / poly_eval(dden, refined);
            set.real_terms.push_back({alpha, -refined});
        }
        else if (r.imag() < 0.0)
        {
            // p = -r has positive imaginary part.
            lower.push_back(r);
        }
        else
        {
            upper.push_back(r);
        }
    }

    if (upper.size() != lower.size())
    {
        throw NumericalError("partial_fractions: complex roots do not form conjugate pairs");
    }
    std::vector<bool> used(upper.size(), false);
    for (auto const& r : lower)
    {
        std::size_t best = upper.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < upper.size(); ++k)
        {
            double const dist = std::abs(upper[k] - std::conj(r));
            if (!used[k] && dist < best_dist)
            {
                best = k;
                best_dist = dist;
            }
        }
        if (best == upper.size())
        {
            throw NumericalError("partial_fractions: unmatched complex root");
        }
        used[best] = true;
        // Average with the partner to remove asymmetric rounding.
        std::complex<double> const root{
            0.5 * (r.real() + upper[best].real()), 0.5 * (r.imag() - upper[best].imag())
        };
        std::complex<double> const alpha = residue_at(root);
        set.complex_terms.push_back({alpha.real(), alpha.imag(), -root.real(), -root.imag()});
    }

    std::sort(set.real_terms.begin(), set.real_terms.end(), [](auto const& x, auto const& y) {
        return x.pole < y.pole;
    });
    std::sort(set.complex_terms.begin(), set.complex_terms.end(), [](auto const& x, auto const& y) {
        return x.c < y.c || (x.c == y.c && x.d < y.d);
    });

    if (options.require_stable && !set.is_stable())
    {
        throw DomainError("partial_fractions: closed loop is not stable");
    }
    return set;
}

PoleResidueSet
augment_der_poles(RationalTF const& tf, double T_d, DecompositionOptions const& options)
{
    if (!(T_d >= 0.0) || !std::isfinite(T_d))
    {
        throw DomainError("augment_der_poles: T_d must be finite and >= 0");
    }
    if (T_d == 0.0)
    {
        return partial_fractions(tf, options);
    }

    double const extra = 1.0 / T_d;
    for (auto const& r : poly_roots(tf.den))
    {
        if (std::abs(-r - std::complex<double>{extra, 0.0}) < options.min_pole_distance)
        {
            throw UnsupportedStructureError(fmt::format(
                "augment_der_poles: lag pole 1/T_d = {} collides with a closed-loop pole", extra
            ));
        }
    }
    RationalTF augmented{tf.num, poly_mul(tf.den, Polynomial{1.0, T_d})};
    return partial_fractions(augmented, options);
}

void
write_pole_set(std::ostream& os, PoleResidueSet const& set)
{
    for (auto const& t : set.real_terms)
    {
        os << fmt::format("real,{:.17g},{:.17g}\n", t.alpha, t.pole);
    }
    for (auto const& t : set.complex_terms)
    {
        os << fmt::format("complex,{:.17g},{:.17g},{:.17g},{:.17g}\n", t.a, t.b, t.c, t.d);
    }
}

} // namespace ffr::freq
