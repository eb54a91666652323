#include "ffr/freq/polynomial.hpp"

#include "ffr/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace ffr::freq
{

Polynomial
poly_mul(std::span<double const> a, std::span<double const> b)
{
    if (a.empty() || b.empty())
    {
        return {};
    }
    Polynomial out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        for (std::size_t j = 0; j < b.size(); ++j)
        {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

Polynomial
poly_add(std::span<double const> a, std::span<double const> b)
{
    Polynomial out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        out[i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i)
    {
        out[i] += b[i];
    }
    return out;
}

Polynomial
poly_scale(std::span<double const> a, double k)
{
    Polynomial out(a.begin(), a.end());
    for (auto& c : out)
    {
        c *= k;
    }
    return out;
}

Polynomial
poly_derivative(std::span<double const> a)
{
    if (a.size() <= 1)
    {
        return {0.0};
    }
    Polynomial out(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i)
    {
        out[i - 1] = static_cast<double>(i) * a[i];
    }
    return out;
}

Polynomial
poly_trim(std::span<double const> a)
{
    std::size_t n = a.size();
    while (n > 1 && a[n - 1] == 0.0)
    {
        --n;
    }
    if (n == 0)
    {
        return {0.0};
    }
    return Polynomial(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
}

int
poly_degree(std::span<double const> a)
{
    return static_cast<int>(poly_trim(a).size()) - 1;
}

double
poly_eval(std::span<double const> a, double x)
{
    double acc = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it)
    {
        acc = acc * x + *it;
    }
    return acc;
}

std::complex<double>
poly_eval(std::span<double const> a, std::complex<double> x)
{
    std::complex<double> acc{0.0, 0.0};
    for (auto it = a.rbegin(); it != a.rend(); ++it)
    {
        acc = acc * x + *it;
    }
    return acc;
}

std::vector<std::complex<double>>
poly_roots(std::span<double const> a)
{
    Polynomial p = poly_trim(a);
    int const n = static_cast<int>(p.size()) - 1;
    if (n < 1)
    {
        return {};
    }
    double const lead = p.back();
    if (lead == 0.0 || !std::isfinite(lead))
    {
        throw DomainError("poly_roots: leading coefficient must be finite and non-zero");
    }

    // Companion matrix of the monic polynomial; last column holds -c_i/c_n.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
    {
        companion(i, i - 1) = 1.0;
    }
    for (int i = 0; i < n; ++i)
    {
        companion(i, n - 1) = -p[static_cast<std::size_t>(i)] / lead;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
    {
        throw NumericalError("poly_roots: companion eigenvalue iteration failed");
    }

    Polynomial dp = poly_derivative(p);
    std::vector<std::complex<double>> roots;
    roots.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
    {
        std::complex<double> r = solver.eigenvalues()[i];
        // One Newton step, kept only when it is small and lowers the residual;
        // near a multiple root the derivative vanishes and the step is noise.
        std::complex<double> const d = poly_eval(dp, r);
        if (std::abs(d) > 0.0)
        {
            std::complex<double> const step = poly_eval(p, r) / d;
            std::complex<double> const polished = r - step;
            if (std::isfinite(polished.real()) && std::isfinite(polished.imag())
                && std::abs(step) <= 1e-6 * (1.0 + std::abs(r))
                && std::abs(poly_eval(p, polished)) <= std::abs(poly_eval(p, r)))
            {
                r = polished;
            }
        }
        roots.push_back(r);
    }
    return roots;
}

} // namespace ffr::freq
