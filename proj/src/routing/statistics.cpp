#include "ffr/routing/statistics.hpp"

#include "ffr/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace ffr::routing
{

EmpiricalCdf
empirical_cdf(std::span<double const> values)
{
    if (values.empty())
    {
        throw DomainError("empirical_cdf: no values");
    }
    EmpiricalCdf cdf;
    cdf.values.assign(values.begin(), values.end());
    for (double v : cdf.values)
    {
        if (!std::isfinite(v))
        {
            throw DomainError("empirical_cdf: non-finite value");
        }
    }
    std::sort(cdf.values.begin(), cdf.values.end());
    auto const n = static_cast<double>(cdf.values.size());
    cdf.cum_prob.resize(cdf.values.size());
    for (std::size_t i = 0; i < cdf.values.size(); ++i)
    {
        cdf.cum_prob[i] = static_cast<double>(i + 1) / n;
    }
    return cdf;
}

double
percentile(EmpiricalCdf const& cdf, double q)
{
    if (cdf.values.empty())
    {
        throw DomainError("percentile: empty distribution");
    }
    if (!(q >= 0.0 && q <= 1.0))
    {
        throw DomainError("percentile: q must lie in [0, 1]");
    }
    auto const it = std::lower_bound(cdf.cum_prob.begin(), cdf.cum_prob.end(), q);
    if (it == cdf.cum_prob.end())
    {
        return cdf.values.back();
    }
    return cdf.values[static_cast<std::size_t>(it - cdf.cum_prob.begin())];
}

std::vector<HistogramBin>
histogram(std::span<double const> values, double bin_width_s)
{
    if (values.empty())
    {
        throw DomainError("histogram: no values");
    }
    if (!(bin_width_s > 0.0) || !std::isfinite(bin_width_s))
    {
        throw DomainError("histogram: bin width must be > 0");
    }
    auto const [mn, mx] = std::minmax_element(values.begin(), values.end());
    auto const first = static_cast<long long>(std::floor(*mn / bin_width_s));
    auto const last = static_cast<long long>(std::floor(*mx / bin_width_s));
    std::vector<HistogramBin> bins;
    bins.reserve(static_cast<std::size_t>(last - first + 1));
    for (long long k = first; k <= last; ++k)
    {
        bins.push_back({static_cast<double>(k) * bin_width_s, static_cast<double>(k + 1) * bin_width_s, 0});
    }
    for (double v : values)
    {
        auto const k = static_cast<long long>(std::floor(v / bin_width_s));
        ++bins[static_cast<std::size_t>(k - first)].count;
    }
    return bins;
}

std::vector<HistogramBin>
histogram(EmpiricalCdf const& cdf, double bin_width_s)
{
    return histogram(cdf.values, bin_width_s);
}

std::vector<double>
sample_latencies(EmpiricalCdf const& cdf, std::size_t n, std::uint64_t seed)
{
    if (n == 0)
    {
        throw DomainError("sample_latencies: n must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        out.push_back(percentile(cdf, unit(rng)));
    }
    return out;
}

void
write_cdf_csv(std::ostream& os, EmpiricalCdf const& cdf)
{
    os << "latency_s,cum_prob\n";
    for (std::size_t i = 0; i < cdf.values.size(); ++i)
    {
        // Only the last point of a run of equal values carries the step height.
        if (i + 1 < cdf.values.size() && cdf.values[i + 1] == cdf.values[i])
        {
            continue;
        }
        os << fmt::format("{:.17g},{:.17g}\n", cdf.values[i], cdf.cum_prob[i]);
    }
}

void
write_histogram_csv(std::ostream& os, std::span<HistogramBin const> bins)
{
    os << "bin_lo_s,bin_hi_s,count\n";
    for (auto const& b : bins)
    {
        os << fmt::format("{:.17g},{:.17g},{}\n", b.lo_s, b.hi_s, b.count);
    }
}

} // namespace ffr::routing
