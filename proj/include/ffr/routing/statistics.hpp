#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace ffr::routing
{

/// Right-continuous step CDF over the observed latencies.
struct EmpiricalCdf
{
    std::vector<double> values;      ///< sorted ascending, s
    std::vector<double> cum_prob;    ///< (i + 1) / n

    double tau_max() const { return values.back(); }
    std::size_t size() const { return values.size(); }
};

EmpiricalCdf empirical_cdf(std::span<double const> values);

/// Smallest value whose cumulative probability is >= q.
double percentile(EmpiricalCdf const& cdf, double q);

struct HistogramBin
{
    double lo_s;
    double hi_s;
    std::size_t count;
};

/// Contiguous bins [k w, (k + 1) w) from the bin holding the minimum to the one
/// holding the maximum.
std::vector<HistogramBin> histogram(std::span<double const> values, double bin_width_s);
std::vector<HistogramBin> histogram(EmpiricalCdf const& cdf, double bin_width_s);

/// Inverse-CDF sampling with a seeded generator; every sample is an observed
/// value, so samples lie in [min, tau_max].
std::vector<double> sample_latencies(EmpiricalCdf const& cdf, std::size_t n, std::uint64_t seed);

void write_cdf_csv(std::ostream& os, EmpiricalCdf const& cdf);
void write_histogram_csv(std::ostream& os, std::span<HistogramBin const> bins);

} // namespace ffr::routing
