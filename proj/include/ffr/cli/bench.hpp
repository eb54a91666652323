#pragma once

#include "ffr/cli/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ffr::cli
{

struct BenchConfig
{
    std::vector<std::size_t> sizes{1000, 10000, 100000};
    std::size_t repeats = 3;
    std::uint64_t seed = 1;
    std::vector<std::size_t> baseline_sizes{8, 9, 10, 11, 12};
    bool baseline_prune = false;
    std::size_t max_plain_size = 10000;
    /// Contingency as a fraction of the fleet capacity.
    double contingency_fraction = 0.3;
};

struct BenchRow
{
    std::string solver;
    std::string option_set;
    std::size_t size;
    std::size_t repeat;
    double seconds;
    std::size_t iterations;
    std::size_t activated;
};

struct BenchResult
{
    std::vector<BenchRow> rows;
    /// Log-log slope of the median accelerated heuristic runtime over size.
    double heuristic_slope = 0.0;
};

/// Default-capacity fleet of `size` devices (80 % DER) with SCION latencies
/// and a contingency equal to `fraction` of its capacity.
Scenario bench_scenario(std::size_t size, std::uint64_t seed, double fraction = 0.3);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::vector<double> const& x, std::vector<double> const& y);

/// Throws ConfigError for a baseline size above the enumeration limit.
BenchResult run_bench(BenchConfig const& cfg);

void write_bench_table(std::ostream& os, BenchResult const& result);
void write_bench_csv(std::ostream& os, BenchResult const& result);

} // namespace ffr::cli
