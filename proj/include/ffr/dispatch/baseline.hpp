#pragma once

#include "ffr/dispatch/solution.hpp"

#include <vector>

namespace ffr::dispatch
{

inline constexpr std::size_t kBaselineDeviceLimit = 12;

struct BaselineOptions
{
    std::size_t max_devices = kBaselineDeviceLimit;
    /// Visit subsets by increasing cost lower bound and stop once the bound
    /// reaches the incumbent. Off visits every subset.
    bool prune = true;
    int bisection_iters = 64;
    nadir::NadirOptions nadir;
};

/// Enumerates activation subsets that can cover the contingency. Inside a
/// subset every device runs at full capacity except the one with the highest
/// effective latency, whose reserve is bisected down to the smallest value
/// passing the nadir and balance checks. Returns the cheapest subset.
/// Throws DomainError above max_devices (or above the hard limit of 12).
DispatchSolution exact_baseline(
    DispatchProblem const& problem,
    freq::FrequencyModel const& model,
    BaselineOptions const& options = {}
);

struct GridResult
{
    bool feasible = false;
    std::vector<double> reserves_pu;
    double cost_usd = 0.0;
    /// Largest grid step over the devices.
    double max_step_pu = 0.0;
    std::size_t evaluations = 0;
};

/// Cheapest point of the grid r_i = j R_max,i / steps for up to three devices.
GridResult grid_search(
    DispatchProblem const& problem,
    freq::FrequencyModel const& model,
    int steps = 100,
    nadir::NadirOptions const& options = {}
);

} // namespace ffr::dispatch
