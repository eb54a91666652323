#pragma once

#include "ffr/dispatch/solution.hpp"

namespace ffr::dispatch
{

struct HeuristicOptions
{
    /// Start from the shortest latency-ordered prefix covering the contingency.
    bool warm_start = true;
    /// Confine nadir searches to the precomputed bracket once the active
    /// reserves cover the contingency.
    bool nadir_bracket = true;
    /// Shrink the last activated device to the smallest reserve that still
    /// passes both checks.
    bool post_trim = false;
    /// Widening applied to both ends of the bracket.
    double bracket_pad_s = 1e-3;
    bool record_trace = true;
    nadir::NadirOptions nadir;
};

/// Activates devices at full capacity in ascending effective latency until
/// the active reserves cover the contingency and the nadir stays within the
/// limit. Never throws for infeasibility; the status says so instead.
DispatchSolution heuristic_allocate(
    DispatchProblem const& problem,
    freq::FrequencyModel const& model,
    HeuristicOptions const& options = {}
);

DispatchSolution heuristic_allocate(DispatchProblem const& problem, HeuristicOptions const& options = {});

} // namespace ffr::dispatch
