#pragma once

#include "ffr/dispatch/device.hpp"
#include "ffr/nadir/nadir.hpp"

namespace ffr::dispatch
{

struct NadirBounds
{
    nadir::Bracket bracket;
    /// Nadir of the whole fleet; reserves arriving later only pull it earlier.
    nadir::NadirResult all_devices;
    /// Nadir of the warm-start prefix, or of the whole fleet when it cannot
    /// cover the contingency.
    nadir::NadirResult warm_prefix;
    /// Set when the all-device nadir came later than the prefix nadir and the
    /// ends were exchanged.
    bool swapped = false;
};

NadirBounds nadir_bounds(
    DispatchProblem const& problem,
    SortedSequence const& seq,
    freq::FrequencyModel const& model,
    nadir::NadirOptions const& options = {}
);

} // namespace ffr::dispatch
