#include "ffr/dispatch/bounds.hpp"

#include "ffr/errors.hpp"

#include <utility>

namespace ffr::dispatch
{

NadirBounds
nadir_bounds(
    DispatchProblem const& problem,
    SortedSequence const& seq,
    freq::FrequencyModel const& model,
    nadir::NadirOptions const& options
)
{
    std::size_t prefix = seq.size();
    try
    {
        prefix = warm_start(seq, problem.devices, problem.dP_L_pu);
    }
    catch (InfeasibleError const&)
    {
    }

    freq::ResponseEvaluator ev(model, problem.dP_L_pu);
    NadirBounds out;
    for (std::size_t k = 0; k < prefix; ++k)
    {
        auto const& d = problem.devices[seq[k].device_index];
        ev.add(d.as_source(d.r_max_pu));
    }
    out.warm_prefix = nadir::find_nadir(ev, options);
    for (std::size_t k = prefix; k < seq.size(); ++k)
    {
        auto const& d = problem.devices[seq[k].device_index];
        ev.add(d.as_source(d.r_max_pu));
    }
    out.all_devices = prefix == seq.size() ? out.warm_prefix : nadir::find_nadir(ev, options);

    out.bracket = {out.all_devices.t_nad, out.warm_prefix.t_nad};
    if (out.bracket.t_min > out.bracket.t_max)
    {
        std::swap(out.bracket.t_min, out.bracket.t_max);
        out.swapped = true;
    }
    return out;
}

} // namespace ffr::dispatch
