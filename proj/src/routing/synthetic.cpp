#include "ffr/routing/synthetic.hpp"

#include "ffr/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace ffr::routing
{

void
LatencyProfile::validate() const
{
    if (components.empty())
    {
        throw DomainError(fmt::format("latency profile '{}' has no components", name));
    }
    for (auto const& c : components)
    {
        if (!(c.weight > 0.0) || !std::isfinite(c.weight) || !std::isfinite(c.mean_s) || !(c.stddev_s >= 0.0)
            || !std::isfinite(c.stddev_s))
        {
            throw DomainError(fmt::format("latency profile '{}' has an invalid component", name));
        }
        if (c.mean_s < 0.0 && c.stddev_s == 0.0)
        {
            throw DomainError(fmt::format("latency profile '{}' has a component with no mass above zero", name));
        }
    }
}

LatencyProfile
LatencyProfile::scion()
{
    return {"scion", {{0.75, 0.150, 0.035}, {0.25, 0.250, 0.0914}}};
}

LatencyProfile
LatencyProfile::bgp()
{
    return {"bgp", {{0.45, 0.200, 0.060}, {0.55, 0.350, 0.0621}}};
}

LatencyProfile
LatencyProfile::by_name(std::string const& name)
{
    if (name == "scion")
    {
        return scion();
    }
    if (name == "bgp")
    {
        return bgp();
    }
    throw DomainError(fmt::format("unknown latency profile '{}' (expected scion or bgp)", name));
}

namespace
{

class MixtureSampler
{
public:
    MixtureSampler(LatencyProfile const& profile, std::uint64_t seed)
        : rng_(seed)
    {
        profile.validate();
        std::vector<double> weights;
        for (auto const& c : profile.components)
        {
            weights.push_back(c.weight);
            normals_.emplace_back(c.mean_s, c.stddev_s);
        }
        pick_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
    }

    double operator()()
    {
        for (;;)
        {
            double const v = normals_[pick_(rng_)](rng_);
            if (v >= 0.0)
            {
                return v;
            }
        }
    }

private:
    std::mt19937_64 rng_;
    std::discrete_distribution<std::size_t> pick_;
    std::vector<std::normal_distribution<double>> normals_;
};

} // namespace

std::vector<double>
synth_latencies(LatencyProfile const& profile, std::size_t n, std::uint64_t seed)
{
    MixtureSampler draw(profile, seed);
    std::vector<double> out(n);
    for (auto& v : out)
    {
        v = draw();
    }
    return out;
}

LatencyTrace
synth_trace(LatencyProfile const& profile, double duration_s, double granularity_s, std::uint64_t seed)
{
    if (!(granularity_s > 0.0) || !std::isfinite(granularity_s) || !std::isfinite(duration_s))
    {
        throw DomainError("synth_trace: granularity must be > 0 and duration finite");
    }
    if (!(duration_s > granularity_s))
    {
        throw DomainError("synth_trace: duration must exceed granularity");
    }
    MixtureSampler draw(profile, seed);
    auto const n = static_cast<std::size_t>(std::ceil(duration_s / granularity_s - 1e-9));
    std::vector<LatencySample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        samples.push_back({static_cast<double>(i) * granularity_s, draw()});
    }
    return LatencyTrace(std::move(samples), granularity_s);
}

} // namespace ffr::routing
