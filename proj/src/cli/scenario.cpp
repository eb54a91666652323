#include "ffr/cli/scenario.hpp"

#include "ffr/errors.hpp"
#include "ffr/routing/latency_trace.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace ffr::cli
{

void
Scenario::validate() const
{
    params.validate();
    auto check_range = [](Range r, char const* what) {
        if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi))
        {
            throw DomainError(fmt::format("{} must satisfy 0 < lo <= hi", what));
        }
    };
    check_range(fleet.der_capacity_pu, "fleet.der_capacity_pu");
    check_range(fleet.cl_capacity_pu, "fleet.cl_capacity_pu");
    if (!(fleet.der_time_constant_s >= 0.0) || !std::isfinite(fleet.der_time_constant_s))
    {
        throw DomainError("fleet.der_time_constant_s must be >= 0");
    }
    if (!(fleet.capacity_scale > 0.0) || !std::isfinite(fleet.capacity_scale))
    {
        throw DomainError("fleet.capacity_scale must be > 0");
    }
    if (fleet.paths_per_device == 0)
    {
        throw DomainError("fleet.paths_per_device must be >= 1");
    }
    if (latency.traces.empty())
    {
        routing::LatencyProfile::by_name(latency.profile);
        if (latency.pool_size == 0)
        {
            throw DomainError("latency.pool_size must be >= 1");
        }
    }
    if (latency.max_latency_s && !(*latency.max_latency_s >= 0.0))
    {
        throw DomainError("latency.max_latency_s must be >= 0");
    }
    if (!(dispatch.dP_L_pu > 0.0) || !std::isfinite(dispatch.dP_L_pu))
    {
        throw DomainError("dispatch.dP_L_pu must be > 0");
    }
    if (!(dispatch.nadir_limit_hz < params.f_nom) || !(dispatch.nadir_limit_hz > 0.0))
    {
        throw DomainError("dispatch.nadir_limit_hz must lie strictly between 0 and the nominal frequency");
    }
    if (!(dispatch.c_rr >= 0.0) || !std::isfinite(dispatch.c_rr))
    {
        throw DomainError("dispatch.C_rr must be >= 0");
    }
    if (!(dispatch.horizon_s > 0.0) || !std::isfinite(dispatch.horizon_s))
    {
        throw DomainError("dispatch.horizon_s must be > 0");
    }
}

dispatch::HeuristicOptions
Scenario::heuristic_options() const
{
    dispatch::HeuristicOptions o;
    o.warm_start = dispatch.warm_start;
    o.nadir_bracket = dispatch.nadir_bracket;
    o.post_trim = dispatch.post_trim;
    o.nadir.horizon_s = dispatch.horizon_s;
    return o;
}

namespace
{

void
reject_unknown(YAML::Node const& node, std::string const& section, std::set<std::string> const& allowed)
{
    if (!node.IsMap())
    {
        throw ConfigError(fmt::format("'{}' must be a mapping", section.empty() ? "<root>" : section));
    }
    for (auto const& kv : node)
    {
        auto const key = kv.first.as<std::string>();
        if (!allowed.count(key))
        {
            throw ConfigError(fmt::format("unknown key '{}{}' (line {})", section.empty() ? "" : section + ".", key,
                                          kv.first.Mark().line + 1));
        }
    }
}

template <typename T>
void
read(YAML::Node const& node, char const* key, T& out, std::string const& section)
{
    if (auto const v = node[key])
    {
        try
        {
            out = v.as<T>();
        }
        catch (YAML::Exception const&)
        {
            throw ConfigError(fmt::format("'{}.{}' has an invalid value (line {})", section, key, v.Mark().line + 1));
        }
    }
}

void
read_range(YAML::Node const& node, char const* key, Range& out, std::string const& section)
{
    if (auto const v = node[key])
    {
        std::vector<double> pair;
        read(node, key, pair, section);
        if (pair.size() != 2)
        {
            throw ConfigError(fmt::format("'{}.{}' must be a two-element list [lo, hi]", section, key));
        }
        out = {pair[0], pair[1]};
    }
}

} // namespace

Scenario
parse_scenario(std::string const& text, std::filesystem::path const& base_dir)
{
    YAML::Node root;
    try
    {
        root = YAML::Load(text);
    }
    catch (YAML::Exception const& e)
    {
        throw ConfigError(fmt::format("malformed config: {}", e.what()));
    }
    Scenario sc;
    if (root.IsNull())
    {
        sc.validate();
        return sc;
    }
    reject_unknown(root, "", {"seed", "system", "fleet", "latency", "dispatch"});
    read(root, "seed", sc.seed, "<root>");

    if (auto const n = root["system"])
    {
        reject_unknown(n, "system", {"H", "D", "K", "T_g", "T_c", "T_r", "F_h", "f_nom", "S_base"});
        auto& p = sc.params;
        read(n, "H", p.H, "system");
        read(n, "D", p.D, "system");
        read(n, "K", p.K, "system");
        read(n, "T_g", p.T_g, "system");
        read(n, "T_c", p.T_c, "system");
        read(n, "T_r", p.T_r, "system");
        read(n, "F_h", p.F_h, "system");
        read(n, "f_nom", p.f_nom, "system");
        read(n, "S_base", p.S_base, "system");
    }
    if (auto const n = root["fleet"])
    {
        reject_unknown(n, "fleet",
                       {"ders", "cls", "der_capacity_pu", "cl_capacity_pu", "der_time_constant_s", "capacity_scale",
                        "paths_per_device"});
        auto& f = sc.fleet;
        read(n, "ders", f.ders, "fleet");
        read(n, "cls", f.cls, "fleet");
        read_range(n, "der_capacity_pu", f.der_capacity_pu, "fleet");
        read_range(n, "cl_capacity_pu", f.cl_capacity_pu, "fleet");
        read(n, "der_time_constant_s", f.der_time_constant_s, "fleet");
        read(n, "capacity_scale", f.capacity_scale, "fleet");
        read(n, "paths_per_device", f.paths_per_device, "fleet");
    }
    if (auto const n = root["latency"])
    {
        reject_unknown(n, "latency", {"profile", "traces", "pool_size", "max_latency_s"});
        auto& l = sc.latency;
        read(n, "profile", l.profile, "latency");
        std::vector<std::string> traces;
        read(n, "traces", traces, "latency");
        for (auto const& t : traces)
        {
            std::filesystem::path p(t);
            l.traces.push_back(p.is_relative() && !base_dir.empty() ? base_dir / p : p);
        }
        read(n, "pool_size", l.pool_size, "latency");
        if (n["max_latency_s"])
        {
            double cap = 0.0;
            read(n, "max_latency_s", cap, "latency");
            l.max_latency_s = cap;
        }
    }
    if (auto const n = root["dispatch"])
    {
        reject_unknown(n, "dispatch",
                       {"dP_L_pu", "nadir_limit_hz", "C_rr", "warm_start", "nadir_bracket", "post_trim", "horizon_s"});
        auto& d = sc.dispatch;
        read(n, "dP_L_pu", d.dP_L_pu, "dispatch");
        read(n, "nadir_limit_hz", d.nadir_limit_hz, "dispatch");
        read(n, "C_rr", d.c_rr, "dispatch");
        read(n, "warm_start", d.warm_start, "dispatch");
        read(n, "nadir_bracket", d.nadir_bracket, "dispatch");
        read(n, "post_trim", d.post_trim, "dispatch");
        read(n, "horizon_s", d.horizon_s, "dispatch");
    }
    try
    {
        sc.validate();
    }
    catch (DomainError const& e)
    {
        throw ConfigError(e.what());
    }
    return sc;
}

Scenario
load_scenario(std::filesystem::path const& file)
{
    std::ifstream in(file);
    if (!in)
    {
        throw ConfigError(fmt::format("cannot open config file {}", file.string()));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), file.parent_path());
}

routing::EmpiricalCdf
latency_distribution(Scenario const& sc)
{
    std::vector<double> pool;
    if (sc.latency.traces.empty())
    {
        pool = routing::synth_latencies(routing::LatencyProfile::by_name(sc.latency.profile), sc.latency.pool_size,
                                        sc.seed);
    }
    else
    {
        for (auto const& path : sc.latency.traces)
        {
            auto const lat = routing::ingest_trace(path).latencies();
            pool.insert(pool.end(), lat.begin(), lat.end());
        }
    }
    if (sc.latency.max_latency_s)
    {
        std::erase_if(pool, [cap = *sc.latency.max_latency_s](double v) { return v > cap; });
        if (pool.empty())
        {
            throw DomainError("latency.max_latency_s discards every pooled latency");
        }
    }
    return routing::empirical_cdf(pool);
}

dispatch::DispatchProblem
generate_problem(Scenario const& sc)
{
    sc.validate();
    dispatch::DispatchProblem pb;
    pb.params = sc.params;
    pb.dP_L_pu = sc.dispatch.dP_L_pu;
    pb.dw_max_pu = sc.params.limit_from_hz(sc.dispatch.nadir_limit_hz);
    pb.c_rr = sc.dispatch.c_rr;

    std::size_t const n = sc.fleet.ders + sc.fleet.cls;
    if (n == 0)
    {
        return pb;
    }
    auto const cdf = latency_distribution(sc);
    auto const latencies = routing::sample_latencies(cdf, n * sc.fleet.paths_per_device, sc.seed + 1);

    std::mt19937_64 rng(sc.seed + 2);
    pb.devices.reserve(n);
    std::size_t next_latency = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        bool const der = i < sc.fleet.ders;
        Range const r = der ? sc.fleet.der_capacity_pu : sc.fleet.cl_capacity_pu;
        std::uniform_real_distribution<double> cap(r.lo, r.hi);
        dispatch::Device d;
        d.kind = der ? dispatch::DeviceKind::Der : dispatch::DeviceKind::Cl;
        d.id = der ? fmt::format("der{}", i) : fmt::format("cl{}", i - sc.fleet.ders);
        d.r_max_pu = cap(rng) * sc.fleet.capacity_scale;
        d.t_d_s = der ? sc.fleet.der_time_constant_s : 0.0;
        d.paths.device_id = d.id;
        for (std::size_t p = 0; p < sc.fleet.paths_per_device; ++p)
        {
            d.paths.paths.push_back(
                {fmt::format("p{}", p), routing::LatencyTrace::constant(latencies[next_latency++], 0.0)});
        }
        pb.devices.push_back(std::move(d));
    }
    dispatch::route_devices(pb.devices, 0.0);
    return pb;
}

} // namespace ffr::cli
