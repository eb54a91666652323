#pragma once

#include "ffr/freq/response.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ffr::simkit
{

/// Uniformly sampled simulation output.
struct SimTrace
{
    double dt = 0.0;
    std::vector<double> t;
    std::vector<double> dw;
    /// Optional per-source injected power, one column per source.
    std::vector<std::string> source_ids;
    std::vector<std::vector<double>> source_power;

    std::size_t size() const { return t.size(); }
};

struct SimOptions
{
    bool record_sources = false;
    /// Divergence guard on |dw|, pu.
    double divergence_limit_pu = 10.0;
};

/// Fixed-step RK4 integration of the swing equation with the droop/governor
/// path in controllable canonical form, first-order DER lags, stepped loads and
/// the loss at t = 0. Steps are split at activation instants so inputs are
/// constant within every RK4 stage. Requires dt <= min(T_g, T_c, nonzero
/// T_d) / 10.
SimTrace simulate(freq::Portfolio const& pf, double t_end, double dt, SimOptions const& options = {});

/// State-space realization x' = A x + B u, y = C x of a strictly proper
/// rational function in controllable canonical form.
struct StateSpace
{
    std::vector<std::vector<double>> A;
    std::vector<double> B;
    std::vector<double> C;

    std::size_t order() const { return B.size(); }
};

StateSpace controllable_canonical(freq::RationalTF const& tf);

struct Series
{
    std::vector<double> t;
    std::vector<double> v;
};

Series dw_series(SimTrace const& trace);
Series sample(std::function<double(double)> const& f, std::vector<double> const& t);

struct Comparison
{
    double max_abs = 0.0;
    double rmse = 0.0;
    double argmax_t = 0.0;
};

/// Error metrics of b against a on the coarser of the two grids, restricted
/// to the overlap; the finer series is linearly interpolated. Throws
/// DomainError when the time ranges do not overlap.
Comparison compare(Series const& a, Series const& b);
Comparison compare(SimTrace const& a, SimTrace const& b);

/// t_s,dw_pu[,src_<id>_pu...]
void write_trace_csv(std::ostream& os, SimTrace const& trace);

} // namespace ffr::simkit
