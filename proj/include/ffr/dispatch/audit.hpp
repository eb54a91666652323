#pragma once

#include "ffr/dispatch/solution.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ffr::dispatch
{

enum class Constraint
{
    Nadir,
    SteadyState,
    Capacity,
    SinglePath,
    Binary,
};

char const* to_string(Constraint c);

struct AuditItem
{
    Constraint constraint;
    /// Device id for per-device checks, empty otherwise.
    std::string subject;
    bool pass;
    /// Signed slack; negative values are the size of the violation.
    double margin;
    std::string detail;
};

struct AuditReport
{
    std::vector<AuditItem> items;
    /// Nadir recomputed from the activations with a full search.
    double w_nad_pu = 0.0;
    double t_nad_s = 0.0;

    bool passed() const;
    std::vector<AuditItem> violations() const;
};

/// Checks a solution against the nadir limit, the steady-state balance, the
/// device capacities, single path selection and activation consistency.
/// Problems are reported, never thrown.
AuditReport audit(
    DispatchProblem const& problem,
    DispatchSolution const& solution,
    freq::FrequencyModel const& model,
    nadir::NadirOptions const& options = {}
);

AuditReport audit(DispatchProblem const& problem, DispatchSolution const& solution);

void write_audit(std::ostream& os, AuditReport const& report);

} // namespace ffr::dispatch
