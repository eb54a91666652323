#pragma once

#include "ffr/freq/evaluator.hpp"

#include <optional>

namespace ffr::nadir
{

struct Bracket
{
    double t_min;
    double t_max;
};

enum class NadirKind
{
    /// Interior root of the deviation rate.
    Stationary,
    /// Sign change of the rate at an activation instant.
    Kink,
    /// End of the search range; no interior minimum is lower.
    Boundary,
};

char const* to_string(NadirKind kind);

struct NadirOptions
{
    double horizon_s = 60.0;
    /// Upper bound on coarse-grid intervals per segment.
    int points_per_segment = 200;
    /// Coarse-grid spacing is never refined below this; short segments get
    /// proportionally fewer points (at least four).
    double min_grid_spacing_s = 1e-3;
    /// Activation instants used as explicit segment boundaries. Beyond this
    /// count an index-uniform subset is used; the remaining jumps are found
    /// by the sign-change bisection.
    std::size_t max_segments = 64;
    double time_tol_s = 1e-9;
    int max_bisection_iters = 60;
};

struct NadirResult
{
    double t_nad = 0.0;
    double w_nad = 0.0;
    std::optional<Bracket> bracket_used;
    NadirKind kind = NadirKind::Boundary;
    /// Largest number of bisection steps spent on one sign change.
    int bisection_iters = 0;

    bool stationary() const { return kind == NadirKind::Stationary; }
};

/// Global minimum of the deviation on [0, horizon], or on the bracket when
/// given. The range is split at activation instants, each segment is scanned
/// for negative-to-positive sign changes of the rate, each change is refined by
/// bisection and the lowest of all refined points and segment ends is returned.
NadirResult find_nadir(
    freq::ResponseEvaluator const& response,
    NadirOptions const& options = {},
    std::optional<Bracket> bracket = std::nullopt
);

NadirResult find_nadir(
    freq::Portfolio const& pf,
    freq::FrequencyModel const& model,
    NadirOptions const& options = {},
    std::optional<Bracket> bracket = std::nullopt
);

} // namespace ffr::nadir
