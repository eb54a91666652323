#include "ffr/nadir/nadir.hpp"

#include "ffr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ffr::nadir
{

char const*
to_string(NadirKind kind)
{
    switch (kind)
    {
        case NadirKind::Stationary:
            return "stationary";
        case NadirKind::Kink:
            return "kink";
        case NadirKind::Boundary:
            return "boundary";
    }
    return "?";
}

namespace
{

struct Candidate
{
    double t;
    double w;
    NadirKind kind;
};

} // namespace

NadirResult
find_nadir(
    freq::ResponseEvaluator const& response,
    NadirOptions const& options,
    std::optional<Bracket> bracket
)
{
    if (!(options.horizon_s > 0.0) || options.points_per_segment < 1
        || !(options.time_tol_s > 0.0) || options.max_bisection_iters < 1)
    {
        throw DomainError("find_nadir: invalid options");
    }
    double lo = 0.0;
    double hi = options.horizon_s;
    if (bracket)
    {
        if (!std::isfinite(bracket->t_min) || !std::isfinite(bracket->t_max)
            || bracket->t_min < 0.0 || bracket->t_min > bracket->t_max)
        {
            throw DomainError("find_nadir: bracket must satisfy 0 <= t_min <= t_max");
        }
        lo = bracket->t_min;
        hi = bracket->t_max;
    }

    NadirResult result;
    result.bracket_used = bracket;
    double const kink_tol = 2.0 * options.time_tol_s;

    std::vector<Candidate> candidates;
    auto edge_kind = [&](double t) {
        if (t == lo || t == hi)
        {
            return NadirKind::Boundary;
        }
        return NadirKind::Kink;
    };

    std::vector<double> edges;
    edges.push_back(lo);
    if (hi > lo)
    {
        std::size_t const inner = options.max_segments > 1 ? options.max_segments - 1 : 0;
        auto const bps = response.breakpoints(lo, hi, inner);
        edges.insert(edges.end(), bps.begin(), bps.end());
        edges.push_back(hi);
    }
    for (double e : edges)
    {
        candidates.push_back({e, response.deviation(e), edge_kind(e)});
    }

    auto bisect = [&](double a, double b) {
        int iters = 0;
        while (b - a > options.time_tol_s && iters < options.max_bisection_iters)
        {
            double const m = 0.5 * (a + b);
            if (response.rate(m) < 0.0)
            {
                a = m;
            }
            else
            {
                b = m;
            }
            ++iters;
        }
        result.bisection_iters = std::max(result.bisection_iters, iters);
        return 0.5 * (a + b);
    };

    for (std::size_t s = 0; s + 1 < edges.size(); ++s)
    {
        double const a = edges[s];
        double const b = edges[s + 1];
        double const span = b - a;
        int const wanted = static_cast<int>(std::ceil(span / options.min_grid_spacing_s));
        int const n = std::clamp(wanted, std::min(4, options.points_per_segment), options.points_per_segment);

        double prev_t = a;
        double prev_r = response.rate_after(a);
        for (int i = 1; i <= n; ++i)
        {
            double const t = i == n ? b : a + span * static_cast<double>(i) / static_cast<double>(n);
            double const r = response.rate(t);
            if (prev_r < 0.0 && r >= 0.0)
            {
                double const root = bisect(prev_t, t);
                NadirKind const kind = response.near_activation(root, kink_tol)
                    ? NadirKind::Kink
                    : NadirKind::Stationary;
                candidates.push_back({root, response.deviation(root), kind});
            }
            prev_t = t;
            prev_r = r;
        }
    }

    auto const best = std::min_element(candidates.begin(), candidates.end(), [](auto const& x, auto const& y) {
        return x.w < y.w || (x.w == y.w && x.t < y.t);
    });
    result.t_nad = best->t;
    result.w_nad = best->w;
    result.kind = best->kind;
    return result;
}

NadirResult
find_nadir(
    freq::Portfolio const& pf,
    freq::FrequencyModel const& model,
    NadirOptions const& options,
    std::optional<Bracket> bracket
)
{
    freq::ResponseEvaluator const response(model, pf);
    return find_nadir(response, options, bracket);
}

} // namespace ffr::nadir
