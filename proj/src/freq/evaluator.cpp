#include "ffr/freq/evaluator.hpp"

#include "ffr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ffr::freq
{

ResponseEvaluator::ResponseEvaluator(FrequencyModel const& model, double loss_pu)
    : model_(model)
    , loss_pu_(loss_pu)
{
    if (!std::isfinite(loss_pu) || loss_pu < 0.0)
    {
        throw DomainError("ResponseEvaluator: loss must be finite and >= 0");
    }
}

ResponseEvaluator::ResponseEvaluator(FrequencyModel const& model, Portfolio const& pf)
    : ResponseEvaluator(model, pf.loss.magnitude_pu)
{
    pf.validate();
    if (!(pf.params == model.params()))
    {
        throw DomainError("ResponseEvaluator: portfolio parameters differ from the model");
    }
    std::vector<DelayedStepSource const*> order;
    order.reserve(pf.sources.size());
    for (auto const& s : pf.sources)
    {
        order.push_back(&s);
    }
    std::stable_sort(order.begin(), order.end(), [](auto const* a, auto const* b) {
        return a->delay_s < b->delay_s;
    });
    for (auto const* s : order)
    {
        add(*s);
    }
}

ResponseEvaluator::Group&
ResponseEvaluator::group_for(PoleResidueSet const* set)
{
    for (auto& g : groups_)
    {
        if (g.set == set)
        {
            return g;
        }
    }
    Group g;
    g.set = set;
    for (auto const& r : set->real_terms)
    {
        g.real_step_coef.push_back(r.alpha / r.pole);
    }
    for (auto const& u : set->complex_terms)
    {
        g.complex_step_coef.push_back(u.alpha() / u.pole());
    }
    groups_.push_back(std::move(g));
    return groups_.back();
}

void
ResponseEvaluator::fill_row(Group& g, std::size_t k)
{
    auto const& set = *g.set;
    std::size_t const nr = set.real_terms.size();
    std::size_t const nc = set.complex_terms.size();
    double const mag = g.magnitudes[k];
    if (k == 0)
    {
        g.cum_magnitude[0] = mag;
        for (std::size_t j = 0; j < nr; ++j)
        {
            g.real_acc[j] = mag;
        }
        for (std::size_t j = 0; j < nc; ++j)
        {
            g.complex_acc[j] = mag;
        }
        return;
    }
    double const gap = g.delays[k] - g.delays[k - 1];
    g.cum_magnitude[k] = g.cum_magnitude[k - 1] + mag;
    for (std::size_t j = 0; j < nr; ++j)
    {
        g.real_acc[k * nr + j] =
            g.real_acc[(k - 1) * nr + j] * std::exp(-set.real_terms[j].pole * gap) + mag;
    }
    for (std::size_t j = 0; j < nc; ++j)
    {
        g.complex_acc[k * nc + j] =
            g.complex_acc[(k - 1) * nc + j] * std::exp(-set.complex_terms[j].pole() * gap) + mag;
    }
}

void
ResponseEvaluator::rebuild_from(Group& g, std::size_t first)
{
    std::size_t const n = g.delays.size();
    g.cum_magnitude.resize(n);
    g.real_acc.resize(n * g.set->real_terms.size());
    g.complex_acc.resize(n * g.set->complex_terms.size());
    for (std::size_t k = first; k < n; ++k)
    {
        fill_row(g, k);
    }
}

void
ResponseEvaluator::add(DelayedStepSource const& src)
{
    src.validate();
    if (src.kind == SourceKind::Loss)
    {
        throw DomainError("ResponseEvaluator::add: the contingency is fixed at construction");
    }
    Group& g = group_for(&model_.pole_set_for(src));
    std::size_t pos = g.delays.size();
    if (!g.delays.empty() && src.delay_s < g.delays.back())
    {
        pos = static_cast<std::size_t>(
            std::upper_bound(g.delays.begin(), g.delays.end(), src.delay_s) - g.delays.begin()
        );
    }
    g.delays.insert(g.delays.begin() + static_cast<std::ptrdiff_t>(pos), src.delay_s);
    g.magnitudes.insert(g.magnitudes.begin() + static_cast<std::ptrdiff_t>(pos), src.magnitude_pu);
    rebuild_from(g, pos);
    reserve_total_ += src.magnitude_pu;
    ++count_;
}

double
ResponseEvaluator::group_deviation(Group const& g, double t) const
{
    auto const active = static_cast<std::size_t>(
        std::lower_bound(g.delays.begin(), g.delays.end(), t) - g.delays.begin()
    );
    if (active == 0)
    {
        return 0.0;
    }
    std::size_t const k = active - 1;
    double const dt = t - g.delays[k];
    double const cum = g.cum_magnitude[k];
    auto const& set = *g.set;
    std::size_t const nr = set.real_terms.size();
    std::size_t const nc = set.complex_terms.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < nr; ++j)
    {
        double const decayed = g.real_acc[k * nr + j] * std::exp(-set.real_terms[j].pole * dt);
        acc += g.real_step_coef[j] * (cum - decayed);
    }
    for (std::size_t j = 0; j < nc; ++j)
    {
        std::complex<double> const decayed =
            g.complex_acc[k * nc + j] * std::exp(-set.complex_terms[j].pole() * dt);
        acc += 2.0 * (g.complex_step_coef[j] * (cum - decayed)).real();
    }
    return acc;
}

double
ResponseEvaluator::group_rate(Group const& g, double t, bool inclusive) const
{
    auto const it = inclusive ? std::upper_bound(g.delays.begin(), g.delays.end(), t)
                              : std::lower_bound(g.delays.begin(), g.delays.end(), t);
    auto const active = static_cast<std::size_t>(it - g.delays.begin());
    if (active == 0)
    {
        return 0.0;
    }
    std::size_t const k = active - 1;
    double const dt = t - g.delays[k];
    auto const& set = *g.set;
    std::size_t const nr = set.real_terms.size();
    std::size_t const nc = set.complex_terms.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < nr; ++j)
    {
        acc += set.real_terms[j].alpha * g.real_acc[k * nr + j]
            * std::exp(-set.real_terms[j].pole * dt);
    }
    for (std::size_t j = 0; j < nc; ++j)
    {
        acc += 2.0
            * (set.complex_terms[j].alpha() * g.complex_acc[k * nc + j]
               * std::exp(-set.complex_terms[j].pole() * dt))
                  .real();
    }
    return acc;
}

double
ResponseEvaluator::deviation(double t) const
{
    if (!(t >= 0.0) || !std::isfinite(t))
    {
        throw DomainError("ResponseEvaluator: t must be finite and >= 0");
    }
    double acc = 0.0;
    for (auto const& g : groups_)
    {
        acc += group_deviation(g, t);
    }
    if (t > 0.0 && loss_pu_ != 0.0)
    {
        acc -= loss_pu_ * step_response(t, model_.pole_set());
    }
    return acc;
}

double
ResponseEvaluator::evaluate_rate(double t, bool inclusive) const
{
    if (!(t >= 0.0) || !std::isfinite(t))
    {
        throw DomainError("ResponseEvaluator: t must be finite and >= 0");
    }
    double acc = 0.0;
    for (auto const& g : groups_)
    {
        acc += group_rate(g, t, inclusive);
    }
    if ((t > 0.0 || inclusive) && loss_pu_ != 0.0)
    {
        acc -= loss_pu_ * step_response_rate(t, model_.pole_set());
    }
    return acc;
}

double
ResponseEvaluator::rate(double t) const
{
    return evaluate_rate(t, false);
}

double
ResponseEvaluator::rate_after(double t) const
{
    return evaluate_rate(t, true);
}

std::vector<double>
ResponseEvaluator::breakpoints(double lo, double hi, std::size_t max_count) const
{
    std::vector<double> out;
    if (max_count == 0)
    {
        return out;
    }
    for (auto const& g : groups_)
    {
        auto const first = std::upper_bound(g.delays.begin(), g.delays.end(), lo);
        auto const last = std::lower_bound(first, g.delays.end(), hi);
        auto const n = static_cast<std::size_t>(last - first);
        if (n <= max_count)
        {
            out.insert(out.end(), first, last);
        }
        else
        {
            for (std::size_t i = 0; i < max_count; ++i)
            {
                std::size_t const idx = (i * (n - 1)) / (max_count - 1 == 0 ? 1 : max_count - 1);
                out.push_back(*(first + static_cast<std::ptrdiff_t>(idx)));
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.size() > max_count)
    {
        std::vector<double> thinned;
        thinned.reserve(max_count);
        std::size_t const n = out.size();
        for (std::size_t i = 0; i < max_count; ++i)
        {
            std::size_t const idx = max_count == 1 ? n / 2 : (i * (n - 1)) / (max_count - 1);
            if (thinned.empty() || thinned.back() != out[idx])
            {
                thinned.push_back(out[idx]);
            }
        }
        out = std::move(thinned);
    }
    return out;
}

bool
ResponseEvaluator::near_activation(double t, double tol) const
{
    for (auto const& g : groups_)
    {
        auto const it = std::lower_bound(g.delays.begin(), g.delays.end(), t - tol);
        if (it != g.delays.end() && *it <= t + tol)
        {
            return true;
        }
    }
    return false;
}

} // namespace ffr::freq
