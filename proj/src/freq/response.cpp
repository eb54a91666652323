#include "ffr/freq/response.hpp"

#include "ffr/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>

namespace ffr::freq
{

char const*
to_string(SourceKind kind)
{
    switch (kind)
    {
        case SourceKind::Der:
            return "DER";
        case SourceKind::Cl:
            return "CL";
        case SourceKind::Loss:
            return "LOSS";
    }
    return "?";
}

void
DelayedStepSource::validate() const
{
    if (!std::isfinite(magnitude_pu) || magnitude_pu < 0.0)
    {
        throw DomainError("DelayedStepSource: magnitude must be finite and >= 0");
    }
    if (!std::isfinite(delay_s) || delay_s < 0.0)
    {
        throw DomainError("DelayedStepSource: delay must be finite and >= 0");
    }
    if (!std::isfinite(time_constant_s) || time_constant_s < 0.0)
    {
        throw DomainError("DelayedStepSource: time constant must be finite and >= 0");
    }
    if (kind != SourceKind::Der && time_constant_s != 0.0)
    {
        throw DomainError("DelayedStepSource: only DERs carry a time constant");
    }
    if (kind == SourceKind::Loss && delay_s != 0.0)
    {
        throw DomainError("DelayedStepSource: the contingency acts at t = 0");
    }
}

DelayedStepSource
DelayedStepSource::der(double magnitude_pu, double delay_s, double time_constant_s, std::string id)
{
    return {SourceKind::Der, magnitude_pu, delay_s, time_constant_s, std::move(id)};
}

DelayedStepSource
DelayedStepSource::cl(double magnitude_pu, double delay_s, std::string id)
{
    return {SourceKind::Cl, magnitude_pu, delay_s, 0.0, std::move(id)};
}

DelayedStepSource
DelayedStepSource::loss(double magnitude_pu)
{
    return {SourceKind::Loss, magnitude_pu, 0.0, 0.0, "loss"};
}

void
Portfolio::validate() const
{
    params.validate();
    if (loss.kind != SourceKind::Loss)
    {
        throw DomainError("Portfolio: contingency entry must be of kind LOSS");
    }
    loss.validate();
    for (auto const& s : sources)
    {
        if (s.kind == SourceKind::Loss)
        {
            throw DomainError("Portfolio: exactly one LOSS entry is allowed");
        }
        s.validate();
    }
}

double
Portfolio::reserve_total() const
{
    double acc = 0.0;
    for (auto const& s : sources)
    {
        acc += s.magnitude_pu;
    }
    return acc;
}

struct FrequencyModel::Cache
{
    mutable std::mutex mutex;
    std::map<std::uint64_t, std::unique_ptr<PoleResidueSet const>> der_sets;
};

FrequencyModel::FrequencyModel(SystemParams params, DecompositionOptions options)
    : params_(params)
    , options_(options)
    , tf_(build_closed_loop(params))
    , base_(std::make_shared<PoleResidueSet const>(partial_fractions(tf_, options)))
    , cache_(std::make_shared<Cache>())
{
}

PoleResidueSet const&
FrequencyModel::der_pole_set(double T_d) const
{
    if (T_d == 0.0)
    {
        return *base_;
    }
    auto const key = std::bit_cast<std::uint64_t>(T_d);
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->der_sets.find(key);
    if (it == cache_->der_sets.end())
    {
        auto set = std::make_unique<PoleResidueSet const>(augment_der_poles(tf_, T_d, options_));
        it = cache_->der_sets.emplace(key, std::move(set)).first;
    }
    return *it->second;
}

PoleResidueSet const&
FrequencyModel::pole_set_for(DelayedStepSource const& src) const
{
    if (src.kind == SourceKind::Der)
    {
        return der_pole_set(src.time_constant_s);
    }
    return *base_;
}

double
FrequencyModel::dc_gain() const
{
    return 1.0 / (params_.D + 1.0 / params_.K);
}

std::size_t
FrequencyModel::cached_der_sets() const
{
    std::lock_guard lock(cache_->mutex);
    return cache_->der_sets.size();
}

namespace
{

void
require_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t))
    {
        throw DomainError("response evaluation requires finite t >= 0");
    }
}

double
pair_modulus_sq(ComplexTerm const& term)
{
    double const m = term.c * term.c + term.d * term.d;
    if (m == 0.0)
    {
        throw DomainError("complex pole at the origin is not supported");
    }
    return m;
}

} // namespace

double
eval_f1(double t, PoleResidueSet const& set)
{
    require_time(t);
    double acc = 0.0;
    for (auto const& u : set.complex_terms)
    {
        double const m = pair_modulus_sq(u);
        double const decay = std::exp(-u.c * t);
        acc += 2.0 * u.a / m
            * (-decay * u.c * std::cos(u.d * t) + u.c + decay * u.d * std::sin(u.d * t));
    }
    return acc;
}

double
eval_f2(double t, PoleResidueSet const& set)
{
    require_time(t);
    double acc = 0.0;
    for (auto const& u : set.complex_terms)
    {
        double const m = pair_modulus_sq(u);
        double const decay = std::exp(-u.c * t);
        acc += 2.0 * u.b / m
            * (-decay * u.c * std::sin(u.d * t) + u.d - decay * u.d * std::cos(u.d * t));
    }
    return acc;
}

double
eval_fdot(double t, PoleResidueSet const& set)
{
    require_time(t);
    double acc = 0.0;
    for (auto const& u : set.complex_terms)
    {
        acc += 2.0 * std::exp(-u.c * t) * (u.b * std::sin(u.d * t) + u.a * std::cos(u.d * t));
    }
    return acc;
}

double
step_response(double t, PoleResidueSet const& set)
{
    require_time(t);
    double acc = 0.0;
    for (auto const& r : set.real_terms)
    {
        if (r.pole == 0.0)
        {
            throw DomainError("real pole at the origin is not supported");
        }
        acc += r.alpha / r.pole * (1.0 - std::exp(-r.pole * t));
    }
    return acc + eval_f1(t, set) + eval_f2(t, set);
}

double
step_response_rate(double t, PoleResidueSet const& set)
{
    require_time(t);
    double acc = 0.0;
    for (auto const& r : set.real_terms)
    {
        acc += r.alpha * std::exp(-r.pole * t);
    }
    return acc + eval_fdot(t, set);
}

double
deviation_of_source(double t, DelayedStepSource const& src, PoleResidueSet const& set)
{
    double const local = t - src.delay_s;
    if (!(local > 0.0))
    {
        return 0.0;
    }
    return src.magnitude_pu * step_response(local, set);
}

double
deviation_rate_of_source(double t, DelayedStepSource const& src, PoleResidueSet const& set)
{
    double const local = t - src.delay_s;
    if (!(local > 0.0))
    {
        return 0.0;
    }
    return src.magnitude_pu * step_response_rate(local, set);
}

namespace
{

void
require_matching(Portfolio const& pf, FrequencyModel const& model)
{
    if (!(pf.params == model.params()))
    {
        throw DomainError("portfolio parameters differ from the frequency model");
    }
}

} // namespace

double
total_deviation(double t, Portfolio const& pf, FrequencyModel const& model)
{
    require_time(t);
    require_matching(pf, model);
    double acc = 0.0;
    for (auto const& s : pf.sources)
    {
        acc += deviation_of_source(t, s, model.pole_set_for(s));
    }
    return acc - deviation_of_source(t, pf.loss, model.pole_set());
}

double
total_deviation_rate(double t, Portfolio const& pf, FrequencyModel const& model)
{
    require_time(t);
    require_matching(pf, model);
    double acc = 0.0;
    for (auto const& s : pf.sources)
    {
        acc += deviation_rate_of_source(t, s, model.pole_set_for(s));
    }
    return acc - deviation_rate_of_source(t, pf.loss, model.pole_set());
}

double
steady_state_deviation(Portfolio const& pf)
{
    return (pf.reserve_total() - pf.loss.magnitude_pu) / (pf.params.D + 1.0 / pf.params.K);
}

} // namespace ffr::freq
