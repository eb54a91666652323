#pragma once

#include "ffr/freq/pole_residue.hpp"
#include "ffr/freq/system_params.hpp"
#include "ffr/freq/transfer_function.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ffr::freq
{

enum class SourceKind
{
    Der,
    Cl,
    Loss,
};

char const* to_string(SourceKind kind);

/// A step of `magnitude_pu` applied after `delay_s`, filtered by a first-order
/// lag with `time_constant_s` for DERs. LOSS is the contingency at t = 0.
struct DelayedStepSource
{
    SourceKind kind = SourceKind::Cl;
    double magnitude_pu = 0.0;
    double delay_s = 0.0;
    double time_constant_s = 0.0;
    std::string id;

    void validate() const;

    static DelayedStepSource der(double magnitude_pu, double delay_s, double time_constant_s, std::string id = {});
    static DelayedStepSource cl(double magnitude_pu, double delay_s, std::string id = {});
    static DelayedStepSource loss(double magnitude_pu);
};

/// Activated reserves plus the contingency they answer.
struct Portfolio
{
    std::vector<DelayedStepSource> sources;
    DelayedStepSource loss = DelayedStepSource::loss(0.0);
    SystemParams params;

    void validate() const;
    double reserve_total() const;
};

/// Closed-loop model with its pole/residue set and a per-T_d cache of the
/// lag-augmented sets. Copies share the cache; lookups are thread-safe.
class FrequencyModel
{
public:
    explicit FrequencyModel(SystemParams params = {}, DecompositionOptions options = {});

    SystemParams const& params() const { return params_; }
    RationalTF const& closed_loop() const { return tf_; }
    PoleResidueSet const& pole_set() const { return *base_; }

    /// Decomposition of the closed loop times 1/(s T_d + 1), keyed by the
    /// bit pattern of T_d.
    PoleResidueSet const& der_pole_set(double T_d) const;

    /// The set a source's response is expressed in: the lag-augmented set for
    /// DERs, the plain closed-loop set otherwise.
    PoleResidueSet const& pole_set_for(DelayedStepSource const& src) const;

    /// 1 / (D + 1/K).
    double dc_gain() const;

    std::size_t cached_der_sets() const;

private:
    struct Cache;

    SystemParams params_;
    DecompositionOptions options_;
    RationalTF tf_;
    std::shared_ptr<PoleResidueSet const> base_;
    std::shared_ptr<Cache> cache_;
};

/// Integrated cosine part of the complex-pair step response.
double eval_f1(double t, PoleResidueSet const& set);
/// Integrated sine part of the complex-pair step response.
double eval_f2(double t, PoleResidueSet const& set);
/// Time derivative of f1 + f2.
double eval_fdot(double t, PoleResidueSet const& set);

/// Unit step response: sum over real terms of (alpha/p)(1 - e^{-pt}) plus f1 + f2.
double step_response(double t, PoleResidueSet const& set);
/// Its derivative: sum of alpha e^{-pt} plus fdot.
double step_response_rate(double t, PoleResidueSet const& set);

/// Raw (unsigned) contribution of one source at time t, gated by u(t - delay)
/// with u(0) = 0. The caller subtracts LOSS contributions.
double deviation_of_source(double t, DelayedStepSource const& src, PoleResidueSet const& set);
double deviation_rate_of_source(double t, DelayedStepSource const& src, PoleResidueSet const& set);

/// Sum of DER and CL contributions minus the loss contribution.
double total_deviation(double t, Portfolio const& pf, FrequencyModel const& model);
double total_deviation_rate(double t, Portfolio const& pf, FrequencyModel const& model);

/// Final value (sum of reserves - loss) / (D + 1/K).
double steady_state_deviation(Portfolio const& pf);

} // namespace ffr::freq
