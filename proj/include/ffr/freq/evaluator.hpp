#pragma once

#include "ffr/freq/response.hpp"

#include <complex>
#include <vector>

namespace ffr::freq
{

/// Evaluates the aggregate deviation of many delayed steps in O(log n) per
/// call. Sources sharing a pole set are grouped and sorted by delay; for every
/// pole the group keeps the running sum
///
///     S_k = sum_{i <= k} R_i exp(-p (tau_k - tau_i)),
///
/// so the contribution of all sources active at t is a closed form in
/// S_k exp(-p (t - tau_k)). Appending a source whose delay is not below the
/// group's last delay costs O(poles).
class ResponseEvaluator
{
public:
    ResponseEvaluator(FrequencyModel const& model, double loss_pu);
    ResponseEvaluator(FrequencyModel const& model, Portfolio const& pf);

    void add(DelayedStepSource const& src);

    /// Total deviation, equal to total_deviation() of the equivalent portfolio.
    double deviation(double t) const;
    /// Rate with the u(0) = 0 gate: sources activating exactly at t are off.
    double rate(double t) const;
    /// Right limit of the rate at t.
    double rate_after(double t) const;

    double loss_pu() const { return loss_pu_; }
    double reserve_total() const { return reserve_total_; }
    std::size_t source_count() const { return count_; }

    /// Distinct activation instants strictly inside (lo, hi), sorted. When
    /// there are more than `max_count`, an index-uniform subset is returned.
    std::vector<double> breakpoints(double lo, double hi, std::size_t max_count) const;

    /// Whether `t` lies within `tol` of any activation instant.
    bool near_activation(double t, double tol) const;

    FrequencyModel const& model() const { return model_; }

private:
    struct Group
    {
        PoleResidueSet const* set = nullptr;
        std::vector<double> delays;
        std::vector<double> magnitudes;
        std::vector<double> cum_magnitude;
        std::vector<double> real_acc;
        std::vector<std::complex<double>> complex_acc;
        // alpha/p per pole, the step-response weight.
        std::vector<double> real_step_coef;
        std::vector<std::complex<double>> complex_step_coef;
    };

    Group& group_for(PoleResidueSet const* set);
    static void rebuild_from(Group& g, std::size_t first);
    static void fill_row(Group& g, std::size_t k);
    double group_deviation(Group const& g, double t) const;
    double group_rate(Group const& g, double t, bool inclusive) const;
    double evaluate_rate(double t, bool inclusive) const;

    FrequencyModel model_;
    double loss_pu_;
    double reserve_total_ = 0.0;
    std::size_t count_ = 0;
    std::vector<Group> groups_;
};

} // namespace ffr::freq
