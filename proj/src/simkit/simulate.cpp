#include "ffr/simkit/simulate.hpp"

#include "ffr/errors.hpp"
#include "ffr/freq/transfer_function.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ffr::simkit
{

StateSpace
controllable_canonical(freq::RationalTF const& tf)
{
    tf.validate();
    freq::Polynomial den = freq::poly_trim(tf.den);
    freq::Polynomial num = freq::poly_trim(tf.num);
    std::size_t const n = den.size() - 1;
    double const lead = den.back();

    StateSpace ss;
    ss.A.assign(n, std::vector<double>(n, 0.0));
    ss.B.assign(n, 0.0);
    ss.C.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        ss.A[i][i + 1] = 1.0;
    }
    for (std::size_t j = 0; j < n; ++j)
    {
        ss.A[n - 1][j] = -den[j] / lead;
    }
    ss.B[n - 1] = 1.0;
    for (std::size_t j = 0; j < num.size() && j < n; ++j)
    {
        ss.C[j] = num[j] / lead;
    }
    return ss;
}

namespace
{

struct Lag
{
    double magnitude;
    double delay;
    double time_constant;
};

struct Step
{
    double magnitude;
    double delay;
};

class Plant
{
public:
    explicit Plant(freq::Portfolio const& pf)
        : params_(pf.params)
        , gov_(controllable_canonical(
              freq::build_governor_tf(pf.params.T_g, pf.params.T_c, pf.params.T_r, pf.params.F_h)))
        , inv_K_(std::isinf(pf.params.K) ? 0.0 : 1.0 / pf.params.K)
        , loss_(pf.loss.magnitude_pu)
    {
        for (auto const& s : pf.sources)
        {
            if (s.kind == freq::SourceKind::Der && s.time_constant_s > 0.0)
            {
                lags_.push_back({s.magnitude_pu, s.delay_s, s.time_constant_s});
            }
            else
            {
                steps_.push_back({s.magnitude_pu, s.delay_s});
            }
        }
    }

    std::size_t dim() const { return 1 + gov_.order() + lags_.size(); }

    /// Derivative with inputs gated as on (delay <= gate_t) for the whole
    /// sub-interval beginning at gate_t.
    void derivative(double gate_t, std::vector<double> const& x, std::vector<double>& dx) const
    {
        double const dw = x[0];
        std::size_t const n = gov_.order();
        double y = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            double acc = gov_.B[i] * dw;
            for (std::size_t j = 0; j < n; ++j)
            {
                acc += gov_.A[i][j] * x[1 + j];
            }
            dx[1 + i] = acc;
            y += gov_.C[i] * x[1 + i];
        }
        double p = gate_t >= 0.0 ? -loss_ : 0.0;
        for (auto const& s : steps_)
        {
            if (s.delay <= gate_t)
            {
                p += s.magnitude;
            }
        }
        for (std::size_t k = 0; k < lags_.size(); ++k)
        {
            double const xk = x[1 + n + k];
            double const in = lags_[k].delay <= gate_t ? lags_[k].magnitude : 0.0;
            dx[1 + n + k] = (in - xk) / lags_[k].time_constant;
            p += xk;
        }
        dx[0] = (p - params_.D * dw - inv_K_ * y) / (2.0 * params_.H);
    }

    std::vector<double> activation_times() const
    {
        std::vector<double> out{0.0};
        for (auto const& s : steps_)
        {
            out.push_back(s.delay);
        }
        for (auto const& l : lags_)
        {
            out.push_back(l.delay);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    freq::SystemParams params_;
    StateSpace gov_;
    double inv_K_;
    double loss_;
    std::vector<Lag> lags_;
    std::vector<Step> steps_;
};

void
rk4(Plant const& plant, double gate_t, double h, std::vector<double>& x, std::vector<std::vector<double>>& w)
{
    auto& k1 = w[0];
    auto& k2 = w[1];
    auto& k3 = w[2];
    auto& k4 = w[3];
    auto& tmp = w[4];
    std::size_t const n = x.size();
    plant.derivative(gate_t, x, k1);
    for (std::size_t i = 0; i < n; ++i)
    {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    plant.derivative(gate_t, tmp, k2);
    for (std::size_t i = 0; i < n; ++i)
    {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    plant.derivative(gate_t, tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
    {
        tmp[i] = x[i] + h * k3[i];
    }
    plant.derivative(gate_t, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
    {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

} // namespace

SimTrace
simulate(freq::Portfolio const& pf, double t_end, double dt, SimOptions const& options)
{
    pf.validate();
    if (!(dt > 0.0) || !std::isfinite(dt))
    {
        throw DomainError("simulate: dt must be > 0");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end))
    {
        throw DomainError("simulate: t_end must be > 0");
    }
    double fastest = std::min(pf.params.T_g, pf.params.T_c);
    for (auto const& s : pf.sources)
    {
        if (s.kind == freq::SourceKind::Der && s.time_constant_s > 0.0)
        {
            fastest = std::min(fastest, s.time_constant_s);
        }
    }
    if (dt > fastest / 10.0)
    {
        throw DomainError(
            fmt::format("simulate: dt = {} s exceeds one tenth of the fastest time constant ({} s)", dt, fastest));
    }

    Plant const plant(pf);
    std::vector<double> const events = plant.activation_times();
    auto const steps = static_cast<std::size_t>(std::llround(t_end / dt));

    SimTrace trace;
    trace.dt = dt;
    trace.t.reserve(steps + 1);
    trace.dw.reserve(steps + 1);
    std::size_t const gov_order = plant.dim() - 1
        - static_cast<std::size_t>(std::count_if(pf.sources.begin(), pf.sources.end(), [](auto const& s) {
              return s.kind == freq::SourceKind::Der && s.time_constant_s > 0.0;
          }));
    if (options.record_sources)
    {
        for (auto const& s : pf.sources)
        {
            trace.source_ids.push_back(s.id);
        }
        trace.source_power.assign(pf.sources.size(), {});
    }

    std::vector<double> x(plant.dim(), 0.0);
    std::vector<std::vector<double>> work(5, std::vector<double>(x.size()));

    auto record = [&](double t) {
        trace.t.push_back(t);
        trace.dw.push_back(x[0]);
        if (!options.record_sources)
        {
            return;
        }
        std::size_t lag = 0;
        for (std::size_t i = 0; i < pf.sources.size(); ++i)
        {
            auto const& s = pf.sources[i];
            double p = 0.0;
            if (s.kind == freq::SourceKind::Der && s.time_constant_s > 0.0)
            {
                p = x[1 + gov_order + lag++];
            }
            else if (t > s.delay_s)
            {
                p = s.magnitude_pu;
            }
            trace.source_power[i].push_back(p);
        }
    };

    record(0.0);
    std::size_t next_event = 0;
    for (std::size_t i = 0; i < steps; ++i)
    {
        double const a = static_cast<double>(i) * dt;
        double const b = static_cast<double>(i + 1) * dt;
        double cur = a;
        while (next_event < events.size() && events[next_event] <= a)
        {
            ++next_event;
        }
        std::size_t e = next_event;
        while (true)
        {
            double const stop = (e < events.size() && events[e] < b) ? events[e] : b;
            if (stop > cur)
            {
                rk4(plant, cur, stop - cur, x, work);
            }
            cur = stop;
            if (stop >= b)
            {
                break;
            }
            ++e;
        }
        if (!std::isfinite(x[0]) || std::abs(x[0]) > options.divergence_limit_pu)
        {
            throw NumericalError(fmt::format("simulate: |dw| exceeded {} pu at t = {} s", options.divergence_limit_pu, b));
        }
        record(b);
    }
    return trace;
}

Series
dw_series(SimTrace const& trace)
{
    return {trace.t, trace.dw};
}

Series
sample(std::function<double(double)> const& f, std::vector<double> const& t)
{
    Series s{t, {}};
    s.v.reserve(t.size());
    for (double ti : t)
    {
        s.v.push_back(f(ti));
    }
    return s;
}

namespace
{

double
interpolate(Series const& s, double t)
{
    auto it = std::lower_bound(s.t.begin(), s.t.end(), t);
    if (it == s.t.end())
    {
        return s.v.back();
    }
    auto const k = static_cast<std::size_t>(it - s.t.begin());
    if (*it == t || k == 0)
    {
        return s.v[k];
    }
    double const t0 = s.t[k - 1];
    double const t1 = s.t[k];
    double const w = (t - t0) / (t1 - t0);
    return s.v[k - 1] + w * (s.v[k] - s.v[k - 1]);
}

double
mean_spacing(Series const& s)
{
    return s.t.size() > 1 ? (s.t.back() - s.t.front()) / static_cast<double>(s.t.size() - 1)
                          : std::numeric_limits<double>::infinity();
}

} // namespace

Comparison
compare(Series const& a, Series const& b)
{
    if (a.t.empty() || b.t.empty() || a.t.size() != a.v.size() || b.t.size() != b.v.size())
    {
        throw DomainError("compare: series must be non-empty with matching lengths");
    }
    double const lo = std::max(a.t.front(), b.t.front());
    double const hi = std::min(a.t.back(), b.t.back());
    if (lo > hi)
    {
        throw DomainError("compare: time ranges do not overlap");
    }
    bool const a_coarse = mean_spacing(a) >= mean_spacing(b);
    Series const& grid = a_coarse ? a : b;
    Series const& fine = a_coarse ? b : a;

    Comparison out;
    double sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.t.size(); ++i)
    {
        double const t = grid.t[i];
        if (t < lo || t > hi)
        {
            continue;
        }
        double const err = std::abs(grid.v[i] - interpolate(fine, t));
        sq += err * err;
        ++count;
        if (count == 1 || err > out.max_abs)
        {
            out.max_abs = err;
            out.argmax_t = t;
        }
    }
    if (count == 0)
    {
        throw DomainError("compare: no grid point inside the overlap");
    }
    out.rmse = std::sqrt(sq / static_cast<double>(count));
    return out;
}

Comparison
compare(SimTrace const& a, SimTrace const& b)
{
    return compare(dw_series(a), dw_series(b));
}

void
write_trace_csv(std::ostream& os, SimTrace const& trace)
{
    os << "t_s,dw_pu";
    for (auto const& id : trace.source_ids)
    {
        os << ",src_" << id << "_pu";
    }
    os << '\n';
    for (std::size_t i = 0; i < trace.t.size(); ++i)
    {
        os << fmt::format("{:.17g},{:.17g}", trace.t[i], trace.dw[i]);
        for (auto const& col : trace.source_power)
        {
            os << fmt::format(",{:.17g}", col[i]);
        }
        os << '\n';
    }
}

} // namespace ffr::simkit
