#include "ffr/freq/transfer_function.hpp"

#include "ffr/errors.hpp"

#include <cmath>

namespace ffr::freq
{

void
SystemParams::validate() const
{
    auto require = [](bool ok, char const* what) {
        if (!ok)
        {
            throw DomainError(std::string("SystemParams: ") + what);
        }
    };
    require(std::isfinite(H) && H > 0.0, "H must be > 0");
    require(std::isfinite(D) && D >= 0.0, "D must be >= 0");
    require(!std::isnan(K) && K > 0.0, "K must be > 0");
    require(std::isfinite(T_g) && T_g > 0.0, "T_g must be > 0");
    require(std::isfinite(T_c) && T_c > 0.0, "T_c must be > 0");
    require(std::isfinite(T_r) && T_r > 0.0, "T_r must be > 0");
    require(std::isfinite(F_h) && F_h >= 0.0 && F_h <= 1.0, "F_h must lie in [0, 1]");
    require(std::isfinite(f_nom) && f_nom > 0.0, "f_nom must be > 0");
    require(std::isfinite(S_base) && S_base > 0.0, "S_base must be > 0");
}

double
aggregate_inertia(std::span<GeneratorUnit const> units, double s_sym_mva)
{
    if (units.empty())
    {
        throw DomainError("aggregate_inertia: no generating units");
    }
    if (!(s_sym_mva > 0.0))
    {
        throw DomainError("aggregate_inertia: system rating must be > 0");
    }
    double weighted = 0.0;
    for (auto const& u : units)
    {
        if (!(u.rating_mva > 0.0) || !(u.inertia_s > 0.0))
        {
            throw DomainError("aggregate_inertia: unit rating and inertia must be > 0");
        }
        weighted += u.rating_mva * u.inertia_s;
    }
    return weighted / s_sym_mva;
}

void
RationalTF::validate() const
{
    if (num.empty() || den.empty())
    {
        throw DomainError("RationalTF: empty coefficient list");
    }
    for (double c : num)
    {
        if (!std::isfinite(c))
        {
            throw DomainError("RationalTF: non-finite numerator coefficient");
        }
    }
    for (double c : den)
    {
        if (!std::isfinite(c))
        {
            throw DomainError("RationalTF: non-finite denominator coefficient");
        }
    }
    if (den.back() == 0.0)
    {
        throw DomainError("RationalTF: denominator leading coefficient is zero");
    }
    if (poly_degree(num) >= static_cast<int>(den.size()) - 1)
    {
        throw DomainError("RationalTF: transfer function is not strictly proper");
    }
}

std::complex<double>
RationalTF::operator()(std::complex<double> s) const
{
    return poly_eval(num, s) / poly_eval(den, s);
}

RationalTF
build_governor_tf(double T_g, double T_c, double T_r, double F_h)
{
    if (!(T_g > 0.0) || !(T_c > 0.0) || !(T_r > 0.0))
    {
        throw DomainError("build_governor_tf: time constants must be > 0");
    }
    RationalTF g;
    g.num = poly_trim(Polynomial{1.0, F_h * T_r});
    Polynomial const reheat{1.0, T_r};
    Polynomial const governor{1.0, T_g};
    Polynomial const turbine{1.0, T_c};
    g.den = poly_mul(poly_mul(reheat, governor), turbine);
    return g;
}

RationalTF
build_closed_loop(SystemParams const& params)
{
    params.validate();
    Polynomial const swing{params.D, 2.0 * params.H};
    double const inv_droop = 1.0 / params.K;
    if (params.D + inv_droop == 0.0)
    {
        throw DomainError("build_closed_loop: D + 1/K vanishes, closed loop has a pole at 0");
    }
    if (inv_droop == 0.0)
    {
        return RationalTF{{1.0}, swing};
    }

    // (2Hs+D)^-1 / (1 + G/(K(2Hs+D))) = Gd / ((2Hs+D) Gd + Gn/K)
    RationalTF const g = build_governor_tf(params.T_g, params.T_c, params.T_r, params.F_h);
    RationalTF tf;
    tf.num = g.den;
    tf.den = poly_add(poly_mul(swing, g.den), poly_scale(g.num, inv_droop));
    tf.validate();
    return tf;
}

std::complex<double>
closed_loop_direct(SystemParams const& params, std::complex<double> s)
{
    RationalTF const g = build_governor_tf(params.T_g, params.T_c, params.T_r, params.F_h);
    std::complex<double> const swing_inv = 1.0 / (2.0 * params.H * s + params.D);
    return swing_inv / (1.0 + g(s) * (1.0 / params.K) * swing_inv);
}

} // namespace ffr::freq
