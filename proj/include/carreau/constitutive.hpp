#pragma once

#include <cmath>

namespace carreau {

/// Constants of the Carreau viscosity law
///   eta(z) = eta_inf + (eta0 - eta_inf) * (1 + lambda*z)^((p-2)/2),
/// with eta0 > eta_inf >= 0, lambda > 0 and p in (1, 2]. The argument z is
/// the squared Frobenius norm of the strain rate. p = 2 gives the
/// Newtonian limit eta == eta0.
struct CarreauParams {
    double eta_inf = 0.5;
    double eta0 = 2.0;
    double lambda = 1.0;
    double p = 1.6;

    void validate() const;
};

/// Symmetric 2x2 tensor (e.g. the strain rate). |.| below is the Frobenius
/// norm, counting the off-diagonal entry twice.
struct SymTensor2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    double frobenius_sq() const { return xx * xx + 2.0 * xy * xy + yy * yy; }
    double frobenius() const { return std::sqrt(frobenius_sq()); }

    SymTensor2 operator-(const SymTensor2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
    SymTensor2 operator*(double s) const { return {s * xx, s * xy, s * yy}; }
    double dot(const SymTensor2& o) const { return xx * o.xx + 2.0 * xy * o.xy + yy * o.yy; }
};

/// Carreau viscosity at z = |eps|^2 >= 0. Value lies in [eta_inf, eta0] and
/// is non-increasing in z for p < 2.
double eta(double z, const CarreauParams& params);

/// d(eta)/dz, used by the manufactured forcing terms.
double eta_prime(double z, const CarreauParams& params);

/// tau(eps) = eta(|eps|^2) * eps.
SymTensor2 stress(const SymTensor2& eps, const CarreauParams& params);

/// (tau(K) - tau(L)) : (K - L). Strictly positive for K != L, and bounded
/// below by eta_inf*|K-L|^2 when eta_inf > 0.
double monotonicity_pairing(const SymTensor2& K, const SymTensor2& L,
                            const CarreauParams& params);

/// |tau(K) - tau(L)| / |K - L| when eta_inf != 0, and divided by
/// |K - L|^(p-1) when eta_inf = 0. Requires K != L.
double lipschitz_ratio(const SymTensor2& K, const SymTensor2& L,
                       const CarreauParams& params);

/// Temperature factor nu with statically known bounds on a stated
/// temperature interval: 0 < nu1 <= nu <= nu2 and |nu'| <= nu3 hold on
/// [interval_lo, interval_hi]. Evaluation itself is unrestricted.
struct ViscosityModel {
    enum class Kind { ExpDecay, Constant, AffineClamped };

    Kind kind = Kind::ExpDecay;
    double c = 1.0;                      // Constant value
    double a = 1.0, b = 0.0;             // AffineClamped: a + b*theta
    double lo = 1.0, hi = 1.0;           // AffineClamped clamp range
    double interval_lo = 0.0, interval_hi = 1.0;

    static ViscosityModel exp_decay(double interval_lo, double interval_hi);
    static ViscosityModel constant(double value);
    static ViscosityModel affine_clamped(double a, double b, double lo, double hi,
                                         double interval_lo, double interval_hi);

    double nu1() const;  // lower bound on the stated interval
    double nu2() const;  // upper bound on the stated interval
    double nu3() const;  // bound on |nu'| on the stated interval
};

double nu(double theta, const ViscosityModel& model);
double nu_prime(double theta, const ViscosityModel& model);

} // namespace carreau
