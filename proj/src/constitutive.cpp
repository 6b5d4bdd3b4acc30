#include "carreau/constitutive.hpp"

#include <algorithm>
#include <stdexcept>

namespace carreau {

void CarreauParams::validate() const {
    if (!(eta0 > eta_inf) || !(eta_inf >= 0.0))
        throw std::invalid_argument("CarreauParams: requires eta0 > eta_inf >= 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("CarreauParams: requires lambda > 0");
    if (!(p > 1.0) || !(p <= 2.0))
        throw std::invalid_argument("CarreauParams: requires p in (1, 2]");
}

double eta(double z, const CarreauParams& params) {
    params.validate();
    if (z < 0.0) throw std::invalid_argument("eta: z must be >= 0");
    return params.eta_inf +
           (params.eta0 - params.eta_inf) *
               std::pow(1.0 + params.lambda * z, 0.5 * (params.p - 2.0));
}

double eta_prime(double z, const CarreauParams& params) {
    params.validate();
    if (z < 0.0) throw std::invalid_argument("eta_prime: z must be >= 0");
    return (params.eta0 - params.eta_inf) * 0.5 * (params.p - 2.0) * params.lambda *
           std::pow(1.0 + params.lambda * z, 0.5 * (params.p - 4.0));
}

SymTensor2 stress(const SymTensor2& eps, const CarreauParams& params) {
    return eps * eta(eps.frobenius_sq(), params);
}

double monotonicity_pairing(const SymTensor2& K, const SymTensor2& L,
                            const CarreauParams& params) {
    const SymTensor2 d = stress(K, params) - stress(L, params);
    return d.dot(K - L);
}

double lipschitz_ratio(const SymTensor2& K, const SymTensor2& L,
                       const CarreauParams& params) {
    const double dn = (K - L).frobenius();
    if (dn == 0.0) throw std::invalid_argument("lipschitz_ratio: K and L must differ");
    const double num = (stress(K, params) - stress(L, params)).frobenius();
    if (params.eta_inf != 0.0) return num / dn;
    return num / std::pow(dn, params.p - 1.0);
}

ViscosityModel ViscosityModel::exp_decay(double interval_lo, double interval_hi) {
    ViscosityModel m;
    m.kind = Kind::ExpDecay;
    m.interval_lo = interval_lo;
    m.interval_hi = interval_hi;
    return m;
}

ViscosityModel ViscosityModel::constant(double value) {
    ViscosityModel m;
    m.kind = Kind::Constant;
    m.c = value;
    return m;
}

ViscosityModel ViscosityModel::affine_clamped(double a, double b, double lo, double hi,
                                              double interval_lo, double interval_hi) {
    ViscosityModel m;
    m.kind = Kind::AffineClamped;
    m.a = a;
    m.b = b;
    m.lo = lo;
    m.hi = hi;
    m.interval_lo = interval_lo;
    m.interval_hi = interval_hi;
    return m;
}

double ViscosityModel::nu1() const {
    switch (kind) {
    case Kind::ExpDecay: return std::exp(-interval_hi);
    case Kind::Constant: return c;
    case Kind::AffineClamped: return lo;
    }
    throw std::invalid_argument("ViscosityModel: unknown kind");
}

double ViscosityModel::nu2() const {
    switch (kind) {
    case Kind::ExpDecay: return std::exp(-interval_lo);
    case Kind::Constant: return c;
    case Kind::AffineClamped: return hi;
    }
    throw std::invalid_argument("ViscosityModel: unknown kind");
}

double ViscosityModel::nu3() const {
    switch (kind) {
    case Kind::ExpDecay: return std::exp(-interval_lo);
    case Kind::Constant: return 0.0;
    case Kind::AffineClamped: return std::abs(b);
    }
    throw std::invalid_argument("ViscosityModel: unknown kind");
}

double nu(double theta, const ViscosityModel& model) {
    switch (model.kind) {
    case ViscosityModel::Kind::ExpDecay: return std::exp(-theta);
    case ViscosityModel::Kind::Constant: return model.c;
    case ViscosityModel::Kind::AffineClamped:
        return std::clamp(model.a + model.b * theta, model.lo, model.hi);
    }
    throw std::invalid_argument("nu: unknown model kind");
}

double nu_prime(double theta, const ViscosityModel& model) {
    switch (model.kind) {
    case ViscosityModel::Kind::ExpDecay: return -std::exp(-theta);
    case ViscosityModel::Kind::Constant: return 0.0;
    case ViscosityModel::Kind::AffineClamped: {
        const double raw = model.a + model.b * theta;
        return (raw > model.lo && raw < model.hi) ? model.b : 0.0;
    }
    }
    throw std::invalid_argument("nu_prime: unknown model kind");
}

} // namespace carreau
