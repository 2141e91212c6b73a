#pragma once

#include <cmath>

#include "arisim/common.hpp"

namespace arisim::channel {

/// Large-scale path loss parameters for one link class.
/// Channel power scales as rho0 / d^alpha.
struct PathLossParams {
    double rho0 = 1e-3;  ///< linear power gain at the 1 m reference distance
    double alpha = 2.2;  ///< path-loss exponent

    void validate() const {
        check_positive(rho0, "rho0");
        if (alpha < 2.0) throw std::domain_error("alpha must be >= 2.0");
    }
};

/// Rician small-scale fading parameters.
struct RicianParams {
    double kappa = 2.0;  ///< K-factor (linear); kappa = 0 degenerates to Rayleigh
    double aoa = 0.0;    ///< LoS angle of arrival, radians in [-pi/2, pi/2]

    void validate() const {
        check_nonnegative(kappa, "kappa");
        if (aoa < -kPi / 2.0 || aoa > kPi / 2.0)
            throw std::domain_error("aoa must lie in [-pi/2, pi/2]");
    }
};

/// d^alpha, the attenuation divisor.
inline double path_loss(double d, double alpha) {
    check_positive(d, "distance");
    return std::pow(d, alpha);
}

/// Amplitude scale factor sqrt(rho0 / d^alpha).
inline double amplitude_gain(double d, const PathLossParams& pl) {
    return std::sqrt(pl.rho0 / path_loss(d, pl.alpha));
}

/// One CN(0, 1) small-scale Rayleigh coefficient: unit mean power.
inline cgain sample_rayleigh(Rng& rng) { return rng.cnormal(); }

/// Uniform linear array steering vector; element k (1-indexed) is
/// exp(j (k-1) pi sin(aoa)). All entries have unit modulus.
inline cvec los_steering(double aoa, std::size_t k_elems) {
    if (k_elems == 0) throw std::domain_error("steering vector needs k_elems >= 1");
    cvec v(k_elems);
    const double phi = kPi * std::sin(aoa);
    const cgain step = std::polar(1.0, phi);
    cgain cur{1.0, 0.0};
    for (std::size_t k = 0; k < k_elems; ++k) {
        v[k] = cur;
        cur *= step;
    }
    return v;
}

/// Rician-faded channel vector with LoS steering and i.i.d. CN(0,1) NLoS parts,
/// scaled by sqrt(rho0 / d^alpha).
inline cvec sample_rician(const RicianParams& p, std::size_t k_elems, double d,
                          const PathLossParams& pl, Rng& rng) {
    p.validate();
    pl.validate();
    const double scale = amplitude_gain(d, pl);
    const double w_los = std::sqrt(p.kappa / (1.0 + p.kappa));
    const double w_nlos = std::sqrt(1.0 / (1.0 + p.kappa));
    cvec v = los_steering(p.aoa, k_elems);
    for (auto& e : v) e = scale * (w_los * e + w_nlos * rng.cnormal());
    return v;
}

/// Scalar Rayleigh BS-to-user channel: sqrt(rho0 / d^alpha) * CN(0, 1).
inline cgain sample_bs_user_channel(double d, const PathLossParams& pl, Rng& rng) {
    pl.validate();
    return amplitude_gain(d, pl) * sample_rayleigh(rng);
}

}  // namespace arisim::channel
