#pragma once

#include <cmath>
#include <cstddef>

#include "arisim/common.hpp"

namespace arisim::ris {

enum class Mode { Active, Passive };

/// Per-element surface state: phase shift, amplitude coefficient, and
/// amplification factor. Passive surfaces carry unit amplification and inject
/// no dynamic noise.
struct RisState {
    std::vector<double> phases;         ///< theta_k in [-pi, pi)
    std::vector<double> amplitudes;     ///< a_k in (0, 1]
    std::vector<double> amplification;  ///< p_k in [1, s_max] (Active), 1 (Passive)
    Mode mode = Mode::Passive;
    double s_max = 10.0;

    std::size_t size() const { return phases.size(); }

    static RisState identity(std::size_t k, Mode mode = Mode::Passive, double s_max = 10.0) {
        RisState s;
        s.phases.assign(k, 0.0);
        s.amplitudes.assign(k, 1.0);
        s.amplification.assign(k, 1.0);
        s.mode = mode;
        s.s_max = s_max;
        return s;
    }

    void validate() const {
        check_arg(amplitudes.size() == phases.size() && amplification.size() == phases.size(),
                  "RisState vectors must have equal length");
        for (double th : phases)
            check_arg(th >= -kPi && th < kPi, "phase out of [-pi, pi)");
        for (double a : amplitudes)
            check_arg(a > 0.0 && a <= 1.0, "amplitude coefficient out of (0, 1]");
        for (double p : amplification) {
            if (mode == Mode::Passive)
                check_arg(p == 1.0, "passive mode requires unit amplification");
            else
                check_arg(p >= 1.0 && p <= s_max, "amplification out of [1, s_max]");
        }
    }
};

/// Per-element dynamic-noise power injected by an active surface.
struct DynamicNoiseParams {
    double sigma_v2 = 0.0;  ///< watts; ignored (treated as 0) in Passive mode

    void validate() const { check_nonnegative(sigma_v2, "sigma_v2"); }
};

/// Channel pair through one surface: incident (BS->RIS) and outgoing
/// (RIS->user) per-element gains.
struct CascadeInput {
    cvec h_in;
    cvec h_out;

    void validate() const {
        check_arg(h_in.size() == h_out.size(), "cascade channel vectors must have equal length");
    }
};

/// Diagonal of the reflection matrix: element k is p_k * a_k * exp(j theta_k).
inline cvec reflection_matrix(const RisState& s) {
    s.validate();
    cvec r(s.size());
    for (std::size_t k = 0; k < s.size(); ++k)
        r[k] = std::polar(s.amplification[k] * s.amplitudes[k], s.phases[k]);
    return r;
}

/// Surface contribution to an end-to-end link:
/// sum_k h_out[k] * p_k a_k exp(j theta_k) * h_in[k].
inline cgain cascaded_gain(const CascadeInput& c, const RisState& s) {
    c.validate();
    check_arg(c.h_in.size() == s.size(), "cascade length must match RIS element count");
    cgain acc{0.0, 0.0};
    for (std::size_t k = 0; k < s.size(); ++k)
        acc += c.h_out[k] * std::polar(s.amplification[k] * s.amplitudes[k], s.phases[k]) *
               c.h_in[k];
    return acc;
}

/// Direct link plus one surface cascade. With several surfaces the caller adds
/// one cascade term per surface.
inline cgain effective_channel(cgain direct, const CascadeInput& c, const RisState& s) {
    return direct + cascaded_gain(c, s);
}

/// Dynamic-noise power delivered to a receiver by an active surface:
/// sigma_v2 * sum_k |h_out[k] * p_k * a_k|^2. Zero for passive surfaces.
inline double dynamic_noise_power(const cvec& h_out, const RisState& s,
                                  const DynamicNoiseParams& n) {
    if (s.mode == Mode::Passive) return 0.0;
    n.validate();
    check_arg(h_out.size() == s.size(), "h_out length must match RIS element count");
    double acc = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        double m = std::abs(h_out[k]) * s.amplification[k] * s.amplitudes[k];
        acc += m * m;
    }
    return n.sigma_v2 * acc;
}

/// Closed-form per-element phases that co-phase every cascade term with the
/// direct path: theta_k = arg(direct) - arg(h_out[k] * h_in[k]), wrapped to
/// [-pi, pi). Elements with zero cascade magnitude get phase 0.
inline std::vector<double> phase_align(const CascadeInput& c, cgain direct) {
    c.validate();
    std::vector<double> th(c.h_in.size());
    const double ref = (direct == cgain{0.0, 0.0}) ? 0.0 : std::arg(direct);
    for (std::size_t k = 0; k < th.size(); ++k) {
        const cgain prod = c.h_out[k] * c.h_in[k];
        th[k] = (prod == cgain{0.0, 0.0}) ? 0.0 : wrap_angle(ref - std::arg(prod));
    }
    return th;
}

}  // namespace arisim::ris
