#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "arisim/channel.hpp"
#include "arisim/common.hpp"
#include "arisim/ris.hpp"

namespace arisim::net {

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

enum class Role { Center, Edge };

struct User {
    Pos3 pos;
    Role role = Role::Center;
    int serving = -1;  ///< Center: serving BS. Edge: primary CoMP BS.
    int partner = -1;  ///< Edge only: second CoMP BS.
};

struct Obstacle {
    Pos3 pos;
    double radius = 10.0;  ///< no-fly exclusion radius d_min
};

struct Rect {
    double xmin = -50.0, ymin = -50.0, xmax = 50.0, ymax = 50.0;

    bool contains(double x, double y) const {
        return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
    }
};

/// Static scene: BS grid, NOMA users, obstacles, the two surfaces. The UAV
/// surface position is the only per-slot mutable entry.
struct Topology {
    std::vector<Pos3> bs;
    std::vector<User> users;
    std::vector<Obstacle> obstacles;
    Pos3 ris_ground{0.0, 0.0, 20.0};
    Pos3 uav{-5.0, 0.0, 40.0};
    Rect flight_area;

    std::size_t n_bs() const { return bs.size(); }
    std::size_t n_users() const { return users.size(); }

    Pos3 ris_position(int i) const { return i == 0 ? ris_ground : uav; }

    /// Index of the center user served by BS m, or -1.
    int center_of_bs(int m) const {
        for (std::size_t u = 0; u < users.size(); ++u)
            if (users[u].role == Role::Center && users[u].serving == m) return (int)u;
        return -1;
    }

    /// Index of the edge user whose primary CoMP BS is m, or -1.
    int edge_of_bs(int m) const {
        for (std::size_t u = 0; u < users.size(); ++u)
            if (users[u].role == Role::Edge && users[u].serving == m) return (int)u;
        return -1;
    }

    void validate() const {
        check_arg(!bs.empty(), "topology needs at least one BS");
        for (const auto& b : bs) check_arg(b.z > 0.0, "BS height must be positive");
        check_arg(ris_ground.z > 0.0 && uav.z > 0.0, "RIS heights must be positive");
        std::vector<int> centers(bs.size(), 0), edges(bs.size(), 0);
        for (const auto& u : users) {
            if (u.role == Role::Center) {
                check_arg(u.serving >= 0 && u.serving < (int)bs.size(),
                          "center user needs a valid serving BS");
                centers[u.serving]++;
            } else {
                check_arg(u.serving >= 0 && u.serving < (int)bs.size() && u.partner >= 0 &&
                              u.partner < (int)bs.size() && u.serving != u.partner,
                          "edge user needs two distinct CoMP BSs");
                edges[u.serving]++;
            }
        }
        for (std::size_t m = 0; m < bs.size(); ++m)
            check_arg(centers[m] <= 1 && edges[m] <= 1,
                      "each BS carries at most one center user and one primary edge user");
    }
};

// ---------------------------------------------------------------------------
// Radio / power bookkeeping
// ---------------------------------------------------------------------------

/// Receiver noise floor in dBm for a given bandwidth: -174 + 10 log10(B).
inline double noise_power_dbm(double bandwidth_hz) {
    check_positive(bandwidth_hz, "bandwidth");
    return -174.0 + 10.0 * std::log10(bandwidth_hz);
}

struct RadioConfig {
    double p_t = dbm_to_watt(20.0);     ///< per-BS transmit power, watts
    double sigma2 = 0.0;                ///< receiver AWGN power, watts
    double bandwidth = 1e7;             ///< Hz
    double carrier = 2.4e9;             ///< Hz
    std::vector<double> per_bs_p_t;     ///< optional per-BS override, watts

    void validate() const {
        check_positive(p_t, "p_t");
        check_positive(sigma2, "sigma2");
        check_positive(bandwidth, "bandwidth");
        check_positive(carrier, "carrier");
    }

    double bs_power(std::size_t m) const {
        return per_bs_p_t.empty() ? p_t : per_bs_p_t.at(m);
    }

    static RadioConfig with_defaults(double p_t_dbm, double bandwidth_hz) {
        RadioConfig c;
        c.p_t = dbm_to_watt(p_t_dbm);
        c.bandwidth = bandwidth_hz;
        c.sigma2 = dbm_to_watt(noise_power_dbm(bandwidth_hz));
        return c;
    }
};

struct NomaPowerAlloc {
    std::vector<double> lambdas;  ///< one per BS, edge-user power share

    void validate() const {
        for (double l : lambdas)
            check_arg(l > 0.5 && l < 1.0, "lambda must lie in (0.5, 1)");
    }
};

struct PowerModel {
    double p_bs_static = 1.0;         ///< watts per BS beyond transmit power
    double eta_ris = 1.25;            ///< amplification power draw per unit output power
    double p_circuit_per_elem = 0.01; ///< watts per surface element
    double p_uav_hover = 100.0;       ///< watts

    void validate() const {
        check_nonnegative(p_bs_static, "p_bs_static");
        check_nonnegative(eta_ris, "eta_ris");
        check_nonnegative(p_circuit_per_elem, "p_circuit_per_elem");
        check_nonnegative(p_uav_hover, "p_uav_hover");
    }
};

struct RateReport {
    std::vector<double> per_user;   ///< bits/s/Hz per user index
    std::vector<double> r_c_to_e;   ///< per BS: center's rate decoding the edge symbol (NaN if n/a)
    std::vector<bool> sic_ok;       ///< per user; meaningful for edge users
    double r_total = 0.0;
    double worst = 0.0;
};

// ---------------------------------------------------------------------------
// SINR and NOMA rate chain
// ---------------------------------------------------------------------------

/// Generic received SINR: p_t |H|^2 / (sum_j p_t |H_j|^2 + ris_noise + sigma2).
inline double center_sinr(cgain effective_gain, const std::vector<cgain>& interferer_gains,
                          double ris_noise, const RadioConfig& cfg) {
    double num = cfg.p_t * std::norm(effective_gain);
    double den = ris_noise + cfg.sigma2;
    for (const auto& g : interferer_gains) den += cfg.p_t * std::norm(g);
    return num / den;
}

/// Rate at which the center user decodes the edge user's symbol:
/// log2(1 + lambda g / ((1 - lambda) g + 1)).
inline double rate_decode_edge_at_center(double lambda, double gamma) {
    return std::log2(1.0 + lambda * gamma / ((1.0 - lambda) * gamma + 1.0));
}

/// Center user's own rate after SIC: log2(1 + (1 - lambda) g).
inline double rate_center(double lambda, double gamma) {
    return std::log2(1.0 + (1.0 - lambda) * gamma);
}

enum class RateVariant { Corrected, Literal };

/// CoMP edge-user rate. Corrected pairs each (1 - lambda) term with its own
/// SINR; Literal keeps gamma_j in both denominator terms.
inline double rate_edge(double lambda_m, double gamma_m, double lambda_j, double gamma_j,
                        RateVariant variant = RateVariant::Corrected) {
    double num = lambda_m * gamma_m + lambda_j * gamma_j;
    double den = (variant == RateVariant::Corrected)
                     ? (1.0 - lambda_m) * gamma_m + (1.0 - lambda_j) * gamma_j + 1.0
                     : (1.0 - lambda_m) * gamma_j + (1.0 - lambda_j) * gamma_j + 1.0;
    return std::log2(1.0 + num / den);
}

/// SIC succeeds when the center user can decode the edge message at the edge
/// user's rate.
inline bool sic_feasibility(double r_c_to_e, double r_e) { return r_c_to_e >= r_e; }

// ---------------------------------------------------------------------------
// Per-slot channel realization and composition through the surfaces
// ---------------------------------------------------------------------------

struct ChannelParams {
    channel::PathLossParams pl_bs_user{1e-3, 3.3};
    channel::PathLossParams pl_bs_ris{1e-3, 2.2};
    channel::PathLossParams pl_ris_user{1e-3, 2.2};
    double kappa = 2.0;          ///< Rician K-factor for LoS-favored links
    bool ris_user_rician = true; ///< false: Rayleigh RIS->user fading
};

/// All small-scale channel draws for one time slot. Surface index 0 is the
/// terrestrial surface, 1 the UAV-mounted one.
struct SlotRealization {
    std::size_t n_bs = 0, n_users = 0;
    std::vector<cgain> direct;                 ///< [m * n_users + u]
    std::array<std::vector<cvec>, 2> bs_ris;   ///< per surface: one vector per BS
    std::array<std::vector<cvec>, 2> ris_user; ///< per surface: one vector per user

    cgain d(std::size_t m, std::size_t u) const { return direct[m * n_users + u]; }
};

/// Sample every channel for one slot: Rayleigh BS->user, Rician BS->RIS, and
/// Rician (or Rayleigh) RIS->user. LoS steering angles are the elevation
/// angles of the incoming wave at the surface. Sampling order is fixed, so a
/// given rng state maps to exactly one realization.
inline SlotRealization sample_slot(const Topology& topo, const ChannelParams& cp,
                                   const std::array<std::size_t, 2>& k_elems, Rng& rng) {
    SlotRealization s;
    s.n_bs = topo.n_bs();
    s.n_users = topo.n_users();
    s.direct.resize(s.n_bs * s.n_users);
    for (std::size_t m = 0; m < s.n_bs; ++m)
        for (std::size_t u = 0; u < s.n_users; ++u)
            s.direct[m * s.n_users + u] =
                channel::sample_bs_user_channel(dist3(topo.bs[m], topo.users[u].pos),
                                                cp.pl_bs_user, rng);
    for (int i = 0; i < 2; ++i) {
        const Pos3 rpos = topo.ris_position(i);
        s.bs_ris[i].resize(s.n_bs);
        s.ris_user[i].resize(s.n_users);
        if (k_elems[i] == 0) continue;
        for (std::size_t m = 0; m < s.n_bs; ++m) {
            channel::RicianParams rp{cp.kappa, elevation_angle(rpos, topo.bs[m])};
            s.bs_ris[i][m] = channel::sample_rician(rp, k_elems[i], dist3(rpos, topo.bs[m]),
                                                    cp.pl_bs_ris, rng);
        }
        for (std::size_t u = 0; u < s.n_users; ++u) {
            channel::RicianParams rp{cp.ris_user_rician ? cp.kappa : 0.0,
                                     elevation_angle(rpos, topo.users[u].pos)};
            s.ris_user[i][u] = channel::sample_rician(
                rp, k_elems[i], dist3(rpos, topo.users[u].pos), cp.pl_ris_user, rng);
        }
    }
    return s;
}

/// Effective link gains for one slot under given surface states, plus the
/// dynamic-noise power seen by each user and the per-element incident power
/// gain (sum over BSs of |h_in|^2; multiply by p_t for watts).
struct LinkGains {
    std::size_t n_bs = 0, n_users = 0;
    std::vector<cgain> eff;                       ///< [m * n_users + u]
    std::vector<double> ris_noise;                ///< per user, watts
    std::array<std::vector<double>, 2> elem_in_gain;

    cgain g(std::size_t m, std::size_t u) const { return eff[m * n_users + u]; }
};

inline LinkGains compose_gains(const SlotRealization& s,
                               const std::array<ris::RisState, 2>& states,
                               const std::array<double, 2>& sigma_v2) {
    LinkGains lg;
    lg.n_bs = s.n_bs;
    lg.n_users = s.n_users;
    lg.eff = s.direct;
    lg.ris_noise.assign(s.n_users, 0.0);
    for (int i = 0; i < 2; ++i) {
        const std::size_t k = states[i].size();
        lg.elem_in_gain[i].assign(k, 0.0);
        if (k == 0) continue;
        const cvec refl = ris::reflection_matrix(states[i]);
        for (std::size_t m = 0; m < s.n_bs; ++m) {
            for (std::size_t kk = 0; kk < k; ++kk)
                lg.elem_in_gain[i][kk] += std::norm(s.bs_ris[i][m][kk]);
            for (std::size_t u = 0; u < s.n_users; ++u) {
                cgain acc{0.0, 0.0};
                const cvec& hin = s.bs_ris[i][m];
                const cvec& hout = s.ris_user[i][u];
                for (std::size_t kk = 0; kk < k; ++kk) acc += hout[kk] * refl[kk] * hin[kk];
                lg.eff[m * s.n_users + u] += acc;
            }
        }
        ris::DynamicNoiseParams np{sigma_v2[i]};
        for (std::size_t u = 0; u < s.n_users; ++u)
            lg.ris_noise[u] += ris::dynamic_noise_power(s.ris_user[i][u], states[i], np);
    }
    return lg;
}

// ---------------------------------------------------------------------------
// Whole-network rate reports
// ---------------------------------------------------------------------------

enum class RateScheme { Noma, Oma };

namespace detail {
inline double sinr_of(const LinkGains& lg, const RadioConfig& cfg, std::size_t u,
                      std::size_t desired_bs, const std::vector<bool>& excluded) {
    double num = cfg.bs_power(desired_bs) * std::norm(lg.g(desired_bs, u));
    double den = lg.ris_noise[u] + cfg.sigma2;
    for (std::size_t j = 0; j < lg.n_bs; ++j)
        if (!excluded[j]) den += cfg.bs_power(j) * std::norm(lg.g(j, u));
    return num / den;
}
}  // namespace detail

/// Compose per-user SINRs into the NOMA/CoMP (or orthogonal baseline) rate
/// report. Interference sums over every BS outside the user's serving set.
inline RateReport compute_rates(const Topology& topo, const LinkGains& lg,
                                const NomaPowerAlloc& pa, const RadioConfig& cfg,
                                RateVariant variant = RateVariant::Corrected,
                                RateScheme scheme = RateScheme::Noma) {
    const std::size_t n_users = topo.n_users();
    RateReport rep;
    rep.per_user.assign(n_users, 0.0);
    rep.r_c_to_e.assign(topo.n_bs(), std::numeric_limits<double>::quiet_NaN());
    rep.sic_ok.assign(n_users, true);

    std::vector<bool> excl(topo.n_bs());
    for (std::size_t u = 0; u < n_users; ++u) {
        const User& usr = topo.users[u];
        std::fill(excl.begin(), excl.end(), false);
        if (usr.role == Role::Center) {
            excl[usr.serving] = true;
            const double g = detail::sinr_of(lg, cfg, u, usr.serving, excl);
            if (scheme == RateScheme::Noma) {
                const double lam = pa.lambdas.at(usr.serving);
                rep.r_c_to_e[usr.serving] = rate_decode_edge_at_center(lam, g);
                rep.per_user[u] = rate_center(lam, g);
            } else {
                rep.per_user[u] = 0.5 * std::log2(1.0 + g);
            }
        } else {
            excl[usr.serving] = true;
            excl[usr.partner] = true;
            const double gm = detail::sinr_of(lg, cfg, u, usr.serving, excl);
            const double gj = detail::sinr_of(lg, cfg, u, usr.partner, excl);
            if (scheme == RateScheme::Noma) {
                rep.per_user[u] = rate_edge(pa.lambdas.at(usr.serving), gm,
                                            pa.lambdas.at(usr.partner), gj, variant);
            } else {
                rep.per_user[u] = 0.5 * std::log2(1.0 + gm + gj);
            }
        }
    }
    if (scheme == RateScheme::Noma) {
        for (std::size_t u = 0; u < n_users; ++u) {
            const User& usr = topo.users[u];
            if (usr.role != Role::Edge) continue;
            const double rcde = rep.r_c_to_e[usr.serving];
            if (!std::isnan(rcde)) rep.sic_ok[u] = sic_feasibility(rcde, rep.per_user[u]);
        }
    }
    rep.r_total = 0.0;
    rep.worst = n_users ? std::numeric_limits<double>::infinity() : 0.0;
    for (double r : rep.per_user) {
        rep.r_total += r;
        rep.worst = std::min(rep.worst, r);
    }
    return rep;
}

/// Network power draw: BS static + transmit, surface amplification (scaling
/// with (p_k a_k)^2 times the incident power) + per-element circuits, and the
/// UAV hover term.
inline double total_power(const PowerModel& pm, const std::array<ris::RisState, 2>& states,
                          const std::array<std::vector<double>, 2>& incoming_watts,
                          std::size_t n_bs, double p_t) {
    pm.validate();
    double p = static_cast<double>(n_bs) * (pm.p_bs_static + p_t) + pm.p_uav_hover;
    for (int i = 0; i < 2; ++i) {
        check_arg(incoming_watts[i].size() == states[i].size(),
                  "incoming power vector must match element count");
        for (std::size_t k = 0; k < states[i].size(); ++k) {
            const double pa = states[i].amplification[k] * states[i].amplitudes[k];
            p += pm.eta_ris * pa * pa * incoming_watts[i][k] + pm.p_circuit_per_elem;
        }
    }
    return p;
}

/// Delivered bits per joule: r_total [bits/s/Hz] * bandwidth / p_total.
inline double energy_efficiency(double r_total, double bandwidth_hz, double p_total) {
    if (!(p_total > 0.0)) throw std::domain_error("p_total must be > 0");
    return r_total * bandwidth_hz / p_total;
}

/// Fraction of realizations whose worst user rate falls below r_min.
inline double outage_probability(const std::vector<RateReport>& reports, double r_min) {
    if (reports.empty()) throw std::domain_error("outage needs at least one realization");
    std::size_t n_out = 0;
    for (const auto& r : reports)
        if (r.worst < r_min) ++n_out;
    return static_cast<double>(n_out) / static_cast<double>(reports.size());
}

/// Jain's index (sum r)^2 / (n sum r^2), in (0, 1].
inline double jain_fairness(const std::vector<double>& rates) {
    if (rates.empty()) throw std::domain_error("fairness needs at least one rate");
    double s = 0.0, s2 = 0.0;
    for (double r : rates) {
        check_nonnegative(r, "rate");
        s += r;
        s2 += r * r;
    }
    if (s2 == 0.0) throw std::domain_error("fairness undefined for all-zero rates");
    return s * s / (static_cast<double>(rates.size()) * s2);
}

}  // namespace arisim::net
