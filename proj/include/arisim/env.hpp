#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "arisim/common.hpp"
#include "arisim/network.hpp"
#include "arisim/ris.hpp"

namespace arisim::env {

// ---------------------------------------------------------------------------
// Hybrid action space
// ---------------------------------------------------------------------------

enum class Move : int { Left = 0, Right = 1, Down = 2, Up = 3, Hover = 4 };
inline constexpr int kNumMoves = 5;

/// Planar displacement direction for a move, in units of one step.
inline std::array<double, 2> move_delta(Move m) {
    switch (m) {
        case Move::Left: return {-1.0, 0.0};
        case Move::Right: return {1.0, 0.0};
        case Move::Down: return {0.0, -1.0};
        case Move::Up: return {0.0, 1.0};
        default: return {0.0, 0.0};
    }
}

/// Dimension bookkeeping for the continuous action block. Layout is
/// [phases surface 0][phases surface 1][lambda per BS][amp surface 0][amp
/// surface 1]; the same layout is used in every mode so checkpoints stay
/// interchangeable (passive runs force amplification back to 1).
struct ActionLayout {
    std::size_t k0 = 0, k1 = 0, n_bs = 0;
    double s_max = 10.0;

    std::size_t n_phase() const { return k0 + k1; }
    std::size_t n_amp() const { return k0 + k1; }
    std::size_t dim() const { return n_phase() + n_bs + n_amp(); }

    std::size_t phase_begin() const { return 0; }
    std::size_t lambda_begin() const { return n_phase(); }
    std::size_t amp_begin() const { return n_phase() + n_bs; }
};

struct HybridAction {
    Move move = Move::Hover;
    std::vector<double> phases;         ///< in [-pi, pi)
    std::vector<double> lambdas;        ///< in (0.5, 1)
    std::vector<double> amplification;  ///< in [1, s_max]
};

/// Odd sigmoidal map of one raw policy output into its constraint box.
inline double squash_phase(double r) { return kPi * std::tanh(r); }
inline double squash_lambda(double r) { return 0.5 + 0.5 / (1.0 + std::exp(-r)); }
inline double squash_amp(double r, double s_max) {
    return 1.0 + (s_max - 1.0) / (1.0 + std::exp(-r));
}

/// log |d squash / d raw| for the dimension at index i of the layout; used by
/// the policy's change-of-variables density correction.
inline double log_squash_jacobian(const ActionLayout& lay, std::size_t i, double r) {
    if (i < lay.lambda_begin()) {
        const double t = std::tanh(r);
        return std::log(kPi) + std::log1p(-t * t);
    }
    const double s = 1.0 / (1.0 + std::exp(-r));
    const double scale = (i < lay.amp_begin()) ? 0.5 : (lay.s_max - 1.0);
    return std::log(scale) + std::log(s) + std::log1p(-s);
}

/// Map an unbounded raw vector (policy output) into the constrained
/// continuous action parts. Strictly monotone per dimension; raw 0 lands on
/// the interval midpoints.
inline HybridAction squash_action(const ActionLayout& lay, Move move,
                                  const std::vector<double>& raw) {
    check_arg(raw.size() == lay.dim(), "raw action dimension mismatch");
    HybridAction a;
    a.move = move;
    a.phases.resize(lay.n_phase());
    a.lambdas.resize(lay.n_bs);
    a.amplification.resize(lay.n_amp());
    for (std::size_t i = 0; i < lay.n_phase(); ++i) a.phases[i] = squash_phase(raw[i]);
    for (std::size_t i = 0; i < lay.n_bs; ++i)
        a.lambdas[i] = squash_lambda(raw[lay.lambda_begin() + i]);
    for (std::size_t i = 0; i < lay.n_amp(); ++i)
        a.amplification[i] = squash_amp(raw[lay.amp_begin() + i], lay.s_max);
    return a;
}

// ---------------------------------------------------------------------------
// Reward
// ---------------------------------------------------------------------------

struct RewardParams {
    double xi_dist = 1.0;
    double xi_oob = 10.0;
    double c_const = 10.0;
    double proximity_threshold = 20.0;  ///< meters

    void validate() const {
        check_positive(xi_dist, "xi_dist");
        check_positive(xi_oob, "xi_oob");
        check_positive(c_const, "c_const");
        check_positive(proximity_threshold, "proximity_threshold");
    }
};

/// Step reward: sum rate, plus a proximity incentive C/d when the mean
/// UAV-to-user horizontal distance d is under the threshold, minus a flat
/// penalty when the attempted move left the allowed region.
inline double reward(double r_sum, double d_uav_users, bool oob, const RewardParams& rp) {
    double d = d_uav_users;
    if (d <= 0.0) d = 0.1;
    double r = r_sum;
    if (d < rp.proximity_threshold) r += rp.xi_dist * rp.c_const / d;
    if (oob) r -= rp.xi_oob;
    return r;
}

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

struct EnvState {
    std::array<double, 2> uav_xy{0.0, 0.0};
    std::vector<double> lambdas;
    std::vector<double> amplification_flat;  ///< surface 0 then surface 1
    std::array<double, 2> last_rates{0.0, 0.0};  ///< (center aggregate, edge aggregate)
    int slot_index = 0;

    std::size_t dim() const { return 2 + lambdas.size() + amplification_flat.size() + 2; }
};

struct StepFlags {
    bool oob = false;
    bool no_fly_violation = false;
    bool qos_violation = false;
};

struct StepOutcome {
    EnvState next_state;
    double reward = 0.0;
    net::RateReport rates;
    StepFlags flags;
    bool done = false;
};

struct EnvConfig {
    net::Topology topology;
    net::ChannelParams channels;
    net::RadioConfig radio;
    std::array<std::size_t, 2> k_elems{16, 16};
    ris::Mode ris_mode = ris::Mode::Active;
    double s_max = 10.0;
    double element_amplitude = 1.0;
    double sigma_v2 = -1.0;  ///< dynamic-noise power; negative = use radio.sigma2
    net::RateVariant variant = net::RateVariant::Corrected;
    net::RateScheme scheme = net::RateScheme::Noma;
    RewardParams reward_params;
    double fairness_weight = 0.0;  ///< Jain bonus added to the reward
    double qos_penalty = 0.0;      ///< optional penalty when a user misses r_min
    double r_min = 1.0;            ///< bits/s/Hz QoS floor, used for flags/outage
    int t_s = 100;                 ///< slots per episode
    double step_size = 2.0;        ///< meters per move
    double lambda_init = 0.75;
    bool per_step_lambda_amp = true;  ///< false: freeze both at episode-initial values
    double rate_obs_scale = 0.1;      ///< scale on the rate entries of the observation

    double resolved_sigma_v2() const { return sigma_v2 < 0.0 ? radio.sigma2 : sigma_v2; }

    ActionLayout layout() const {
        return ActionLayout{k_elems[0], k_elems[1], topology.n_bs(), s_max};
    }

    void validate() const {
        topology.validate();
        radio.validate();
        reward_params.validate();
        check_positive(s_max, "s_max");
        check_arg(element_amplitude > 0.0 && element_amplitude <= 1.0,
                  "element amplitude out of (0, 1]");
        check_arg(t_s >= 1, "t_s must be >= 1");
        check_positive(step_size, "step_size");
        check_arg(lambda_init > 0.5 && lambda_init < 1.0, "lambda_init out of (0.5, 1)");
        check_nonnegative(fairness_weight, "fairness_weight");
        check_nonnegative(qos_penalty, "qos_penalty");
        check_arg(topology.flight_area.contains(topology.uav.x, topology.uav.y),
                  "UAV start must lie inside the flight area");
    }
};

/// The decision process: one instance owns its scene copy, its surface
/// states, and a private rng stream. Single-threaded; run one instance per
/// worker.
class Env {
  public:
    using ChannelHook =
        std::function<net::SlotRealization(const net::Topology&, const net::ChannelParams&,
                                           const std::array<std::size_t, 2>&, Rng&)>;

    Env(EnvConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
        cfg_.validate();
        topo_ = cfg_.topology;
        reset();
    }

    /// Replace the channel sampler (tests inject hand-set realizations).
    void set_channel_hook(ChannelHook hook) { hook_ = std::move(hook); }

    const EnvConfig& config() const { return cfg_; }
    const EnvState& state() const { return state_; }
    const net::Topology& topology() const { return topo_; }
    const std::array<ris::RisState, 2>& ris_states() const { return ris_; }
    const net::SlotRealization& slot() const { return slot_; }
    const net::LinkGains& gains() const { return gains_; }
    const net::RateReport& last_report() const { return last_report_; }

    std::size_t obs_dim() const { return state_.dim(); }
    ActionLayout layout() const { return cfg_.layout(); }

    /// Start a new episode: UAV at the configured start, lambdas at the
    /// midpoint, surfaces at identity (unit amplification, zero phase), fresh
    /// channels, rates computed.
    const EnvState& reset() {
        topo_.uav = cfg_.topology.uav;
        for (int i = 0; i < 2; ++i) {
            ris_[i] = ris::RisState::identity(cfg_.k_elems[i], cfg_.ris_mode, cfg_.s_max);
            std::fill(ris_[i].amplitudes.begin(), ris_[i].amplitudes.end(),
                      cfg_.element_amplitude);
        }
        pa_.lambdas.assign(topo_.n_bs(), cfg_.lambda_init);
        state_.lambdas = pa_.lambdas;
        state_.uav_xy = {topo_.uav.x, topo_.uav.y};
        state_.slot_index = 0;
        refresh_channels();
        write_state_rates();
        return state_;
    }

    StepOutcome step(const HybridAction& a) {
        StepOutcome out;
        // 1. UAV move: reject-and-penalize keeps every emitted position legal.
        const auto delta = move_delta(a.move);
        const double nx = topo_.uav.x + cfg_.step_size * delta[0];
        const double ny = topo_.uav.y + cfg_.step_size * delta[1];
        if (!topo_.flight_area.contains(nx, ny)) {
            out.flags.oob = true;
        } else if (in_no_fly(nx, ny)) {
            out.flags.no_fly_violation = true;
        } else {
            topo_.uav.x = nx;
            topo_.uav.y = ny;
        }
        // 2. Apply the continuous action to surfaces and power allocation.
        apply_continuous(a);
        // 3. New slot: fresh fading at the (possibly moved) UAV position.
        refresh_channels();
        out.rates = last_report_;
        // 4. Reward assembly.
        const bool penalized = out.flags.oob || out.flags.no_fly_violation;
        double rew = reward(last_report_.r_total, mean_user_distance(), penalized,
                            cfg_.reward_params);
        if (cfg_.fairness_weight > 0.0 && !last_report_.per_user.empty())
            rew += cfg_.fairness_weight * net::jain_fairness(last_report_.per_user);
        out.flags.qos_violation = last_report_.worst < cfg_.r_min;
        if (out.flags.qos_violation) rew -= cfg_.qos_penalty;
        out.reward = rew;
        // 5. Bookkeeping.
        state_.uav_xy = {topo_.uav.x, topo_.uav.y};
        state_.slot_index += 1;
        write_state_rates();
        out.next_state = state_;
        out.done = state_.slot_index >= cfg_.t_s;
        return out;
    }

    /// Policy-facing view of the state: position scaled by the flight-area
    /// half-extents, amplification scaled to [0, 1], rates scaled by the
    /// configured factor. Same dimension as EnvState.
    std::vector<double> observation() const {
        std::vector<double> o;
        o.reserve(state_.dim());
        const auto& fa = topo_.flight_area;
        const double hx = 0.5 * (fa.xmax - fa.xmin), hy = 0.5 * (fa.ymax - fa.ymin);
        const double cx = 0.5 * (fa.xmax + fa.xmin), cy = 0.5 * (fa.ymax + fa.ymin);
        o.push_back((state_.uav_xy[0] - cx) / hx);
        o.push_back((state_.uav_xy[1] - cy) / hy);
        for (double l : state_.lambdas) o.push_back(l);
        for (double p : state_.amplification_flat)
            o.push_back(cfg_.s_max > 1.0 ? (p - 1.0) / (cfg_.s_max - 1.0) : 0.0);
        o.push_back(cfg_.rate_obs_scale * state_.last_rates[0]);
        o.push_back(cfg_.rate_obs_scale * state_.last_rates[1]);
        return o;
    }

    /// Mean horizontal UAV-to-user distance (the d of the proximity term).
    double mean_user_distance() const {
        if (topo_.users.empty()) return 0.0;
        double s = 0.0;
        for (const auto& u : topo_.users) s += dist_horizontal(topo_.uav, u.pos);
        return s / static_cast<double>(topo_.users.size());
    }

  private:
    bool in_no_fly(double x, double y) const {
        for (const auto& o : topo_.obstacles) {
            const double dx = x - o.pos.x, dy = y - o.pos.y;
            if (std::sqrt(dx * dx + dy * dy) < o.radius) return true;
        }
        return false;
    }

    void apply_continuous(const HybridAction& a) {
        const ActionLayout lay = cfg_.layout();
        check_arg(a.phases.size() == lay.n_phase() && a.lambdas.size() == lay.n_bs &&
                      a.amplification.size() == lay.n_amp(),
                  "action dimensions mismatch");
        std::size_t off = 0;
        for (int i = 0; i < 2; ++i) {
            for (std::size_t k = 0; k < cfg_.k_elems[i]; ++k) {
                ris_[i].phases[k] = wrap_angle(a.phases[off + k]);
                if (cfg_.per_step_lambda_amp && cfg_.ris_mode == ris::Mode::Active)
                    ris_[i].amplification[k] = a.amplification[off + k];
            }
            off += cfg_.k_elems[i];
        }
        if (cfg_.per_step_lambda_amp) pa_.lambdas = a.lambdas;
    }

    void refresh_channels() {
        slot_ = hook_ ? hook_(topo_, cfg_.channels, cfg_.k_elems, rng_)
                      : net::sample_slot(topo_, cfg_.channels, cfg_.k_elems, rng_);
        const double sv = cfg_.resolved_sigma_v2();
        gains_ = net::compose_gains(slot_, ris_, {sv, sv});
        last_report_ = net::compute_rates(topo_, gains_, pa_, cfg_.radio, cfg_.variant,
                                          cfg_.scheme);
    }

    void write_state_rates() {
        state_.lambdas = pa_.lambdas;
        state_.amplification_flat.clear();
        state_.amplification_flat.reserve(cfg_.k_elems[0] + cfg_.k_elems[1]);
        for (int i = 0; i < 2; ++i)
            state_.amplification_flat.insert(state_.amplification_flat.end(),
                                             ris_[i].amplification.begin(),
                                             ris_[i].amplification.end());
        double rc = 0.0, re = 0.0;
        for (std::size_t u = 0; u < topo_.n_users(); ++u) {
            if (topo_.users[u].role == net::Role::Center)
                rc += last_report_.per_user[u];
            else
                re += last_report_.per_user[u];
        }
        state_.last_rates = {rc, re};
    }

    EnvConfig cfg_;
    Rng rng_;
    net::Topology topo_;
    std::array<ris::RisState, 2> ris_;
    net::NomaPowerAlloc pa_;
    EnvState state_;
    net::SlotRealization slot_;
    net::LinkGains gains_;
    net::RateReport last_report_;
    ChannelHook hook_;
};

}  // namespace arisim::env
