#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "arisim/common.hpp"
#include "arisim/env.hpp"
#include "arisim/network.hpp"
#include "arisim/ris.hpp"

namespace arisim::baselines {

/// Orthogonal-access baseline: each BS serves its users in equal time shares
/// at full power, edge users still combine their two CoMP links.
inline net::RateReport rate_oma(const net::Topology& topo, const net::LinkGains& gains,
                                const net::RadioConfig& cfg) {
    net::NomaPowerAlloc pa;
    pa.lambdas.assign(topo.n_bs(), 0.75);  // unused by the orthogonal scheme
    return net::compute_rates(topo, gains, pa, cfg, net::RateVariant::Corrected,
                              net::RateScheme::Oma);
}

/// Untrained default: zero phases, unit amplification.
inline std::array<ris::RisState, 2> fixed_states(const env::EnvConfig& ec) {
    std::array<ris::RisState, 2> st;
    for (int i = 0; i < 2; ++i) {
        st[i] = ris::RisState::identity(ec.k_elems[i], ec.ris_mode, ec.s_max);
        std::fill(st[i].amplitudes.begin(), st[i].amplitudes.end(), ec.element_amplitude);
    }
    return st;
}

/// Uniform draws inside every constraint box.
inline std::array<ris::RisState, 2> random_states(const env::EnvConfig& ec, Rng& rng) {
    std::array<ris::RisState, 2> st = fixed_states(ec);
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < ec.k_elems[i]; ++k) {
            st[i].phases[k] = rng.uniform(-kPi, kPi);
            if (ec.ris_mode == ris::Mode::Active)
                st[i].amplification[k] = 1.0 + (ec.s_max - 1.0) * rng.uniform();
        }
    }
    return st;
}

inline std::vector<double> random_lambdas(std::size_t n_bs, Rng& rng) {
    std::vector<double> l(n_bs);
    for (double& v : l) {
        double u = rng.uniform();
        while (u == 0.0) u = rng.uniform();
        v = 0.5 + 0.5 * u;
    }
    return l;
}

/// Phase-align both surfaces toward one target link: the first edge user's
/// primary BS if an edge user exists, else user 0's serving BS. Active mode
/// drives amplification to its maximum.
inline std::array<ris::RisState, 2> aligned_states(const env::EnvConfig& ec,
                                                   const net::Topology& topo,
                                                   const net::SlotRealization& slot) {
    std::array<ris::RisState, 2> st = fixed_states(ec);
    int target_user = 0;
    for (std::size_t u = 0; u < topo.n_users(); ++u)
        if (topo.users[u].role == net::Role::Edge) {
            target_user = (int)u;
            break;
        }
    const int target_bs = topo.users[target_user].serving;
    for (int i = 0; i < 2; ++i) {
        if (ec.k_elems[i] == 0) continue;
        ris::CascadeInput c{slot.bs_ris[i][target_bs], slot.ris_user[i][target_user]};
        st[i].phases = ris::phase_align(c, slot.d(target_bs, target_user));
        if (ec.ris_mode == ris::Mode::Active)
            std::fill(st[i].amplification.begin(), st[i].amplification.end(), ec.s_max);
    }
    return st;
}

/// Uniformly random hybrid action (exploration-free baseline policy).
inline env::HybridAction random_action(const env::ActionLayout& lay, Rng& rng) {
    env::HybridAction a;
    a.move = static_cast<env::Move>(rng.below(env::kNumMoves));
    a.phases.resize(lay.n_phase());
    a.lambdas.resize(lay.n_bs);
    a.amplification.resize(lay.n_amp());
    for (double& p : a.phases) p = rng.uniform(-kPi, kPi);
    for (double& l : a.lambdas) {
        double u = rng.uniform();
        while (u == 0.0) u = rng.uniform();
        l = 0.5 + 0.5 * u;
    }
    for (double& p : a.amplification) p = 1.0 + (lay.s_max - 1.0) * rng.uniform();
    return a;
}

}  // namespace arisim::baselines
