#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "arisim/common.hpp"
#include "arisim/network.hpp"
#include "arisim/ris.hpp"

namespace arisim::oracle {

/// Quantization grids. Phases include -pi and exclude +pi; lambdas sit at
/// open-interval cell midpoints; amplification includes both 1 and s_max.
inline std::vector<double> theta_grid(int q) {
    check_arg(q >= 1, "q_theta must be >= 1");
    std::vector<double> g(q);
    for (int i = 0; i < q; ++i) g[i] = -kPi + (double)i * 2.0 * kPi / (double)q;
    return g;
}

inline std::vector<double> lambda_grid(int q) {
    check_arg(q >= 1, "q_lambda must be >= 1");
    std::vector<double> g(q);
    for (int i = 0; i < q; ++i) g[i] = 0.5 + 0.5 * ((double)i + 0.5) / (double)q;
    return g;
}

inline std::vector<double> p_grid(int q, double s_max) {
    check_arg(q >= 1, "q_p must be >= 1");
    if (q == 1) return {1.0};
    std::vector<double> g(q);
    for (int i = 0; i < q; ++i)
        g[i] = 1.0 + (s_max - 1.0) * (double)i / (double)(q - 1);
    return g;
}

struct Quantization {
    int q_theta = 8;
    int q_lambda = 5;
    int q_p = 4;
};

struct Problem {
    net::Topology topo;                 ///< fixed scene (UAV already placed)
    net::RadioConfig radio;
    net::RateVariant variant = net::RateVariant::Corrected;
    net::RateScheme scheme = net::RateScheme::Noma;
    std::array<std::size_t, 2> k_elems{0, 2};
    bool active = true;                 ///< false: passive only, no p digits
    double s_max = 10.0;
    double element_amplitude = 1.0;
    double sigma_v2 = 0.0;              ///< dynamic-noise power when amplifying
};

struct Result {
    double best_rate = -1.0;
    std::array<ris::RisState, 2> states;
    std::vector<double> lambdas;
    std::size_t uav_index = 0;          ///< index into the provided slot list
    net::RateReport report;             ///< rates at the argmax
    std::uint64_t evaluated = 0;
};

/// Number of configurations the exhaustive search would visit.
inline double search_space_size(const Problem& pr, const Quantization& q,
                                std::size_t n_positions) {
    const double k_total = (double)(pr.k_elems[0] + pr.k_elems[1]);
    double size = (double)n_positions;
    size *= std::pow((double)q.q_theta, k_total);
    size *= std::pow((double)q.q_lambda, (double)pr.topo.n_bs());
    if (pr.active) size *= std::pow((double)q.q_p, k_total);
    return size;
}

inline constexpr double kMaxSearchSpace = 1e7;

/// Exhaustive maximization of the sum rate over the quantized product space
/// of phases, power-allocation factors, per-element amplification, and the
/// provided UAV positions (one channel realization per position). Ties keep
/// the lexicographically smallest configuration, i.e. the first one visited
/// in odometer order [position | phases | lambdas | amplification].
///
/// A surface whose amplification digits all sit at 1 is evaluated as passive
/// (amplifier bypass, no injected noise), so the passive search space is an
/// exact subset of the active one.
inline Result search(const Problem& pr, const std::vector<net::SlotRealization>& slots,
                     const Quantization& q) {
    check_arg(!slots.empty(), "oracle needs at least one channel realization");
    const double size = search_space_size(pr, q, slots.size());
    if (size > kMaxSearchSpace) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3g", size);
        throw std::runtime_error("oracle search space too large: about " +
                                 std::string(buf) + " configurations exceed the " +
                                 "1e7 guard; lower the quantization levels or K");
    }

    const std::vector<double> tg = theta_grid(q.q_theta);
    const std::vector<double> lg = lambda_grid(q.q_lambda);
    const std::vector<double> pg = pr.active ? p_grid(q.q_p, pr.s_max)
                                             : std::vector<double>{1.0};
    const std::size_t k_total = pr.k_elems[0] + pr.k_elems[1];
    const std::size_t n_bs = pr.topo.n_bs();
    const std::size_t n_pdig = pr.active ? k_total : 0;
    const std::size_t n_digits = k_total + n_bs + n_pdig;

    std::vector<std::size_t> digit_base(n_digits);
    for (std::size_t i = 0; i < k_total; ++i) digit_base[i] = tg.size();
    for (std::size_t i = 0; i < n_bs; ++i) digit_base[k_total + i] = lg.size();
    for (std::size_t i = 0; i < n_pdig; ++i) digit_base[k_total + n_bs + i] = pg.size();

    Result best;
    std::array<ris::RisState, 2> st;
    net::NomaPowerAlloc pa;
    pa.lambdas.resize(n_bs);

    for (std::size_t pos = 0; pos < slots.size(); ++pos) {
        const net::SlotRealization& slot = slots[pos];
        std::vector<std::size_t> idx(n_digits, 0);
        bool more = true;
        while (more) {
            for (int s = 0; s < 2; ++s) {
                const std::size_t k = pr.k_elems[s];
                const std::size_t off = s == 0 ? 0 : pr.k_elems[0];
                st[s].phases.resize(k);
                st[s].amplitudes.assign(k, pr.element_amplitude);
                st[s].amplification.resize(k);
                st[s].s_max = pr.s_max;
                bool amplifying = false;
                for (std::size_t e = 0; e < k; ++e) {
                    st[s].phases[e] = tg[idx[off + e]];
                    const double p =
                        pr.active ? pg[idx[k_total + n_bs + off + e]] : 1.0;
                    st[s].amplification[e] = p;
                    if (p > 1.0) amplifying = true;
                }
                st[s].mode = amplifying ? ris::Mode::Active : ris::Mode::Passive;
            }
            for (std::size_t b = 0; b < n_bs; ++b) pa.lambdas[b] = lg[idx[k_total + b]];

            const net::LinkGains gains =
                net::compose_gains(slot, st, {pr.sigma_v2, pr.sigma_v2});
            const net::RateReport rep =
                net::compute_rates(pr.topo, gains, pa, pr.radio, pr.variant, pr.scheme);
            best.evaluated += 1;
            if (rep.r_total > best.best_rate) {
                best.best_rate = rep.r_total;
                best.states = st;
                best.lambdas = pa.lambdas;
                best.uav_index = pos;
                best.report = rep;
            }

            // Odometer increment, rightmost digit fastest.
            more = false;
            for (std::size_t d = n_digits; d-- > 0;) {
                if (++idx[d] < digit_base[d]) {
                    more = true;
                    break;
                }
                idx[d] = 0;
            }
            if (n_digits == 0) more = false;
        }
    }
    return best;
}

}  // namespace arisim::oracle
