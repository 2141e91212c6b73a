#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "arisim/baselines.hpp"
#include "arisim/checkpoint.hpp"
#include "arisim/config.hpp"
#include "arisim/env.hpp"
#include "arisim/hppo.hpp"
#include "arisim/network.hpp"
#include "arisim/oracle.hpp"

namespace arisim::sweep {

struct MetricRow {
    std::string sweep_variable;
    double sweep_value = 0.0;
    std::string mode;
    std::string policy;
    std::string fairness;
    double mean_sum_rate = 0.0;
    double ci_half_width = std::numeric_limits<double>::quiet_NaN();
    bool ci_defined = false;
    double outage = 0.0;
    double mean_ee = 0.0;
    double mean_jain = 0.0;
    int n = 0;
};

struct TraceRow {
    int episode = 0;
    int slot = 0;
    double uav_x = 0.0, uav_y = 0.0;
    int move = 0;
    double reward = 0.0;
    double r_total = 0.0;
    double worst = 0.0;
    bool oob = false, no_fly = false, qos = false;
};

struct EvalResult {
    std::vector<net::RateReport> reports;  ///< one per step
    std::vector<double> powers;            ///< watts per step
    std::vector<double> jains;             ///< per step
    std::vector<double> episode_rewards;
    std::vector<TraceRow> traces;
};

inline double safe_jain(const net::RateReport& rep) {
    return rep.r_total > 0.0 ? net::jain_fairness(rep.per_user) : 1.0;
}

/// Network power draw of the environment's current slot and surface states.
inline double step_power(const env::Env& e, const net::PowerModel& pm) {
    const net::LinkGains& g = e.gains();
    std::array<std::vector<double>, 2> watts;
    for (int i = 0; i < 2; ++i) {
        watts[i] = g.elem_in_gain[i];
        for (double& w : watts[i]) w *= e.config().radio.p_t;
    }
    return net::total_power(pm, e.ris_states(), watts, e.topology().n_bs(),
                            e.config().radio.p_t);
}

/// Roll greedy or scripted episodes through an environment. `act` maps the
/// current observation to a HybridAction. Episodes always start from reset.
template <class ActFn>
EvalResult run_episodes(env::Env& e, int episodes, const net::PowerModel& pm, ActFn&& act,
                        bool collect_traces = false) {
    EvalResult out;
    for (int ep = 0; ep < episodes; ++ep) {
        e.reset();
        double ep_reward = 0.0;
        bool done = false;
        int slot = 0;
        while (!done) {
            const env::HybridAction a = act(e.observation());
            const env::StepOutcome so = e.step(a);
            out.reports.push_back(so.rates);
            out.powers.push_back(step_power(e, pm));
            out.jains.push_back(safe_jain(so.rates));
            ep_reward += so.reward;
            if (collect_traces) {
                TraceRow tr;
                tr.episode = ep;
                tr.slot = slot;
                tr.uav_x = so.next_state.uav_xy[0];
                tr.uav_y = so.next_state.uav_xy[1];
                tr.move = (int)a.move;
                tr.reward = so.reward;
                tr.r_total = so.rates.r_total;
                tr.worst = so.rates.worst;
                tr.oob = so.flags.oob;
                tr.no_fly = so.flags.no_fly_violation;
                tr.qos = so.flags.qos_violation;
                out.traces.push_back(tr);
            }
            done = so.done;
            ++slot;
        }
        out.episode_rewards.push_back(ep_reward);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Static (non-learning) per-realization evaluation
// ---------------------------------------------------------------------------

enum class StaticPolicy { Fixed, Random, Aligned, Oracle };

struct RealizationMetrics {
    net::RateReport report;
    double power = 0.0;
    double ee = 0.0;
    double jain = 1.0;
};

/// One independent channel realization under a non-learning policy, with the
/// UAV parked at its start position.
inline RealizationMetrics evaluate_static(const env::EnvConfig& ec,
                                          const net::PowerModel& pm,
                                          const oracle::Quantization& quant,
                                          StaticPolicy policy, std::uint64_t seed) {
    Rng rng(seed);
    const net::SlotRealization slot =
        net::sample_slot(ec.topology, ec.channels, ec.k_elems, rng);
    const double sv = ec.resolved_sigma_v2();

    std::array<ris::RisState, 2> states;
    net::NomaPowerAlloc pa;
    pa.lambdas.assign(ec.topology.n_bs(), ec.lambda_init);
    RealizationMetrics out;

    if (policy == StaticPolicy::Oracle) {
        oracle::Problem pr;
        pr.topo = ec.topology;
        pr.radio = ec.radio;
        pr.variant = ec.variant;
        pr.scheme = ec.scheme;
        pr.k_elems = ec.k_elems;
        pr.active = ec.ris_mode == ris::Mode::Active;
        pr.s_max = ec.s_max;
        pr.element_amplitude = ec.element_amplitude;
        pr.sigma_v2 = sv;
        const oracle::Result res = oracle::search(pr, {slot}, quant);
        states = res.states;
        pa.lambdas = res.lambdas;
        out.report = res.report;
    } else {
        if (policy == StaticPolicy::Random) {
            states = baselines::random_states(ec, rng);
            pa.lambdas = baselines::random_lambdas(ec.topology.n_bs(), rng);
        } else if (policy == StaticPolicy::Aligned) {
            states = baselines::aligned_states(ec, ec.topology, slot);
        } else {
            states = baselines::fixed_states(ec);
        }
        const net::LinkGains gains = net::compose_gains(slot, states, {sv, sv});
        out.report = net::compute_rates(ec.topology, gains, pa, ec.radio, ec.variant,
                                        ec.scheme);
    }

    const net::LinkGains gains = net::compose_gains(slot, states, {sv, sv});
    std::array<std::vector<double>, 2> watts;
    for (int i = 0; i < 2; ++i) {
        watts[i] = gains.elem_in_gain[i];
        for (double& w : watts[i]) w *= ec.radio.p_t;
    }
    out.power = net::total_power(pm, states, watts, ec.topology.n_bs(), ec.radio.p_t);
    out.ee = net::energy_efficiency(out.report.r_total, ec.radio.bandwidth, out.power);
    out.jain = safe_jain(out.report);
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

inline MetricRow aggregate(const std::vector<RealizationMetrics>& ms, double r_min) {
    check_arg(!ms.empty(), "aggregate needs at least one realization");
    MetricRow row;
    row.n = (int)ms.size();
    std::vector<net::RateReport> reports;
    reports.reserve(ms.size());
    double sum = 0.0;
    for (const auto& m : ms) {
        sum += m.report.r_total;
        row.mean_ee += m.ee;
        row.mean_jain += m.jain;
        reports.push_back(m.report);
    }
    row.mean_sum_rate = sum / (double)ms.size();
    row.mean_ee /= (double)ms.size();
    row.mean_jain /= (double)ms.size();
    row.outage = net::outage_probability(reports, r_min);
    if (ms.size() >= 2) {
        double var = 0.0;
        for (const auto& m : ms) {
            const double d = m.report.r_total - row.mean_sum_rate;
            var += d * d;
        }
        var /= (double)(ms.size() - 1);
        row.ci_half_width = 1.96 * std::sqrt(var / (double)ms.size());
        row.ci_defined = true;
    }
    return row;
}

inline MetricRow aggregate_eval(const EvalResult& ev, double r_min, double bandwidth_hz) {
    check_arg(!ev.reports.empty(), "aggregate needs at least one step");
    check_arg(ev.powers.size() == ev.reports.size() && ev.jains.size() == ev.reports.size(),
              "eval result vectors must be parallel");
    MetricRow row;
    row.n = (int)ev.episode_rewards.size();
    double sum = 0.0, ee = 0.0, jain = 0.0;
    for (std::size_t i = 0; i < ev.reports.size(); ++i) {
        sum += ev.reports[i].r_total;
        ee += net::energy_efficiency(ev.reports[i].r_total, bandwidth_hz, ev.powers[i]);
        jain += ev.jains[i];
    }
    row.mean_sum_rate = sum / (double)ev.reports.size();
    row.mean_jain = jain / (double)ev.reports.size();
    row.outage = net::outage_probability(ev.reports, r_min);
    row.mean_ee = ee / (double)ev.reports.size();
    // Per-episode mean sum rates give the spread between episodes.
    const std::size_t steps_per_ep = ev.reports.size() / ev.episode_rewards.size();
    if (ev.episode_rewards.size() >= 2 && steps_per_ep > 0) {
        std::vector<double> per_ep(ev.episode_rewards.size(), 0.0);
        for (std::size_t i = 0; i < ev.reports.size(); ++i)
            per_ep[i / steps_per_ep] += ev.reports[i].r_total;
        for (double& v : per_ep) v /= (double)steps_per_ep;
        double mean = 0.0;
        for (double v : per_ep) mean += v;
        mean /= (double)per_ep.size();
        double var = 0.0;
        for (double v : per_ep) var += (v - mean) * (v - mean);
        var /= (double)(per_ep.size() - 1);
        row.ci_half_width = 1.96 * std::sqrt(var / (double)per_ep.size());
        row.ci_defined = true;
    }
    return row;
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

struct PolicyEvalResult {
    MetricRow row;
    EvalResult detail;
};

/// Greedy evaluation of a checkpoint under a config: argmax move, mean
/// continuous action, no exploration noise.
inline PolicyEvalResult evaluate_policy(const ckpt::Checkpoint& ck,
                                        const cfg::ExperimentConfig& xc, int episodes,
                                        bool collect_traces = false) {
    env::Env e(xc.env_config(), derive_seed(xc.seed(), 0x6576616cull));
    hppo::Policy pol = ckpt::to_policy(ck, e.obs_dim(), e.layout(), xc.train_config());
    hppo::Policy::Workspaces ws;
    const net::PowerModel pm = xc.power_model();
    EvalResult ev = run_episodes(
        e, episodes, pm,
        [&](const std::vector<double>& obs) {
            const hppo::SampledAction a = pol.greedy(obs, ws);
            return env::squash_action(e.layout(), static_cast<env::Move>(a.move), a.raw);
        },
        collect_traces);
    PolicyEvalResult out;
    out.row = aggregate_eval(ev, xc.env_config().r_min, xc.radio().bandwidth);
    out.row.sweep_variable = "p_t_dbm";
    out.row.sweep_value = watt_to_dbm(xc.radio().p_t);
    out.row.mode = cfg::mode_name(xc.mode());
    out.row.policy = "checkpoint";
    out.row.fairness = xc.fairness_on() ? "On" : "Off";
    out.detail = std::move(ev);
    return out;
}

/// Scripted random-action evaluation on the same protocol as evaluate_policy.
inline PolicyEvalResult evaluate_random(const cfg::ExperimentConfig& xc, int episodes,
                                        bool collect_traces = false) {
    env::Env e(xc.env_config(), derive_seed(xc.seed(), 0x6576616cull));
    Rng rng(derive_seed(xc.seed(), 0x72616e64ull));
    const net::PowerModel pm = xc.power_model();
    const env::ActionLayout lay = e.layout();
    EvalResult ev = run_episodes(
        e, episodes, pm,
        [&](const std::vector<double>&) { return baselines::random_action(lay, rng); },
        collect_traces);
    PolicyEvalResult out;
    out.row = aggregate_eval(ev, xc.env_config().r_min, xc.radio().bandwidth);
    out.row.sweep_variable = "p_t_dbm";
    out.row.sweep_value = watt_to_dbm(xc.radio().p_t);
    out.row.mode = cfg::mode_name(xc.mode());
    out.row.policy = "random";
    out.row.fairness = xc.fairness_on() ? "On" : "Off";
    out.detail = std::move(ev);
    return out;
}

/// One sweep over the configured variable with the configured policy. Each
/// realization gets an independent derived seed, so aggregation is
/// permutation-invariant and a rerun is byte-identical.
inline std::vector<MetricRow> run_sweep(const cfg::ExperimentConfig& xc) {
    const cfg::SweepSpec sp = xc.sweep_spec();
    const net::PowerModel pm = xc.power_model();
    const cfg::OracleSpec os = xc.oracle_spec();
    const oracle::Quantization quant{os.q_theta, os.q_lambda, os.q_p};
    std::vector<MetricRow> rows;

    for (const double v : sp.values) {
        const cfg::ExperimentConfig cv = xc.with_sweep_value(v);
        MetricRow row;
        if (sp.policy == "checkpoint") {
            const ckpt::Checkpoint ck = ckpt::load(sp.checkpoint);
            row = evaluate_policy(ck, cv, cv.eval_episodes()).row;
        } else {
            StaticPolicy pol = StaticPolicy::Fixed;
            if (sp.policy == "random") pol = StaticPolicy::Random;
            if (sp.policy == "aligned") pol = StaticPolicy::Aligned;
            if (sp.policy == "oracle") pol = StaticPolicy::Oracle;
            const env::EnvConfig ec = cv.env_config();
            std::vector<RealizationMetrics> ms;
            ms.reserve((std::size_t)cv.realizations());
            // Realization seeds depend only on (master seed, r): sweep points
            // and modes share channel draws, so comparisons are paired and a
            // degenerate sweep of identical points yields identical rows.
            for (int r = 0; r < cv.realizations(); ++r) {
                const std::uint64_t seed_r =
                    derive_seed(derive_seed(cv.seed(), 0x7265616cull), (std::uint64_t)r);
                ms.push_back(evaluate_static(ec, pm, quant, pol, seed_r));
            }
            row = aggregate(ms, ec.r_min);
        }
        row.sweep_variable = sp.variable;
        row.sweep_value = v;
        row.mode = cfg::mode_name(cv.mode());
        row.policy = sp.policy;
        row.fairness = cv.fairness_on() ? "On" : "Off";
        rows.push_back(row);
    }
    return rows;
}

}  // namespace arisim::sweep
