#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arisim/common.hpp"
#include "arisim/env.hpp"
#include "arisim/mlp.hpp"

namespace arisim::hppo {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

struct TrainConfig {
    double discount = 0.99;
    int n_step = 8;
    double clip = 0.2;
    double lr_discrete = 3e-4;
    double lr_continuous = 3e-4;
    double lr_critic = 3e-4;
    double lr_encoder = 3e-4;
    int epochs = 4;
    int minibatch = 256;
    int horizon = 1024;
    double entropy_coef = 0.01;
    int iterations = 200;
    std::size_t hidden = 64;
    double logstd_init = -0.5;
    double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;

    void validate() const {
        check_arg(discount > 0.0 && discount <= 1.0, "discount out of (0, 1]");
        check_positive(clip, "clip");
        check_arg(n_step >= 1 && n_step <= horizon, "n_step out of [1, horizon]");
        check_arg(epochs >= 1 && minibatch >= 1 && horizon >= 1, "update sizes must be >= 1");
        check_arg(iterations >= 0, "iterations must be >= 0");
        check_positive(lr_discrete, "lr_discrete");
        check_positive(lr_continuous, "lr_continuous");
        check_positive(lr_critic, "lr_critic");
        check_positive(lr_encoder, "lr_encoder");
        check_arg(hidden >= 1, "hidden must be >= 1");
    }
};

struct PolicyOut {
    std::vector<double> logits;  ///< kNumMoves entries
    std::vector<double> probs;   ///< softmax(logits)
    std::vector<double> means;
    std::vector<double> logstd;  ///< clamped to [kLogStdMin, kLogStdMax]
    double value = 0.0;
};

struct SampledAction {
    int move = 0;
    std::vector<double> raw;  ///< pre-squash continuous sample
    double logp_d = 0.0;
    double logp_c = 0.0;
    double value = 0.0;
};

/// Numerically safe softmax plus its log normalizer.
inline void softmax(const std::vector<double>& z, std::vector<double>& p, double& lse) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    p.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - zmax);
        s += p[i];
    }
    for (double& v : p) v /= s;
    lse = zmax + std::log(s);
}

// ---------------------------------------------------------------------------
// Policy: shared tanh encoder, categorical move head, Gaussian continuous
// head with state-independent log-std parameters, and a separate critic.
// Everything lives in one flat parameter vector so the optimizer, the
// finite-difference check, and the checkpoint writer all see plain arrays.
// ---------------------------------------------------------------------------

class Policy {
  public:
    Policy() = default;
    Policy(std::size_t obs_dim, std::size_t n_cont, const env::ActionLayout& layout,
           const TrainConfig& cfg, std::uint64_t init_seed)
        : obs_(obs_dim),
          n_cont_(n_cont),
          layout_(layout),
          encoder_({obs_dim, cfg.hidden, cfg.hidden}, true),
          d_head_({cfg.hidden, (std::size_t)env::kNumMoves}),
          c_head_({cfg.hidden, n_cont}),
          critic_({obs_dim, cfg.hidden, cfg.hidden, 1}) {
        check_arg(layout.dim() == n_cont, "layout/continuous dimension mismatch");
        enc_off_ = 0;
        d_off_ = enc_off_ + encoder_.n_params();
        c_off_ = d_off_ + d_head_.n_params();
        ls_off_ = c_off_ + c_head_.n_params();
        cr_off_ = ls_off_ + n_cont_;
        n_params_ = cr_off_ + critic_.n_params();
        params.assign(n_params_, 0.0);
        m.assign(n_params_, 0.0);
        v.assign(n_params_, 0.0);
        adam_t = 0;
        Rng rng(init_seed);
        encoder_.init(params.data() + enc_off_, rng);
        d_head_.init(params.data() + d_off_, rng, 0.01);
        c_head_.init(params.data() + c_off_, rng, 0.01);
        for (std::size_t i = 0; i < n_cont_; ++i) params[ls_off_ + i] = cfg.logstd_init;
        critic_.init(params.data() + cr_off_, rng);
    }

    std::size_t obs_dim() const { return obs_; }
    std::size_t n_cont() const { return n_cont_; }
    std::size_t n_params() const { return n_params_; }
    std::size_t hidden() const { return encoder_.out_dim(); }
    const env::ActionLayout& layout() const { return layout_; }

    struct Workspaces {
        nn::Mlp::Workspace enc, dh, ch, cr;
    };

    PolicyOut forward(const std::vector<double>& obs, Workspaces& ws) const {
        return forward(params.data(), obs, ws);
    }

    PolicyOut forward(const double* p, const std::vector<double>& obs, Workspaces& ws) const {
        check_arg(obs.size() == obs_, "state dimension mismatch");
        PolicyOut out;
        const std::vector<double>& h = encoder_.forward(p + enc_off_, obs, ws.enc);
        out.logits = d_head_.forward(p + d_off_, h, ws.dh);
        out.means = c_head_.forward(p + c_off_, h, ws.ch);
        out.logstd.resize(n_cont_);
        for (std::size_t i = 0; i < n_cont_; ++i)
            out.logstd[i] = std::clamp(p[ls_off_ + i], kLogStdMin, kLogStdMax);
        double lse = 0.0;
        softmax(out.logits, out.probs, lse);
        out.value = critic_.forward(p + cr_off_, obs, ws.cr)[0];
        return out;
    }

    /// Categorical log-probability of one move under given logits.
    static double logp_discrete(const std::vector<double>& logits, int move) {
        std::vector<double> p;
        double lse = 0.0;
        softmax(logits, p, lse);
        return logits[move] - lse;
    }

    /// Joint continuous log-density of a raw sample: pre-squash Gaussian with
    /// the change-of-variables correction for the squashing maps, so it is
    /// the density of the constrained action itself.
    double logp_continuous(const PolicyOut& out, const std::vector<double>& raw) const {
        double lp = 0.0;
        for (std::size_t i = 0; i < n_cont_; ++i) {
            const double sd = std::exp(out.logstd[i]);
            const double z = (raw[i] - out.means[i]) / sd;
            lp += -0.5 * z * z - out.logstd[i] - 0.5 * kLog2Pi;
            lp -= env::log_squash_jacobian(layout_, i, raw[i]);
        }
        return lp;
    }

    /// Draw a hybrid action: categorical move, then one Gaussian draw per
    /// continuous dimension, in that fixed order.
    SampledAction sample(const std::vector<double>& obs, Rng& rng, Workspaces& ws) const {
        const PolicyOut out = forward(obs, ws);
        SampledAction a;
        const double u = rng.uniform();
        double acc = 0.0;
        a.move = env::kNumMoves - 1;
        for (int k = 0; k < env::kNumMoves; ++k) {
            acc += out.probs[k];
            if (u < acc) {
                a.move = k;
                break;
            }
        }
        a.raw.resize(n_cont_);
        for (std::size_t i = 0; i < n_cont_; ++i)
            a.raw[i] = out.means[i] + std::exp(out.logstd[i]) * rng.normal();
        a.logp_d = out.logits[a.move] - logsumexp(out.logits);
        a.logp_c = logp_continuous(out, a.raw);
        a.value = out.value;
        return a;
    }

    /// Greedy action for evaluation: argmax move, means as the raw vector.
    SampledAction greedy(const std::vector<double>& obs, Workspaces& ws) const {
        const PolicyOut out = forward(obs, ws);
        SampledAction a;
        a.move = (int)(std::max_element(out.probs.begin(), out.probs.end()) -
                       out.probs.begin());
        a.raw = out.means;
        a.logp_d = out.logits[a.move] - logsumexp(out.logits);
        a.logp_c = logp_continuous(out, a.raw);
        a.value = out.value;
        return a;
    }

    static double logsumexp(const std::vector<double>& z) {
        const double zmax = *std::max_element(z.begin(), z.end());
        double s = 0.0;
        for (double v : z) s += std::exp(v - zmax);
        return zmax + std::log(s);
    }

    // Gradient views and optimizer groups.
    struct Span {
        std::size_t begin, end;
        double lr;
    };
    std::vector<Span> groups(const TrainConfig& cfg) const {
        return {{enc_off_, enc_off_ + encoder_.n_params(), cfg.lr_encoder},
                {d_off_, d_off_ + d_head_.n_params(), cfg.lr_discrete},
                {c_off_, cr_off_, cfg.lr_continuous},  // mean head + log-std
                {cr_off_, n_params_, cfg.lr_critic}};
    }

    std::size_t enc_off() const { return enc_off_; }
    std::size_t d_off() const { return d_off_; }
    std::size_t c_off() const { return c_off_; }
    std::size_t ls_off() const { return ls_off_; }
    std::size_t cr_off() const { return cr_off_; }
    const nn::Mlp& encoder() const { return encoder_; }
    const nn::Mlp& d_head() const { return d_head_; }
    const nn::Mlp& c_head() const { return c_head_; }
    const nn::Mlp& critic() const { return critic_; }

    std::vector<double> params, m, v;
    long long adam_t = 0;

  private:
    std::size_t obs_ = 0, n_cont_ = 0;
    env::ActionLayout layout_;
    nn::Mlp encoder_, d_head_, c_head_, critic_;
    std::size_t enc_off_ = 0, d_off_ = 0, c_off_ = 0, ls_off_ = 0, cr_off_ = 0;
    std::size_t n_params_ = 0;
};

// ---------------------------------------------------------------------------
// Rollout storage and advantage estimation
// ---------------------------------------------------------------------------

struct Transition {
    std::vector<double> obs;
    int move = 0;
    std::vector<double> raw;
    double reward = 0.0;
    double value = 0.0;
    double logp_d = 0.0;
    double logp_c = 0.0;
    bool done = false;
};

struct RolloutBuffer {
    std::vector<Transition> steps;
    double bootstrap_value = 0.0;  ///< V(s_T) for the state after the last step

    void clear() { steps.clear(); }
    std::size_t size() const { return steps.size(); }
};

/// n-step advantage: discounted rewards up to the horizon, a bootstrap value
/// at the horizon, minus the state value. Episode termination truncates the
/// sum; nothing is bootstrapped past a done flag. The buffer end bootstraps
/// with bootstrap_value.
inline std::vector<double> n_step_advantage(const std::vector<double>& rewards,
                                            const std::vector<double>& values,
                                            const std::vector<unsigned char>& dones,
                                            double bootstrap_value, double discount,
                                            int n_step) {
    const std::size_t t_total = rewards.size();
    check_arg(values.size() == t_total && dones.size() == t_total,
              "advantage input lengths mismatch");
    check_arg(t_total >= 1, "advantage needs at least one step");
    std::vector<double> adv(t_total);
    for (std::size_t t = 0; t < t_total; ++t) {
        double acc = 0.0, disc = 1.0;
        bool terminated = false;
        std::size_t idx = t;
        for (int k = 0; k < n_step && idx < t_total; ++k, ++idx) {
            acc += disc * rewards[idx];
            disc *= discount;
            if (dones[idx]) {
                terminated = true;
                ++idx;
                break;
            }
        }
        if (!terminated) acc += disc * (idx < t_total ? values[idx] : bootstrap_value);
        adv[t] = acc - values[t];
    }
    return adv;
}

/// In-place standardization to zero mean, unit variance (guarded for tiny
/// spreads). Returns {mean, stddev} of the input.
inline std::pair<double, double> standardize(std::vector<double>& x) {
    check_arg(!x.empty(), "cannot standardize an empty vector");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= (double)x.size();
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= (double)x.size();
    const double sd = std::sqrt(var);
    const double denom = sd > 1e-8 ? sd : 1e-8;
    for (double& v : x) v = (v - mean) / denom;
    return {mean, sd};
}

/// One clipped-surrogate contribution: min(r A, clip(r, 1-eps, 1+eps) A).
inline double clipped_surrogate(double ratio, double advantage, double epsilon) {
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

// ---------------------------------------------------------------------------
// Update
// ---------------------------------------------------------------------------

struct UpdateStats {
    double loss_d = 0.0;       ///< negated discrete surrogate, mean over minibatches
    double loss_c = 0.0;       ///< negated continuous surrogate
    double value_loss = 0.0;   ///< 0.5 (V - R)^2
    double entropy = 0.0;      ///< discrete + continuous entropy
    int minibatches = 0;
};

namespace detail {

inline void adam_step(Policy& pol, const std::vector<double>& grad,
                      const std::vector<Policy::Span>& groups, const TrainConfig& cfg) {
    pol.adam_t += 1;
    const double b1c = 1.0 - std::pow(cfg.adam_beta1, (double)pol.adam_t);
    const double b2c = 1.0 - std::pow(cfg.adam_beta2, (double)pol.adam_t);
    for (const auto& g : groups) {
        for (std::size_t i = g.begin; i < g.end; ++i) {
            pol.m[i] = cfg.adam_beta1 * pol.m[i] + (1.0 - cfg.adam_beta1) * grad[i];
            pol.v[i] = cfg.adam_beta2 * pol.v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
            const double mh = pol.m[i] / b1c;
            const double vh = pol.v[i] / b2c;
            pol.params[i] -= g.lr * mh / (std::sqrt(vh) + cfg.adam_eps);
        }
    }
}

struct SampleLoss {
    double surr_d = 0.0, surr_c = 0.0, vloss = 0.0, ent = 0.0;
};

/// Loss and (optionally) gradient for one transition at given advantage and
/// value target. Gradient contributions are scaled by `scale` (1/minibatch).
inline SampleLoss sample_loss_grad(const Policy& pol, const double* p, const Transition& tr,
                                   double advantage, double v_target,
                                   const TrainConfig& cfg, double scale, double* grad,
                                   Policy::Workspaces& ws) {
    SampleLoss out;
    const PolicyOut o = pol.forward(p, tr.obs, ws);
    const std::size_t n_cont = pol.n_cont();

    // Discrete head quantities.
    const double lse = Policy::logsumexp(o.logits);
    const double logp_d_new = o.logits[tr.move] - lse;
    const double ratio_d = std::exp(logp_d_new - tr.logp_d);
    out.surr_d = clipped_surrogate(ratio_d, advantage, cfg.clip);
    double ent_d = 0.0;
    for (double pk : o.probs)
        if (pk > 0.0) ent_d -= pk * std::log(pk);

    // Continuous head quantities.
    const double logp_c_new = pol.logp_continuous(o, tr.raw);
    const double ratio_c = std::exp(logp_c_new - tr.logp_c);
    out.surr_c = clipped_surrogate(ratio_c, advantage, cfg.clip);
    double ent_c = 0.0;
    for (std::size_t i = 0; i < n_cont; ++i)
        ent_c += o.logstd[i] + 0.5 * (kLog2Pi + 1.0);

    out.ent = ent_d + ent_c;
    const double verr = o.value - v_target;
    out.vloss = 0.5 * verr * verr;
    if (!grad) return out;

    // Surrogate gradients flow through the unclipped branch only when it is
    // the active minimum (ties included), matching the subgradient of min.
    const double clip_d = std::clamp(ratio_d, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const bool pass_d = ratio_d * advantage <= clip_d * advantage;
    const double d_surr_dlogp_d = pass_d ? ratio_d * advantage : 0.0;
    const double clip_c = std::clamp(ratio_c, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const bool pass_c = ratio_c * advantage <= clip_c * advantage;
    const double d_surr_dlogp_c = pass_c ? ratio_c * advantage : 0.0;

    // Loss = -(surr_d + surr_c) - ent_coef*(H_d + H_c) + 0.5 (V - R)^2.
    std::vector<double> d_logits(o.logits.size());
    for (std::size_t k = 0; k < o.logits.size(); ++k) {
        const double onehot = (int)k == tr.move ? 1.0 : 0.0;
        const double dlogp = onehot - o.probs[k];
        const double dent = o.probs[k] > 0.0 ? -o.probs[k] * (std::log(o.probs[k]) + ent_d)
                                             : 0.0;
        d_logits[k] = scale * (-d_surr_dlogp_d * dlogp - cfg.entropy_coef * dent);
    }
    std::vector<double> d_means(n_cont);
    for (std::size_t i = 0; i < n_cont; ++i) {
        const double sd = std::exp(o.logstd[i]);
        const double dlogp_dmu = (tr.raw[i] - o.means[i]) / (sd * sd);
        d_means[i] = scale * (-d_surr_dlogp_c * dlogp_dmu);
        const double z = (tr.raw[i] - o.means[i]) / sd;
        const double dlogp_dls = z * z - 1.0;
        // Entropy derivative w.r.t. log-std is 1. Clamp blocks the gradient
        // when the raw parameter sits outside the admissible band.
        const double praw = p[pol.ls_off() + i];
        if (praw >= kLogStdMin && praw <= kLogStdMax)
            grad[pol.ls_off() + i] +=
                scale * (-d_surr_dlogp_c * dlogp_dls - cfg.entropy_coef);
    }
    std::vector<double> d_value{scale * verr};

    std::vector<double> d_hidden =
        pol.d_head().backward(p + pol.d_off(), ws.dh, d_logits, grad + pol.d_off());
    const std::vector<double> d_hidden_c =
        pol.c_head().backward(p + pol.c_off(), ws.ch, d_means, grad + pol.c_off());
    for (std::size_t i = 0; i < d_hidden.size(); ++i) d_hidden[i] += d_hidden_c[i];
    pol.encoder().backward(p + pol.enc_off(), ws.enc, d_hidden, grad + pol.enc_off());
    pol.critic().backward(p + pol.cr_off(), ws.cr, d_value, grad + pol.cr_off());
    return out;
}

}  // namespace detail

/// PPO update over a filled on-policy buffer: standardized n-step advantages,
/// value targets from pre-standardization advantages, then epochs of shuffled
/// minibatch ascent on both clipped surrogates plus entropy, descent on the
/// value error. The buffer is cleared on return.
inline UpdateStats update(Policy& pol, RolloutBuffer& buf, const TrainConfig& cfg,
                          Rng& rng) {
    cfg.validate();
    const std::size_t n = buf.size();
    check_arg(n >= 1, "update needs a non-empty buffer");

    std::vector<double> rewards(n), values(n);
    std::vector<unsigned char> dones(n);
    for (std::size_t i = 0; i < n; ++i) {
        rewards[i] = buf.steps[i].reward;
        values[i] = buf.steps[i].value;
        dones[i] = buf.steps[i].done ? 1 : 0;
    }
    std::vector<double> adv = n_step_advantage(rewards, values, dones, buf.bootstrap_value,
                                               cfg.discount, cfg.n_step);
    std::vector<double> v_target(n);
    for (std::size_t i = 0; i < n; ++i) v_target[i] = adv[i] + values[i];
    standardize(adv);

    UpdateStats stats;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> grad(pol.n_params());
    const auto groups = pol.groups(cfg);
    Policy::Workspaces ws;

    for (int e = 0; e < cfg.epochs; ++e) {
        // Fisher-Yates with the session rng keeps the pass order reproducible.
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = rng.below(i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < n; start += (std::size_t)cfg.minibatch) {
            const std::size_t stop = std::min(n, start + (std::size_t)cfg.minibatch);
            const double scale = 1.0 / (double)(stop - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            double sd = 0.0, sc = 0.0, sv = 0.0, se = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const Transition& tr = buf.steps[order[i]];
                const auto l = detail::sample_loss_grad(pol, pol.params.data(), tr,
                                                        adv[order[i]], v_target[order[i]],
                                                        cfg, scale, grad.data(), ws);
                sd += l.surr_d;
                sc += l.surr_c;
                sv += l.vloss;
                se += l.ent;
            }
            const double batch_loss =
                (-sd - sc - cfg.entropy_coef * se + sv) * scale;
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("non-finite loss in policy update (minibatch " +
                                         std::to_string(stats.minibatches) + ")");
            detail::adam_step(pol, grad, groups, cfg);
            stats.loss_d += -sd * scale;
            stats.loss_c += -sc * scale;
            stats.value_loss += sv * scale;
            stats.entropy += se * scale;
            stats.minibatches += 1;
        }
    }
    if (stats.minibatches > 0) {
        stats.loss_d /= stats.minibatches;
        stats.loss_c /= stats.minibatches;
        stats.value_loss /= stats.minibatches;
        stats.entropy /= stats.minibatches;
    }
    buf.clear();
    return stats;
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

struct IterationStats {
    int iteration = 0;
    double mean_ep_reward = 0.0;
    double loss_d = 0.0, loss_c = 0.0, value_loss = 0.0, entropy = 0.0;
};

struct TrainResult {
    Policy policy;
    std::vector<IterationStats> curve;
};

/// Algorithm loop: collect a horizon of on-policy steps (auto-resetting the
/// environment at episode ends), estimate advantages, update, repeat. All
/// randomness derives from `seed`; reruns are bit-identical.
inline TrainResult train(env::Env& e, const TrainConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    TrainResult res;
    res.policy = Policy(e.obs_dim(), e.layout().dim(), e.layout(), cfg,
                        derive_seed(seed, 0x706f6c69));
    Rng sample_rng(derive_seed(seed, 0x73616d70));
    Rng shuffle_rng(derive_seed(seed, 0x73687566));

    RolloutBuffer buf;
    buf.steps.reserve(cfg.horizon);
    Policy::Workspaces ws;
    double ep_return = 0.0;
    std::vector<double> completed;

    e.reset();
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        completed.clear();
        for (int t = 0; t < cfg.horizon; ++t) {
            Transition tr;
            tr.obs = e.observation();
            const SampledAction a = res.policy.sample(tr.obs, sample_rng, ws);
            const env::HybridAction ha =
                env::squash_action(e.layout(), static_cast<env::Move>(a.move), a.raw);
            const env::StepOutcome so = e.step(ha);
            tr.move = a.move;
            tr.raw = a.raw;
            tr.reward = so.reward;
            tr.value = a.value;
            tr.logp_d = a.logp_d;
            tr.logp_c = a.logp_c;
            tr.done = so.done;
            buf.steps.push_back(std::move(tr));
            ep_return += so.reward;
            if (so.done) {
                completed.push_back(ep_return);
                ep_return = 0.0;
                e.reset();
            }
        }
        {
            const std::vector<double> obs_t = e.observation();
            const PolicyOut tail = res.policy.forward(obs_t, ws);
            buf.bootstrap_value = tail.value;
        }
        const UpdateStats us = update(res.policy, buf, cfg, shuffle_rng);

        IterationStats is;
        is.iteration = iter;
        if (!completed.empty()) {
            double s = 0.0;
            for (double r : completed) s += r;
            is.mean_ep_reward = s / (double)completed.size();
        } else if (!res.curve.empty()) {
            is.mean_ep_reward = res.curve.back().mean_ep_reward;
        }
        is.loss_d = us.loss_d;
        is.loss_c = us.loss_c;
        is.value_loss = us.value_loss;
        is.entropy = us.entropy;
        res.curve.push_back(is);
    }
    return res;
}

}  // namespace arisim::hppo
