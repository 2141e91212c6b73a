// Ten-iteration training run on the benchmark scenario with a shortened
// horizon: enough to watch the learning curve move and compare the greedy
// policy against random actions. Finishes in well under a minute.
#include <cstdio>

#include <arisim/arisim.hpp>

using namespace arisim;

int main() {
    nlohmann::json overrides = cfg::reference_scenario();
    overrides["train"]["iterations"] = 10;
    overrides["train"]["horizon"] = 256;
    const cfg::ExperimentConfig xc = cfg::ExperimentConfig::from_json(overrides);

    env::Env e(xc.env_config(), derive_seed(xc.seed(), 0x74726169ull));
    const hppo::TrainResult tr =
        hppo::train(e, xc.train_config(), derive_seed(xc.seed(), 0x6870706full));

    std::printf("%5s %12s %10s %10s %10s\n", "iter", "ep reward", "loss_d", "loss_c",
                "entropy");
    for (const hppo::IterationStats& s : tr.curve)
        std::printf("%5d %12.3f %10.4f %10.4f %10.4f\n", s.iteration, s.mean_ep_reward,
                    s.loss_d, s.loss_c, s.entropy);

    const ckpt::Checkpoint ck =
        ckpt::from_policy(tr.policy, xc.hash(), xc.seed(), xc.train_config().iterations);
    const sweep::PolicyEvalResult greedy = sweep::evaluate_policy(ck, xc, 20);
    const sweep::PolicyEvalResult random = sweep::evaluate_random(xc, 20);
    std::printf("\ngreedy %.3f vs random %.3f bits/s/Hz over 20 episodes\n",
                greedy.row.mean_sum_rate, random.row.mean_sum_rate);
    return 0;
}
