// Command-line front end: train, evaluate, sweep, oracle, export.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arisim/arisim.hpp"

namespace {

using arisim::cfg::ExperimentConfig;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string mode;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config,-c", o.config_path, "Config file (JSON)");
    cmd->add_option("--seed,-s", o.seed, "Master seed (overrides config)");
    cmd->add_option("--out,-o", o.out, "Output directory (overrides config)");
    cmd->add_option("--mode,-m", o.mode,
                    "Mode: ARIS_NOMA, PRIS_NOMA, ARIS_OMA or PRIS_OMA");
    cmd->add_option("--override,-O", o.overrides,
                    "Dotted-path config override, key=value (repeatable)");
}

ExperimentConfig make_config(const CommonOpts& o) {
    ExperimentConfig xc = o.config_path.empty()
                              ? ExperimentConfig::from_json(nlohmann::json::object())
                              : ExperimentConfig::load(o.config_path);
    if (!o.mode.empty()) xc.j["mode"] = o.mode;
    if (o.seed) xc.j["seed"] = *o.seed;
    if (!o.out.empty()) xc.j["out_dir"] = o.out;
    for (const std::string& ov : o.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override must be key=value: " + ov);
        xc.override_path(ov.substr(0, eq), ov.substr(eq + 1));
    }
    xc.validate();
    return xc;
}

std::string run_tag(const ExperimentConfig& xc) {
    return arisim::cfg::mode_name(xc.mode()) +
           std::string(xc.fairness_on() ? "_fairOn" : "_fairOff");
}

int cmd_train(const CommonOpts& o) {
    const ExperimentConfig xc = make_config(o);
    const std::string out = xc.out_dir();
    arisim::exporter::ensure_dir(out);
    arisim::env::Env e(xc.env_config(), arisim::derive_seed(xc.seed(), 0x74726169ull));
    const arisim::hppo::TrainConfig tc = xc.train_config();
    std::cout << "training " << run_tag(xc) << ": " << tc.iterations << " iterations x "
              << tc.horizon << " steps\n";
    const arisim::hppo::TrainResult res =
        arisim::hppo::train(e, tc, arisim::derive_seed(xc.seed(), 0x6870706full));
    const std::string tag = run_tag(xc);
    const std::string curve_path = out + "/learning_curve_" + tag + ".csv";
    arisim::exporter::write_curve_csv(curve_path, res.curve,
                                      arisim::cfg::mode_name(xc.mode()),
                                      xc.fairness_on() ? "On" : "Off");
    const std::string ckpt_path = out + "/checkpoint_" + tag + ".bin";
    arisim::ckpt::save(arisim::ckpt::from_policy(res.policy, xc.hash(), xc.seed(),
                                                 tc.iterations),
                       ckpt_path);
    arisim::exporter::write_manifest(out + "/manifest_train_" + tag + ".json", xc,
                                     "train");
    if (!res.curve.empty())
        std::cout << "final mean episode reward: " << res.curve.back().mean_ep_reward
                  << "\n";
    std::cout << "wrote " << curve_path << "\nwrote " << ckpt_path << "\n";
    return 0;
}

int cmd_evaluate(const CommonOpts& o, const std::string& ckpt_flag, int episodes_flag) {
    const ExperimentConfig xc = make_config(o);
    const std::string out = xc.out_dir();
    arisim::exporter::ensure_dir(out);
    const std::string tag = run_tag(xc);
    const std::string ckpt_path =
        ckpt_flag.empty() ? out + "/checkpoint_" + tag + ".bin" : ckpt_flag;
    const int episodes = episodes_flag > 0 ? episodes_flag : xc.eval_episodes();
    const arisim::ckpt::Checkpoint ck = arisim::ckpt::load(ckpt_path);
    const arisim::sweep::PolicyEvalResult pe =
        arisim::sweep::evaluate_policy(ck, xc, episodes, true);
    arisim::exporter::write_metrics_csv(out + "/metrics_eval_" + tag + ".csv", {pe.row});
    arisim::exporter::write_traces_csv(out + "/trace_" + tag + ".csv", pe.detail.traces);
    arisim::exporter::write_manifest(out + "/manifest_evaluate_" + tag + ".json", xc,
                                     "evaluate");
    std::cout << "evaluated " << episodes << " episodes: mean sum rate "
              << pe.row.mean_sum_rate << " bits/s/Hz, outage " << pe.row.outage
              << ", mean EE " << pe.row.mean_ee << " bit/J\n";
    return 0;
}

int cmd_sweep(const CommonOpts& o, bool force_oracle) {
    CommonOpts opts = o;
    ExperimentConfig xc = make_config(opts);
    if (force_oracle) {
        xc.j["sweep"]["policy"] = "oracle";
        xc.validate();
    }
    const std::string out = xc.out_dir();
    arisim::exporter::ensure_dir(out);
    const std::vector<arisim::sweep::MetricRow> rows = arisim::sweep::run_sweep(xc);
    const std::string policy = xc.sweep_spec().policy;
    const std::string path =
        out + "/metrics_" + run_tag(xc) + "_" + policy + ".csv";
    arisim::exporter::write_metrics_csv(path, rows);
    arisim::exporter::write_manifest(
        out + "/manifest_" + std::string(force_oracle ? "oracle" : "sweep") + "_" +
            run_tag(xc) + "_" + policy + ".json",
        xc, force_oracle ? "oracle" : "sweep");
    for (const auto& r : rows)
        std::cout << r.sweep_variable << "=" << r.sweep_value << " mode=" << r.mode
                  << " policy=" << r.policy << " rate=" << r.mean_sum_rate
                  << " outage=" << r.outage << "\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_export(const CommonOpts& o) {
    const ExperimentConfig xc = make_config(o);
    const auto files = arisim::exporter::export_run_dir(xc.out_dir());
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-RIS CoMP-NOMA downlink simulator and H-PPO trainer"};
    app.require_subcommand(1);

    CommonOpts train_o, eval_o, sweep_o, oracle_o, export_o;
    std::string eval_ckpt;
    int eval_episodes = 0;

    CLI::App* c_train = app.add_subcommand("train", "Train a policy");
    add_common(c_train, train_o);
    CLI::App* c_eval = app.add_subcommand("evaluate", "Greedy-evaluate a checkpoint");
    add_common(c_eval, eval_o);
    c_eval->add_option("--checkpoint", eval_ckpt,
                       "Checkpoint file (default: <out>/checkpoint_<tag>.bin)");
    c_eval->add_option("--episodes", eval_episodes,
                       "Episodes to evaluate (default: train.eval_episodes)");
    CLI::App* c_sweep = app.add_subcommand("sweep", "Run the configured sweep");
    add_common(c_sweep, sweep_o);
    CLI::App* c_oracle =
        app.add_subcommand("oracle", "Exhaustive-search sweep on a tiny scenario");
    add_common(c_oracle, oracle_o);
    CLI::App* c_export =
        app.add_subcommand("export", "Regenerate plot-ready series from a run directory");
    add_common(c_export, export_o);

    CLI11_PARSE(app, argc, argv);
    try {
        if (c_train->parsed()) return cmd_train(train_o);
        if (c_eval->parsed()) return cmd_evaluate(eval_o, eval_ckpt, eval_episodes);
        if (c_sweep->parsed()) return cmd_sweep(sweep_o, false);
        if (c_oracle->parsed()) return cmd_sweep(oracle_o, true);
        if (c_export->parsed()) return cmd_export(export_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
