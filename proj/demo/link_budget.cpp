// Walks one channel realization of the benchmark scenario through the rate
// chain and prints what each surface policy delivers at a few transmit
// powers. A quick way to see the moving parts (config -> slot -> surface
// states -> per-user rates) without the trainer in the loop.
#include <cstdio>

#include <arisim/arisim.hpp>

using namespace arisim;

int main() {
    const cfg::ExperimentConfig xc =
        cfg::ExperimentConfig::from_json(cfg::reference_scenario());
    const net::PowerModel pm = xc.power_model();
    const cfg::OracleSpec os = xc.oracle_spec();
    const oracle::Quantization quant{os.q_theta, os.q_lambda, os.q_p};

    std::printf("%8s  %-8s %10s %10s %8s %10s\n", "p_t", "policy", "sum rate",
                "worst", "jain", "bits/J");
    for (double p_dbm : {0.0, 10.0, 20.0}) {
        const cfg::ExperimentConfig at_p = xc.with_sweep_value(p_dbm);
        const env::EnvConfig ec = at_p.env_config();
        for (sweep::StaticPolicy pol :
             {sweep::StaticPolicy::Fixed, sweep::StaticPolicy::Random,
              sweep::StaticPolicy::Aligned}) {
            const char* name = pol == sweep::StaticPolicy::Fixed    ? "fixed"
                               : pol == sweep::StaticPolicy::Random ? "random"
                                                                    : "aligned";
            const sweep::RealizationMetrics m =
                sweep::evaluate_static(ec, pm, quant, pol, 42);
            std::printf("%4.0f dBm  %-8s %10.3f %10.3f %8.3f %10.1f\n", p_dbm, name,
                        m.report.r_total, m.report.worst, m.jain, m.ee);
        }
    }
    return 0;
}
