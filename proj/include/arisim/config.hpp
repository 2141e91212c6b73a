#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arisim/common.hpp"
#include "arisim/env.hpp"
#include "arisim/hppo.hpp"
#include "arisim/network.hpp"

namespace arisim::cfg {

using nlohmann::json;

/// FNV-1a over the canonical (sorted-key) dump; identifies a config exactly.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

enum class Mode { ArisNoma, PrisNoma, ArisOma, PrisOma };

inline Mode parse_mode(const std::string& s) {
    if (s == "ARIS_NOMA") return Mode::ArisNoma;
    if (s == "PRIS_NOMA") return Mode::PrisNoma;
    if (s == "ARIS_OMA") return Mode::ArisOma;
    if (s == "PRIS_OMA") return Mode::PrisOma;
    throw std::invalid_argument("unknown mode: " + s +
                                " (expected ARIS_NOMA, PRIS_NOMA, ARIS_OMA or PRIS_OMA)");
}

inline std::string mode_name(Mode m) {
    switch (m) {
        case Mode::ArisNoma: return "ARIS_NOMA";
        case Mode::PrisNoma: return "PRIS_NOMA";
        case Mode::ArisOma: return "ARIS_OMA";
        default: return "PRIS_OMA";
    }
}

inline bool mode_active(Mode m) { return m == Mode::ArisNoma || m == Mode::ArisOma; }
inline net::RateScheme mode_scheme(Mode m) {
    return (m == Mode::ArisNoma || m == Mode::PrisNoma) ? net::RateScheme::Noma
                                                        : net::RateScheme::Oma;
}

/// Complete default configuration; every key that may appear in a config
/// file appears here, which doubles as the schema.
inline json defaults() {
    return json{
        {"mode", "ARIS_NOMA"},
        {"fairness", "Off"},
        {"fairness_weight", 1.0},
        {"rate_variant", "Corrected"},
        {"realizations", 1000},
        {"seed", 1},
        {"out_dir", "out"},
        {"scenario",
         {{"bs", json::array({json::array({-30.0, 30.0, 20.0}),
                              json::array({30.0, 30.0, 20.0}),
                              json::array({20.0, -30.0, 20.0})})},
          {"n_center", 3},
          {"n_edge", 3},
          {"placement_seed", 1},
          {"users", json::array()},
          {"obstacles", json::array()},
          {"d_min", 10.0},
          {"ris_ground", json::array({0.0, 0.0, 20.0})},
          {"uav_start", json::array({-5.0, 0.0, 40.0})},
          {"flight_area", json::array({-50.0, -50.0, 50.0, 50.0})}}},
        {"radio",
         {{"p_t_dbm", 20.0},
          {"bandwidth_hz", 1e7},
          {"carrier_hz", 2.4e9},
          {"sigma2_dbm", nullptr}}},
        {"channel",
         {{"rho0_db", -30.0},
          {"rho0_ris_db", nullptr},
          {"alpha_bs_user", 3.3},
          {"alpha_bs_ris", 2.2},
          {"alpha_ris_user", 2.2},
          {"kappa", 2.0},
          {"ris_user_rician", true}}},
        {"ris",
         {{"k_ground", 16},
          {"k_uav", 16},
          {"s_max", 10.0},
          {"amplitude", 1.0},
          {"sigma_v2_dbm", nullptr}}},
        {"env",
         {{"t_s", 100},
          {"step_size_m", 2.0},
          {"xi_dist", 1.0},
          {"c_const", 10.0},
          {"proximity_threshold_m", 20.0},
          {"xi_oob", 10.0},
          {"r_min", 1.0},
          {"qos_penalty", 0.0},
          {"per_step_lambda_amp", true},
          {"rate_obs_scale", 0.1},
          {"lambda_init", 0.75}}},
        {"train",
         {{"discount", 0.99},
          {"n_step", 8},
          {"clip", 0.2},
          {"lr_discrete", 3e-4},
          {"lr_continuous", 3e-4},
          {"lr_critic", 3e-4},
          {"lr_encoder", 3e-4},
          {"epochs", 4},
          {"minibatch", 256},
          {"horizon", 1024},
          {"entropy_coef", 0.01},
          {"iterations", 200},
          {"hidden", 64},
          {"logstd_init", -0.5},
          {"eval_episodes", 100}}},
        {"power",
         {{"p_bs_static_w", 1.0},
          {"eta_ris", 1.25},
          {"p_circuit_per_elem_w", 0.01},
          {"p_uav_hover_w", 100.0}}},
        {"oracle", {{"q_theta", 8}, {"q_lambda", 5}, {"q_p", 4}}},
        {"sweep",
         {{"variable", "p_t_dbm"},
          {"values", json::array({-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0})},
          {"policy", "fixed"},
          {"checkpoint", ""}}}};
}

/// The benchmark scenario used by the shipped presets and the acceptance
/// suite: three well-separated sites and hand-placed users. The ground
/// surface is parked next to site 0, so its inbound leg from the serving BS
/// is much shorter than the legs from the interfering sites; that asymmetry
/// is what makes element gain pay off (amplified scatter from the other
/// sites stays weak while the aligned serving cascade grows). Site 0's users
/// sit at moderate outbound range from that surface; the other sites have no
/// parked surface, so whatever the aerial one can add depends on where it
/// flies, and it starts away from every good hover spot. Each edge user
/// lives in the gap between its CoMP pair. Street-level direct links are
/// deeply obstructed (high exponent, heavy clutter loss at the reference
/// distance) while the elevated surface legs keep an engineered reference
/// gain, tuned so that a passive reflection arrives near the noise floor and
/// only an amplified, phase-aligned cascade rises well above it. Phase
/// control, element gain, power split, and UAV positioning are all binding
/// levers here, which is the regime the trainer is meant to exercise.
/// The training overrides reflect this action space: surface states and power
/// splits are reapplied every slot, so 1-step advantages carry their full
/// credit without stacking unrelated fading noise from later slots, and
/// full-batch updates keep the per-dimension gradient sign reliable across
/// the many continuous dimensions.
/// Returns an override object for from_json/merge.
inline json reference_scenario() {
    return json{
        {"seed", 1},
        {"scenario",
         {{"bs", json::array({json::array({-40.0, 40.0, 20.0}),
                              json::array({40.0, 40.0, 20.0}),
                              json::array({0.0, -45.0, 20.0})})},
          {"users",
           json::array(
               {json{{"pos", json::array({-52.0, 50.0, 0.0})}, {"role", "center"}, {"serving", 0}},
                json{{"pos", json::array({52.0, 50.0, 0.0})}, {"role", "center"}, {"serving", 1}},
                json{{"pos", json::array({0.0, -62.0, 0.0})}, {"role", "center"}, {"serving", 2}},
                json{{"pos", json::array({-10.0, 10.0, 0.0})},
                     {"role", "edge"},
                     {"serving", 0},
                     {"partner", 1}},
                json{{"pos", json::array({14.0, 6.0, 0.0})},
                     {"role", "edge"},
                     {"serving", 1},
                     {"partner", 2}},
                json{{"pos", json::array({-14.0, -28.0, 0.0})},
                     {"role", "edge"},
                     {"serving", 2},
                     {"partner", 0}}})},
          {"ris_ground", json::array({-28.0, 28.0, 20.0})},
          {"uav_start", json::array({-20.0, -25.0, 40.0})}}},
        {"radio", {{"p_t_dbm", 20.0}}},
        {"channel",
         {{"rho0_db", -60.0}, {"rho0_ris_db", -38.0}, {"alpha_bs_user", 4.0}}},
        {"env", {{"qos_penalty", 2.0}}},
        {"train",
         {{"lr_continuous", 1e-3},
          {"lr_critic", 1e-3},
          {"entropy_coef", 1e-4},
          {"logstd_init", -0.3},
          {"epochs", 3},
          {"n_step", 1},
          {"minibatch", 1024}}}};
}

namespace detail {

inline void check_known_keys(const json& user, const json& def, const std::string& path) {
    if (!user.is_object()) return;
    if (!def.is_object())
        throw std::invalid_argument("config key '" + path + "' does not take an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!def.contains(it.key()))
            throw std::invalid_argument("unknown config key: " + path + it.key());
        check_known_keys(it.value(), def.at(it.key()), path + it.key() + ".");
    }
}

inline json merge(json base, const json& over) {
    if (!base.is_object() || !over.is_object()) return over;
    for (auto it = over.begin(); it != over.end(); ++it) {
        if (base.contains(it.key()))
            base[it.key()] = merge(base.at(it.key()), it.value());
        else
            base[it.key()] = it.value();
    }
    return base;
}

inline Pos3 to_pos(const json& a) {
    check_arg(a.is_array() && a.size() == 3, "position must be [x, y, z]");
    return Pos3{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

}  // namespace detail

struct SweepSpec {
    std::string variable;
    std::vector<double> values;
    std::string policy;
    std::string checkpoint;
};

struct OracleSpec {
    int q_theta = 8, q_lambda = 5, q_p = 4;
};

/// One experiment, fully described. The merged json is the single source of
/// truth; typed views are assembled on demand.
class ExperimentConfig {
  public:
    json j;

    static ExperimentConfig from_json(const json& user) {
        const json d = defaults();
        detail::check_known_keys(user, d, "");
        ExperimentConfig c;
        c.j = detail::merge(d, user);
        c.validate();
        return c;
    }

    static ExperimentConfig load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot read config: " + path);
        json user;
        try {
            user = json::parse(is);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("config parse error in " + path + ": " + e.what());
        }
        return from_json(user);
    }

    /// Apply one `key=value` override with a dotted path into the schema.
    /// The path must already exist; the value is parsed as JSON when
    /// possible, else taken as a string.
    void override_path(const std::string& dotted, const std::string& value) {
        json* node = &j;
        std::stringstream ss(dotted);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, '.')) parts.push_back(part);
        check_arg(!parts.empty(), "empty override path");
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            if (!node->is_object() || !node->contains(parts[i]))
                throw std::invalid_argument("unknown config path: " + dotted);
            node = &(*node)[parts[i]];
        }
        if (!node->is_object() || !node->contains(parts.back()))
            throw std::invalid_argument("unknown config path: " + dotted);
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::parse_error&) {
            parsed = value;
        }
        (*node)[parts.back()] = parsed;
        validate();
    }

    std::uint64_t hash() const { return fnv1a(j.dump()); }

    Mode mode() const { return parse_mode(j.at("mode").get<std::string>()); }
    bool fairness_on() const { return j.at("fairness").get<std::string>() == "On"; }
    int realizations() const { return j.at("realizations").get<int>(); }
    std::uint64_t seed() const { return j.at("seed").get<std::uint64_t>(); }
    std::string out_dir() const { return j.at("out_dir").get<std::string>(); }

    net::RateVariant rate_variant() const {
        const std::string s = j.at("rate_variant").get<std::string>();
        if (s == "Corrected") return net::RateVariant::Corrected;
        if (s == "Literal") return net::RateVariant::Literal;
        throw std::invalid_argument("unknown rate_variant: " + s);
    }

    net::Topology topology() const {
        const json& sc = j.at("scenario");
        net::Topology t;
        for (const auto& b : sc.at("bs")) t.bs.push_back(detail::to_pos(b));
        t.ris_ground = detail::to_pos(sc.at("ris_ground"));
        t.uav = detail::to_pos(sc.at("uav_start"));
        const json& fa = sc.at("flight_area");
        check_arg(fa.is_array() && fa.size() == 4,
                  "flight_area must be [xmin, ymin, xmax, ymax]");
        t.flight_area = {fa[0].get<double>(), fa[1].get<double>(), fa[2].get<double>(),
                         fa[3].get<double>()};
        const double d_min = sc.at("d_min").get<double>();
        for (const auto& o : sc.at("obstacles")) {
            check_arg(o.is_array() && (o.size() == 2 || o.size() == 3),
                      "obstacle must be [x, y] or [x, y, radius]");
            net::Obstacle ob;
            ob.pos = Pos3{o[0].get<double>(), o[1].get<double>(), 0.0};
            ob.radius = o.size() == 3 ? o[2].get<double>() : d_min;
            t.obstacles.push_back(ob);
        }
        if (!sc.at("users").empty()) {
            for (const auto& u : sc.at("users")) {
                net::User usr;
                usr.pos = detail::to_pos(u.at("pos"));
                const std::string role = u.at("role").get<std::string>();
                if (role == "center") {
                    usr.role = net::Role::Center;
                    usr.serving = u.at("serving").get<int>();
                } else if (role == "edge") {
                    usr.role = net::Role::Edge;
                    usr.serving = u.at("serving").get<int>();
                    usr.partner = u.at("partner").get<int>();
                } else {
                    throw std::invalid_argument("user role must be 'center' or 'edge'");
                }
                t.users.push_back(usr);
            }
        } else {
            generate_users(t, sc);
        }
        t.validate();
        return t;
    }

    net::RadioConfig radio() const {
        const json& r = j.at("radio");
        net::RadioConfig rc;
        rc.bandwidth = r.at("bandwidth_hz").get<double>();
        rc.carrier = r.at("carrier_hz").get<double>();
        rc.p_t = dbm_to_watt(r.at("p_t_dbm").get<double>());
        rc.sigma2 = r.at("sigma2_dbm").is_null()
                        ? dbm_to_watt(net::noise_power_dbm(rc.bandwidth))
                        : dbm_to_watt(r.at("sigma2_dbm").get<double>());
        rc.validate();
        return rc;
    }

    net::ChannelParams channels() const {
        const json& c = j.at("channel");
        net::ChannelParams cp;
        const double rho0 = db_to_linear(c.at("rho0_db").get<double>());
        // The surface legs may carry their own reference gain (element
        // directivity and deliberate placement); null inherits rho0_db.
        const double rho0_ris = c.at("rho0_ris_db").is_null()
                                    ? rho0
                                    : db_to_linear(c.at("rho0_ris_db").get<double>());
        cp.pl_bs_user = {rho0, c.at("alpha_bs_user").get<double>()};
        cp.pl_bs_ris = {rho0_ris, c.at("alpha_bs_ris").get<double>()};
        cp.pl_ris_user = {rho0_ris, c.at("alpha_ris_user").get<double>()};
        cp.kappa = c.at("kappa").get<double>();
        cp.ris_user_rician = c.at("ris_user_rician").get<bool>();
        cp.pl_bs_user.validate();
        cp.pl_bs_ris.validate();
        cp.pl_ris_user.validate();
        return cp;
    }

    env::EnvConfig env_config() const {
        const json& e = j.at("env");
        const json& r = j.at("ris");
        env::EnvConfig ec;
        ec.topology = topology();
        ec.channels = channels();
        ec.radio = radio();
        ec.k_elems = {r.at("k_ground").get<std::size_t>(), r.at("k_uav").get<std::size_t>()};
        const Mode m = mode();
        ec.ris_mode = mode_active(m) ? ris::Mode::Active : ris::Mode::Passive;
        ec.scheme = mode_scheme(m);
        ec.s_max = r.at("s_max").get<double>();
        ec.element_amplitude = r.at("amplitude").get<double>();
        ec.sigma_v2 = r.at("sigma_v2_dbm").is_null()
                          ? -1.0
                          : dbm_to_watt(r.at("sigma_v2_dbm").get<double>());
        ec.variant = rate_variant();
        ec.reward_params = {e.at("xi_dist").get<double>(), e.at("xi_oob").get<double>(),
                            e.at("c_const").get<double>(),
                            e.at("proximity_threshold_m").get<double>()};
        ec.fairness_weight = fairness_on() ? j.at("fairness_weight").get<double>() : 0.0;
        ec.qos_penalty = e.at("qos_penalty").get<double>();
        ec.r_min = e.at("r_min").get<double>();
        ec.t_s = e.at("t_s").get<int>();
        ec.step_size = e.at("step_size_m").get<double>();
        ec.lambda_init = e.at("lambda_init").get<double>();
        ec.per_step_lambda_amp = e.at("per_step_lambda_amp").get<bool>();
        ec.rate_obs_scale = e.at("rate_obs_scale").get<double>();
        ec.validate();
        return ec;
    }

    hppo::TrainConfig train_config() const {
        const json& t = j.at("train");
        hppo::TrainConfig tc;
        tc.discount = t.at("discount").get<double>();
        tc.n_step = t.at("n_step").get<int>();
        tc.clip = t.at("clip").get<double>();
        tc.lr_discrete = t.at("lr_discrete").get<double>();
        tc.lr_continuous = t.at("lr_continuous").get<double>();
        tc.lr_critic = t.at("lr_critic").get<double>();
        tc.lr_encoder = t.at("lr_encoder").get<double>();
        tc.epochs = t.at("epochs").get<int>();
        tc.minibatch = t.at("minibatch").get<int>();
        tc.horizon = t.at("horizon").get<int>();
        tc.entropy_coef = t.at("entropy_coef").get<double>();
        tc.iterations = t.at("iterations").get<int>();
        tc.hidden = t.at("hidden").get<std::size_t>();
        tc.logstd_init = t.at("logstd_init").get<double>();
        tc.validate();
        return tc;
    }

    int eval_episodes() const { return j.at("train").at("eval_episodes").get<int>(); }

    net::PowerModel power_model() const {
        const json& p = j.at("power");
        net::PowerModel pm;
        pm.p_bs_static = p.at("p_bs_static_w").get<double>();
        pm.eta_ris = p.at("eta_ris").get<double>();
        pm.p_circuit_per_elem = p.at("p_circuit_per_elem_w").get<double>();
        pm.p_uav_hover = p.at("p_uav_hover_w").get<double>();
        pm.validate();
        return pm;
    }

    OracleSpec oracle_spec() const {
        const json& o = j.at("oracle");
        return {o.at("q_theta").get<int>(), o.at("q_lambda").get<int>(),
                o.at("q_p").get<int>()};
    }

    SweepSpec sweep_spec() const {
        const json& s = j.at("sweep");
        SweepSpec sp;
        sp.variable = s.at("variable").get<std::string>();
        for (const auto& v : s.at("values")) sp.values.push_back(v.get<double>());
        sp.policy = s.at("policy").get<std::string>();
        sp.checkpoint = s.at("checkpoint").get<std::string>();
        check_arg(!sp.values.empty(), "sweep values must be nonempty");
        check_arg(sp.variable == "p_t_dbm" || sp.variable == "k_elements",
                  "sweep variable must be p_t_dbm or k_elements");
        check_arg(sp.policy == "fixed" || sp.policy == "random" || sp.policy == "aligned" ||
                      sp.policy == "oracle" || sp.policy == "checkpoint",
                  "sweep policy must be fixed, random, aligned, oracle or checkpoint");
        return sp;
    }

    /// Copy with one sweep value substituted.
    ExperimentConfig with_sweep_value(double v) const {
        ExperimentConfig c = *this;
        const std::string var = sweep_spec().variable;
        if (var == "p_t_dbm") {
            c.j["radio"]["p_t_dbm"] = v;
        } else {
            const auto k = (std::size_t)v;
            check_arg(v > 0 && (double)k == v, "k_elements sweep values must be positive integers");
            c.j["ris"]["k_ground"] = k;
            c.j["ris"]["k_uav"] = k;
        }
        return c;
    }

    void validate() const {
        check_arg(realizations() >= 1, "realizations must be >= 1");
        parse_mode(j.at("mode").get<std::string>());
        const std::string f = j.at("fairness").get<std::string>();
        check_arg(f == "On" || f == "Off", "fairness must be On or Off");
        rate_variant();
        env_config();
        train_config();
        sweep_spec();
        power_model();
        const OracleSpec os = oracle_spec();
        check_arg(os.q_theta >= 1 && os.q_lambda >= 1 && os.q_p >= 1,
                  "oracle quantization levels must be >= 1");
    }

  private:
    /// Random placement: each center user in an annulus around its BS, each
    /// edge user jittered around the midpoint of its CoMP pair.
    void generate_users(net::Topology& t, const json& sc) const {
        const int n_center = sc.at("n_center").get<int>();
        const int n_edge = sc.at("n_edge").get<int>();
        const auto m_bs = (int)t.bs.size();
        check_arg(n_center >= 0 && n_center <= m_bs, "n_center must be in [0, #BS]");
        check_arg(n_edge >= 0 && n_edge <= m_bs, "n_edge must be in [0, #BS]");
        check_arg(n_edge == 0 || m_bs >= 2, "edge users need at least two BSs");
        Rng rng(derive_seed(sc.at("placement_seed").get<std::uint64_t>(), 0x706c6163));
        for (int m = 0; m < n_center; ++m) {
            const double ang = rng.uniform(0.0, 2.0 * kPi);
            const double rad = rng.uniform(5.0, 15.0);
            net::User u;
            u.pos = Pos3{t.bs[m].x + rad * std::cos(ang), t.bs[m].y + rad * std::sin(ang),
                         0.0};
            u.role = net::Role::Center;
            u.serving = m;
            t.users.push_back(u);
        }
        for (int e = 0; e < n_edge; ++e) {
            const int a = e, b = (e + 1) % m_bs;
            net::User u;
            u.pos = Pos3{0.5 * (t.bs[a].x + t.bs[b].x) + rng.uniform(-5.0, 5.0),
                         0.5 * (t.bs[a].y + t.bs[b].y) + rng.uniform(-5.0, 5.0), 0.0};
            u.role = net::Role::Edge;
            u.serving = a;
            u.partner = b;
            t.users.push_back(u);
        }
    }
};

}  // namespace arisim::cfg
