#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arisim/config.hpp"
#include "arisim/hppo.hpp"
#include "arisim/sweep.hpp"
#include "arisim/version.hpp"

namespace arisim::exporter {

using nlohmann::json;

/// Shortest round-trip decimal form; reruns produce identical bytes.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write file: " + path);
    return os;
}

// ---------------------------------------------------------------------------
// Metric tables
// ---------------------------------------------------------------------------

inline constexpr const char* kMetricsHeader =
    "sweep_variable,sweep_value,mode,policy,fairness,mean_sum_rate,ci_half_width,"
    "outage,energy_efficiency,jain,realizations";

inline void write_metrics_csv(const std::string& path,
                              const std::vector<sweep::MetricRow>& rows) {
    std::ofstream os = open_out(path);
    os << kMetricsHeader << "\n";
    for (const auto& r : rows) {
        os << r.sweep_variable << ',' << fmt(r.sweep_value) << ',' << r.mode << ','
           << r.policy << ',' << r.fairness << ',' << fmt(r.mean_sum_rate) << ','
           << (r.ci_defined ? fmt(r.ci_half_width) : std::string()) << ','
           << fmt(r.outage) << ',' << fmt(r.mean_ee) << ',' << fmt(r.mean_jain) << ','
           << r.n << "\n";
    }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline std::vector<sweep::MetricRow> read_metrics_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read metrics file: " + path);
    std::string line;
    if (!std::getline(is, line) || line != kMetricsHeader)
        throw std::runtime_error("unrecognized metrics header in " + path);
    std::vector<sweep::MetricRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw std::runtime_error("malformed metrics row in " + path);
        sweep::MetricRow r;
        r.sweep_variable = f[0];
        r.sweep_value = std::stod(f[1]);
        r.mode = f[2];
        r.policy = f[3];
        r.fairness = f[4];
        r.mean_sum_rate = std::stod(f[5]);
        r.ci_defined = !f[6].empty();
        r.ci_half_width = r.ci_defined ? std::stod(f[6])
                                       : std::numeric_limits<double>::quiet_NaN();
        r.outage = std::stod(f[7]);
        r.mean_ee = std::stod(f[8]);
        r.mean_jain = std::stod(f[9]);
        r.n = std::stoi(f[10]);
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Learning curves
// ---------------------------------------------------------------------------

inline constexpr const char* kCurveHeader =
    "iteration,mode,fairness,mean_ep_reward,loss_discrete,loss_continuous,value_loss,"
    "entropy";

struct CurveRow {
    int iteration = 0;
    std::string mode, fairness;
    double mean_ep_reward = 0.0, loss_d = 0.0, loss_c = 0.0, value_loss = 0.0,
           entropy = 0.0;
};

inline void write_curve_csv(const std::string& path,
                            const std::vector<hppo::IterationStats>& curve,
                            const std::string& mode, const std::string& fairness) {
    std::ofstream os = open_out(path);
    os << kCurveHeader << "\n";
    for (const auto& it : curve) {
        os << it.iteration << ',' << mode << ',' << fairness << ','
           << fmt(it.mean_ep_reward) << ',' << fmt(it.loss_d) << ',' << fmt(it.loss_c)
           << ',' << fmt(it.value_loss) << ',' << fmt(it.entropy) << "\n";
    }
}

inline std::vector<CurveRow> read_curve_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read curve file: " + path);
    std::string line;
    if (!std::getline(is, line) || line != kCurveHeader)
        throw std::runtime_error("unrecognized curve header in " + path);
    std::vector<CurveRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw std::runtime_error("malformed curve row in " + path);
        CurveRow r;
        r.iteration = std::stoi(f[0]);
        r.mode = f[1];
        r.fairness = f[2];
        r.mean_ep_reward = std::stod(f[3]);
        r.loss_d = std::stod(f[4]);
        r.loss_c = std::stod(f[5]);
        r.value_loss = std::stod(f[6]);
        r.entropy = std::stod(f[7]);
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Traces and manifest
// ---------------------------------------------------------------------------

inline constexpr const char* kTraceHeader =
    "episode,slot,uav_x,uav_y,move,reward,sum_rate,worst_rate,oob,no_fly,qos";

inline void write_traces_csv(const std::string& path,
                             const std::vector<sweep::TraceRow>& traces) {
    std::ofstream os = open_out(path);
    os << kTraceHeader << "\n";
    for (const auto& t : traces) {
        os << t.episode << ',' << t.slot << ',' << fmt(t.uav_x) << ',' << fmt(t.uav_y)
           << ',' << t.move << ',' << fmt(t.reward) << ',' << fmt(t.r_total) << ','
           << fmt(t.worst) << ',' << (t.oob ? 1 : 0) << ',' << (t.no_fly ? 1 : 0) << ','
           << (t.qos ? 1 : 0) << "\n";
    }
}

/// Run manifest: version, invoking command, seed, config hash, and the full
/// config object. Loading the embedded config reproduces the run exactly.
inline void write_manifest(const std::string& path, const cfg::ExperimentConfig& xc,
                           const std::string& command) {
    char hash_hex[24];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  (unsigned long long)xc.hash());
    json m{{"version", kVersion},
           {"command", command},
           {"seed", xc.seed()},
           {"config_hash", std::string(hash_hex)},
           {"config", xc.j}};
    std::ofstream os = open_out(path);
    os << m.dump(2) << "\n";
}

inline json read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read manifest: " + path);
    return json::parse(is);
}

// ---------------------------------------------------------------------------
// Plot-ready figure series
// ---------------------------------------------------------------------------

/// Rebuild the per-figure series files from every metrics/curve table in a
/// run directory. Families: sum rate / energy efficiency / outage vs transmit
/// power, reward learning curves, sum rate vs element count, and fairness.
inline std::vector<std::string> write_figure_series(const std::string& outdir,
                                                    const std::vector<sweep::MetricRow>& rows,
                                                    const std::vector<CurveRow>& curves) {
    ensure_dir(outdir);
    std::vector<std::string> written;
    const auto path = [&](const char* name) { return outdir + "/" + name; };

    struct Family {
        const char* file;
        const char* x_name;
        const char* y_name;
        const char* variable;
    };
    const Family metric_families[] = {
        {"fig2a.csv", "p_t_dbm", "mean_sum_rate", "p_t_dbm"},
        {"fig2b.csv", "p_t_dbm", "energy_efficiency", "p_t_dbm"},
        {"fig2c.csv", "p_t_dbm", "outage", "p_t_dbm"},
        {"fig3b.csv", "k_elements", "mean_sum_rate", "k_elements"},
        {"fig3c.csv", "p_t_dbm", "jain", "p_t_dbm"},
    };
    for (const auto& fam : metric_families) {
        std::ofstream os = open_out(path(fam.file));
        os << fam.x_name << ",mode,policy,fairness," << fam.y_name << ",ci_half_width\n";
        for (const auto& r : rows) {
            if (r.sweep_variable != fam.variable) continue;
            double y = r.mean_sum_rate;
            if (std::string(fam.y_name) == "energy_efficiency") y = r.mean_ee;
            if (std::string(fam.y_name) == "outage") y = r.outage;
            if (std::string(fam.y_name) == "jain") y = r.mean_jain;
            os << fmt(r.sweep_value) << ',' << r.mode << ',' << r.policy << ','
               << r.fairness << ',' << fmt(y) << ','
               << (r.ci_defined ? fmt(r.ci_half_width) : std::string()) << "\n";
        }
        written.push_back(path(fam.file));
    }
    {
        std::ofstream os = open_out(path("fig3a.csv"));
        os << "iteration,mode,fairness,mean_ep_reward\n";
        for (const auto& c : curves)
            os << c.iteration << ',' << c.mode << ',' << c.fairness << ','
               << fmt(c.mean_ep_reward) << "\n";
        written.push_back(path("fig3a.csv"));
    }
    return written;
}

/// Gather every metrics_*.csv and learning_curve*.csv in a directory (sorted
/// by name) and regenerate the figure series.
inline std::vector<std::string> export_run_dir(const std::string& dir) {
    std::vector<std::string> metric_files, curve_files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string name = e.path().filename().string();
        if (name.rfind("metrics_", 0) == 0 && name.size() > 4 &&
            name.substr(name.size() - 4) == ".csv")
            metric_files.push_back(e.path().string());
        if (name.rfind("learning_curve", 0) == 0 && name.size() > 4 &&
            name.substr(name.size() - 4) == ".csv")
            curve_files.push_back(e.path().string());
    }
    std::sort(metric_files.begin(), metric_files.end());
    std::sort(curve_files.begin(), curve_files.end());
    std::vector<sweep::MetricRow> rows;
    for (const auto& f : metric_files) {
        const auto r = read_metrics_csv(f);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    std::vector<CurveRow> curves;
    for (const auto& f : curve_files) {
        const auto c = read_curve_csv(f);
        curves.insert(curves.end(), c.begin(), c.end());
    }
    return write_figure_series(dir, rows, curves);
}

}  // namespace arisim::exporter
