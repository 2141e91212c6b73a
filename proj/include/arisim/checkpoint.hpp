#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arisim/common.hpp"
#include "arisim/env.hpp"
#include "arisim/hppo.hpp"

namespace arisim::ckpt {

inline constexpr std::uint64_t kMagic = 0x31504b4353495241ull;  // "ARISCKP1"
inline constexpr std::uint32_t kFormatVersion = 1;

/// Everything needed to resume or evaluate a policy. Structural fields
/// (dimensions, layout) gate compatibility; config_hash and seed are
/// provenance only, so a checkpoint can be re-evaluated under a modified
/// config (e.g. a transmit-power sweep) as long as the shapes line up.
struct Checkpoint {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::uint64_t obs_dim = 0;
    std::uint64_t hidden = 0;
    std::uint64_t n_cont = 0;
    std::uint64_t k0 = 0, k1 = 0, n_bs = 0;
    double s_max = 10.0;
    std::int64_t adam_t = 0;
    std::int64_t iterations_done = 0;
    std::vector<double> params, m, v;
};

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((x >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("checkpoint truncated");
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= (std::uint64_t)b[i] << (8 * i);
    return x;
}

inline void put_f64(std::ostream& os, double d) {
    std::uint64_t x;
    std::memcpy(&x, &d, 8);
    put_u64(os, x);
}

inline double get_f64(std::istream& is) {
    const std::uint64_t x = get_u64(is);
    double d;
    std::memcpy(&d, &x, 8);
    return d;
}

inline void put_vec(std::ostream& os, const std::vector<double>& v) {
    put_u64(os, v.size());
    for (double d : v) put_f64(os, d);
}

inline std::vector<double> get_vec(std::istream& is) {
    std::vector<double> v(get_u64(is));
    for (double& d : v) d = get_f64(is);
    return v;
}

}  // namespace detail

inline Checkpoint from_policy(const hppo::Policy& pol, std::uint64_t config_hash,
                              std::uint64_t seed, std::int64_t iterations_done) {
    Checkpoint c;
    c.config_hash = config_hash;
    c.seed = seed;
    c.obs_dim = pol.obs_dim();
    c.hidden = pol.hidden();
    c.n_cont = pol.n_cont();
    c.k0 = pol.layout().k0;
    c.k1 = pol.layout().k1;
    c.n_bs = pol.layout().n_bs;
    c.s_max = pol.layout().s_max;
    c.adam_t = pol.adam_t;
    c.iterations_done = iterations_done;
    c.params = pol.params;
    c.m = pol.m;
    c.v = pol.v;
    return c;
}

/// Rebuild a Policy from a checkpoint. Throws when the checkpoint's shapes
/// disagree with the requested environment dimensions.
inline hppo::Policy to_policy(const Checkpoint& c, std::size_t obs_dim,
                              const env::ActionLayout& layout,
                              const hppo::TrainConfig& cfg) {
    if (c.obs_dim != obs_dim || c.n_cont != layout.dim() || c.hidden != cfg.hidden ||
        c.k0 != layout.k0 || c.k1 != layout.k1 || c.n_bs != layout.n_bs)
        throw std::runtime_error(
            "incompatible checkpoint: stored dims (obs " + std::to_string(c.obs_dim) +
            ", cont " + std::to_string(c.n_cont) + ", hidden " + std::to_string(c.hidden) +
            ") do not match the requested scenario (obs " + std::to_string(obs_dim) +
            ", cont " + std::to_string(layout.dim()) + ", hidden " +
            std::to_string(cfg.hidden) + ")");
    hppo::Policy pol(obs_dim, layout.dim(), layout, cfg, 0);
    if (pol.params.size() != c.params.size())
        throw std::runtime_error("incompatible checkpoint: parameter count mismatch");
    pol.params = c.params;
    pol.m = c.m;
    pol.v = c.v;
    pol.adam_t = c.adam_t;
    return pol;
}

inline void save(const Checkpoint& c, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
    detail::put_u64(os, kMagic);
    detail::put_u64(os, kFormatVersion);
    detail::put_u64(os, c.config_hash);
    detail::put_u64(os, c.seed);
    detail::put_u64(os, c.obs_dim);
    detail::put_u64(os, c.hidden);
    detail::put_u64(os, c.n_cont);
    detail::put_u64(os, c.k0);
    detail::put_u64(os, c.k1);
    detail::put_u64(os, c.n_bs);
    detail::put_f64(os, c.s_max);
    detail::put_u64(os, (std::uint64_t)c.adam_t);
    detail::put_u64(os, (std::uint64_t)c.iterations_done);
    detail::put_vec(os, c.params);
    detail::put_vec(os, c.m);
    detail::put_vec(os, c.v);
    if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

inline Checkpoint load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read checkpoint: " + path);
    if (detail::get_u64(is) != kMagic)
        throw std::runtime_error("not a checkpoint file: " + path);
    const std::uint64_t ver = detail::get_u64(is);
    if (ver != kFormatVersion)
        throw std::runtime_error("unsupported checkpoint format version " +
                                 std::to_string(ver));
    Checkpoint c;
    c.config_hash = detail::get_u64(is);
    c.seed = detail::get_u64(is);
    c.obs_dim = detail::get_u64(is);
    c.hidden = detail::get_u64(is);
    c.n_cont = detail::get_u64(is);
    c.k0 = detail::get_u64(is);
    c.k1 = detail::get_u64(is);
    c.n_bs = detail::get_u64(is);
    c.s_max = detail::get_f64(is);
    c.adam_t = (std::int64_t)detail::get_u64(is);
    c.iterations_done = (std::int64_t)detail::get_u64(is);
    c.params = detail::get_vec(is);
    c.m = detail::get_vec(is);
    c.v = detail::get_vec(is);
    return c;
}

}  // namespace arisim::ckpt
