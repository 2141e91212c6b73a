#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "arisim/common.hpp"

namespace arisim::nn {

/// Dense multilayer perceptron over a caller-owned flat parameter block.
/// Layer l maps dims[l] -> dims[l+1] with weights stored row-major followed
/// by biases. Hidden activations are tanh; the last layer is linear unless
/// tanh_output is set. Forward caches post-activations so backward can run
/// without recomputation.
class Mlp {
  public:
    struct Workspace {
        std::vector<std::vector<double>> acts;  ///< acts[0] = input, acts[L] = output
    };

    Mlp() = default;
    Mlp(std::vector<std::size_t> dims, bool tanh_output = false)
        : dims_(std::move(dims)), tanh_output_(tanh_output) {
        check_arg(dims_.size() >= 2, "mlp needs at least one layer");
        std::size_t off = 0;
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
            w_off_.push_back(off);
            off += dims_[l] * dims_[l + 1];
            b_off_.push_back(off);
            off += dims_[l + 1];
        }
        n_params_ = off;
    }

    std::size_t n_params() const { return n_params_; }
    std::size_t in_dim() const { return dims_.front(); }
    std::size_t out_dim() const { return dims_.back(); }
    std::size_t n_layers() const { return dims_.size() - 1; }

    /// Fill the block with fan-in-scaled uniform weights. final_scale shrinks
    /// the last layer (near-zero heads give a near-uniform initial policy).
    void init(double* p, Rng& rng, double final_scale = 1.0) const {
        for (std::size_t l = 0; l < n_layers(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
            const double scale = (l + 1 == n_layers()) ? final_scale : 1.0;
            const std::size_t nw = dims_[l] * dims_[l + 1];
            for (std::size_t i = 0; i < nw; ++i)
                p[w_off_[l] + i] = scale * rng.uniform(-bound, bound);
            for (std::size_t i = 0; i < dims_[l + 1]; ++i)
                p[b_off_[l] + i] = scale * rng.uniform(-bound, bound);
        }
    }

    const std::vector<double>& forward(const double* p, const std::vector<double>& x,
                                       Workspace& ws) const {
        check_arg(x.size() == dims_.front(), "mlp input dimension mismatch");
        ws.acts.resize(n_layers() + 1);
        ws.acts[0] = x;
        for (std::size_t l = 0; l < n_layers(); ++l) {
            const std::size_t nin = dims_[l], nout = dims_[l + 1];
            const double* w = p + w_off_[l];
            const double* b = p + b_off_[l];
            const std::vector<double>& a = ws.acts[l];
            std::vector<double>& out = ws.acts[l + 1];
            out.assign(nout, 0.0);
            for (std::size_t o = 0; o < nout; ++o) {
                double s = b[o];
                const double* wrow = w + o * nin;
                for (std::size_t i = 0; i < nin; ++i) s += wrow[i] * a[i];
                out[o] = (l + 1 < n_layers() || tanh_output_) ? std::tanh(s) : s;
            }
        }
        return ws.acts.back();
    }

    /// Accumulate dL/dparams into grad (same layout as p) given dL/doutput,
    /// and return dL/dinput for upstream chaining.
    std::vector<double> backward(const double* p, const Workspace& ws,
                                 const std::vector<double>& d_out, double* grad) const {
        check_arg(d_out.size() == dims_.back(), "mlp gradient dimension mismatch");
        std::vector<double> delta = d_out;
        if (tanh_output_) {
            const std::vector<double>& a = ws.acts.back();
            for (std::size_t o = 0; o < delta.size(); ++o) delta[o] *= 1.0 - a[o] * a[o];
        }
        for (std::size_t li = n_layers(); li-- > 0;) {
            const std::size_t nin = dims_[li], nout = dims_[li + 1];
            const double* w = p + w_off_[li];
            const std::vector<double>& a = ws.acts[li];
            double* gw = grad + w_off_[li];
            double* gb = grad + b_off_[li];
            std::vector<double> d_in(nin, 0.0);
            for (std::size_t o = 0; o < nout; ++o) {
                const double d = delta[o];
                gb[o] += d;
                double* gwrow = gw + o * nin;
                const double* wrow = w + o * nin;
                for (std::size_t i = 0; i < nin; ++i) {
                    gwrow[i] += d * a[i];
                    d_in[i] += wrow[i] * d;
                }
            }
            if (li > 0) {
                const std::vector<double>& al = ws.acts[li];
                for (std::size_t i = 0; i < nin; ++i) d_in[i] *= 1.0 - al[i] * al[i];
            }
            delta = std::move(d_in);
        }
        return delta;
    }

  private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> w_off_, b_off_;
    std::size_t n_params_ = 0;
    bool tanh_output_ = false;
};

/// Compare an analytic gradient against central finite differences on
/// randomly chosen coordinates. Returns the worst error, measured relative
/// to max(|analytic|, |numeric|, 1e-4) so near-zero gradients are judged on
/// an absolute scale.
inline double grad_check(const std::function<double(const std::vector<double>&)>& loss,
                         const std::function<void(const std::vector<double>&,
                                                  std::vector<double>&)>& analytic,
                         std::vector<double> params, std::size_t n_coords, Rng& rng,
                         double h = 1e-5) {
    std::vector<double> g(params.size(), 0.0);
    analytic(params, g);
    double worst = 0.0;
    for (std::size_t c = 0; c < n_coords; ++c) {
        const std::size_t i = rng.below(params.size());
        const double saved = params[i];
        params[i] = saved + h;
        const double fp = loss(params);
        params[i] = saved - h;
        const double fm = loss(params);
        params[i] = saved;
        const double num = (fp - fm) / (2.0 * h);
        const double denom = std::max({std::abs(g[i]), std::abs(num), 1e-4});
        worst = std::max(worst, std::abs(g[i] - num) / denom);
    }
    return worst;
}

}  // namespace arisim::nn
