// SPDX-License-Identifier: Apache-2.0

#include "risim/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace risim {

namespace {

// Hot kernels are register-blocked over four batch rows so each weight row
// is streamed once per block instead of once per sample. The blocking is
// fixed, so results are reproducible regardless of batch content.

// Z = X * W^T + b.
void forward_kernel(const Mat& x, const Mat& w, const std::vector<double>& b, Mat& z) {
    const std::size_t rows = x.rows;
    const std::size_t in = w.cols;
    const std::size_t out = w.rows;
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        const double* __restrict__ x0 = x.row(r);
        const double* __restrict__ x1 = x.row(r + 1);
        const double* __restrict__ x2 = x.row(r + 2);
        const double* __restrict__ x3 = x.row(r + 3);
        double* __restrict__ z0 = z.row(r);
        double* __restrict__ z1 = z.row(r + 1);
        double* __restrict__ z2 = z.row(r + 2);
        double* __restrict__ z3 = z.row(r + 3);
        for (std::size_t o = 0; o < out; ++o) {
            const double* __restrict__ wr = w.row(o);
            double a0 = b[o], a1 = b[o], a2 = b[o], a3 = b[o];
#pragma omp simd reduction(+ : a0, a1, a2, a3)
            for (std::size_t i = 0; i < in; ++i) {
                const double wv = wr[i];
                a0 += wv * x0[i];
                a1 += wv * x1[i];
                a2 += wv * x2[i];
                a3 += wv * x3[i];
            }
            z0[o] = a0;
            z1[o] = a1;
            z2[o] = a2;
            z3[o] = a3;
        }
    }
    for (; r < rows; ++r) {
        const double* __restrict__ xr = x.row(r);
        double* __restrict__ zr = z.row(r);
        for (std::size_t o = 0; o < out; ++o) {
            const double* __restrict__ wr = w.row(o);
            double acc = b[o];
#pragma omp simd reduction(+ : acc)
            for (std::size_t i = 0; i < in; ++i) {
                acc += wr[i] * xr[i];
            }
            zr[o] = acc;
        }
    }
}

// prev += delta * W and dW += delta^T * X, dB += column sums of delta.
void backward_kernel(const Mat& delta, const Mat& w, const Mat& x, Mat& prev, Mat& dw,
                     std::vector<double>& db) {
    const std::size_t rows = delta.rows;
    const std::size_t in = w.cols;
    const std::size_t out = w.rows;
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        const double* __restrict__ d0 = delta.row(r);
        const double* __restrict__ d1 = delta.row(r + 1);
        const double* __restrict__ d2 = delta.row(r + 2);
        const double* __restrict__ d3 = delta.row(r + 3);
        const double* __restrict__ x0 = x.row(r);
        const double* __restrict__ x1 = x.row(r + 1);
        const double* __restrict__ x2 = x.row(r + 2);
        const double* __restrict__ x3 = x.row(r + 3);
        double* __restrict__ p0 = prev.row(r);
        double* __restrict__ p1 = prev.row(r + 1);
        double* __restrict__ p2 = prev.row(r + 2);
        double* __restrict__ p3 = prev.row(r + 3);
        for (std::size_t o = 0; o < out; ++o) {
            const double v0 = d0[o], v1 = d1[o], v2 = d2[o], v3 = d3[o];
            db[o] += v0 + v1 + v2 + v3;
            const double* __restrict__ wr = w.row(o);
            double* __restrict__ dwr = dw.row(o);
#pragma omp simd
            for (std::size_t i = 0; i < in; ++i) {
                const double wv = wr[i];
                p0[i] += v0 * wv;
                p1[i] += v1 * wv;
                p2[i] += v2 * wv;
                p3[i] += v3 * wv;
                dwr[i] += v0 * x0[i] + v1 * x1[i] + v2 * x2[i] + v3 * x3[i];
            }
        }
    }
    for (; r < rows; ++r) {
        const double* __restrict__ dr = delta.row(r);
        const double* __restrict__ xr = x.row(r);
        double* __restrict__ pr = prev.row(r);
        for (std::size_t o = 0; o < out; ++o) {
            const double dv = dr[o];
            if (dv == 0.0) {
                continue;
            }
            db[o] += dv;
            const double* __restrict__ wr = w.row(o);
            double* __restrict__ dwr = dw.row(o);
#pragma omp simd
            for (std::size_t i = 0; i < in; ++i) {
                pr[i] += dv * wr[i];
                dwr[i] += dv * xr[i];
            }
        }
    }
}

}  // namespace

Mlp Mlp::make(std::vector<std::size_t> sizes, OutputActivation output, RngStream& rng) {
    if (sizes.size() < 2) {
        throw std::invalid_argument("Mlp::make: need at least input and output layer");
    }
    Mlp net;
    net.sizes = std::move(sizes);
    net.output = output;
    for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
        const std::size_t fan_in = net.sizes[l];
        const std::size_t fan_out = net.sizes[l + 1];
        Mat w(fan_out, fan_in);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (auto& v : w.data) {
            v = bound * (2.0 * rng.next_unit() - 1.0);
        }
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

MlpGrads MlpGrads::zeros_like(const Mlp& net) {
    MlpGrads g;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        g.weights.emplace_back(net.weights[l].rows, net.weights[l].cols);
        g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
}

Mat mlp_forward_batch(const Mlp& net, const Mat& input, MlpCache* cache) {
    if (input.cols != net.input_dim()) {
        throw std::invalid_argument("mlp_forward: input width does not match first layer");
    }
    if (cache) {
        cache->activations.assign(1, input);
    }
    Mat a = input;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        Mat z(a.rows, net.weights[l].rows);
        forward_kernel(a, net.weights[l], net.biases[l], z);
        const bool last = l + 1 == net.num_layers();
        if (!last || net.output == OutputActivation::tanh_bounded) {
            for (auto& v : z.data) {
                v = std::tanh(v);
            }
        }
        a = std::move(z);
        if (cache) {
            cache->activations.push_back(a);
        }
    }
    return a;
}

Mat mlp_backward_batch(const Mlp& net, const MlpCache& cache, const Mat& upstream,
                       MlpGrads& grads) {
    if (cache.activations.size() != net.num_layers() + 1) {
        throw std::invalid_argument("mlp_backward: cache does not match network");
    }
    if (upstream.rows != cache.activations.front().rows ||
        upstream.cols != net.output_dim()) {
        throw std::invalid_argument("mlp_backward: upstream gradient has wrong shape");
    }
    grads = MlpGrads::zeros_like(net);
    Mat delta = upstream;  // dL/d(activation of current layer)
    for (std::size_t l = net.num_layers(); l-- > 0;) {
        const Mat& a_out = cache.activations[l + 1];
        const Mat& a_in = cache.activations[l];
        const bool last = l + 1 == net.num_layers();
        // Through the activation: tanh'(z) = 1 - a^2.
        if (!last || net.output == OutputActivation::tanh_bounded) {
            for (std::size_t i = 0; i < delta.data.size(); ++i) {
                delta.data[i] *= 1.0 - a_out.data[i] * a_out.data[i];
            }
        }
        Mat prev(delta.rows, net.weights[l].cols);
        backward_kernel(delta, net.weights[l], a_in, prev, grads.weights[l],
                        grads.biases[l]);
        delta = std::move(prev);
    }
    return delta;
}

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input) {
    Mat x(1, input.size());
    x.data = input;
    const Mat y = mlp_forward_batch(net, x);
    return y.data;
}

MlpGrads mlp_backward(const Mlp& net, const std::vector<double>& input,
                      const std::vector<double>& upstream) {
    Mat x(1, input.size());
    x.data = input;
    MlpCache cache;
    mlp_forward_batch(net, x, &cache);
    Mat up(1, upstream.size());
    up.data = upstream;
    MlpGrads grads;
    mlp_backward_batch(net, cache, up, grads);
    return grads;
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
    for (std::size_t l = 0; l < target.num_layers(); ++l) {
        auto& tw = target.weights[l].data;
        const auto& ow = online.weights[l].data;
        for (std::size_t i = 0; i < tw.size(); ++i) {
            tw[i] = tau * ow[i] + (1.0 - tau) * tw[i];
        }
        auto& tb = target.biases[l];
        const auto& ob = online.biases[l];
        for (std::size_t i = 0; i < tb.size(); ++i) {
            tb[i] = tau * ob[i] + (1.0 - tau) * tb[i];
        }
    }
}

void Adam::step(Mlp& net, const MlpGrads& grads) {
    if (!initialized_) {
        m_ = MlpGrads::zeros_like(net);
        v_ = MlpGrads::zeros_like(net);
        initialized_ = true;
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    auto update = [&](double& p, double g, double& m, double& v) {
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        p -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
    };
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        auto& w = net.weights[l].data;
        const auto& gw = grads.weights[l].data;
        auto& mw = m_.weights[l].data;
        auto& vw = v_.weights[l].data;
        for (std::size_t i = 0; i < w.size(); ++i) {
            update(w[i], gw[i], mw[i], vw[i]);
        }
        auto& b = net.biases[l];
        const auto& gb = grads.biases[l];
        auto& mb = m_.biases[l];
        auto& vb = v_.biases[l];
        for (std::size_t i = 0; i < b.size(); ++i) {
            update(b[i], gb[i], mb[i], vb[i]);
        }
    }
}

}  // namespace risim
