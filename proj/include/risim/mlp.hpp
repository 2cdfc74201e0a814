// SPDX-License-Identifier: Apache-2.0
//
// Minimal dense networks used by the policy-gradient agent: tanh hidden
// layers, linear or tanh output, exact backprop, Adam updates. Batches are
// row-major (one sample per row); all kernels are plain loops over
// contiguous memory.

#pragma once

#include <cstddef>
#include <vector>

#include "risim/numerics.hpp"

namespace risim {

/// Dense real matrix, row-major.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

enum class OutputActivation { linear, tanh_bounded };

struct Mlp {
    std::vector<std::size_t> sizes;   // layer widths, input first
    std::vector<Mat> weights;         // layer l: sizes[l+1] x sizes[l]
    std::vector<std::vector<double>> biases;
    OutputActivation output = OutputActivation::linear;

    /// Uniform +-1/sqrt(fan_in) init.
    static Mlp make(std::vector<std::size_t> sizes, OutputActivation output, RngStream& rng);

    std::size_t input_dim() const { return sizes.front(); }
    std::size_t output_dim() const { return sizes.back(); }
    std::size_t num_layers() const { return weights.size(); }
};

/// Post-activation values per layer; activations[0] is the input batch.
struct MlpCache {
    std::vector<Mat> activations;
};

struct MlpGrads {
    std::vector<Mat> weights;
    std::vector<std::vector<double>> biases;

    static MlpGrads zeros_like(const Mlp& net);
};

/// Batched forward pass; fills `cache` for a later backward pass when given.
Mat mlp_forward_batch(const Mlp& net, const Mat& input, MlpCache* cache = nullptr);

/// Batched backprop. `upstream` is dL/d(output); returns dL/d(input) and
/// writes exact parameter gradients into `grads`.
Mat mlp_backward_batch(const Mlp& net, const MlpCache& cache, const Mat& upstream,
                       MlpGrads& grads);

/// Single-sample conveniences.
std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input);
MlpGrads mlp_backward(const Mlp& net, const std::vector<double>& input,
                      const std::vector<double>& upstream);

/// target <- tau * online + (1 - tau) * target.
void polyak_update(Mlp& target, const Mlp& online, double tau);

struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void step(Mlp& net, const MlpGrads& grads);

  private:
    MlpGrads m_;
    MlpGrads v_;
    std::size_t t_ = 0;
    bool initialized_ = false;
};

}  // namespace risim
