// SPDX-License-Identifier: Apache-2.0
//
// Core numerics shared by every other component: complex containers, the
// counter-based random stream used for reproducible Monte-Carlo, order
// statistics and the inverse Gaussian tail.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace risim {

using cd = std::complex<double>;
using CVec = std::vector<cd>;

/// Dense complex matrix, row-major.
struct CMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    CVec data;

    CMat() = default;
    CMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    cd& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const cd& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Counter-based random stream (SplitMix-style). Every draw is a pure
/// function of (seed, stream_id, counter), so trials can be partitioned
/// across workers by handing each one its own stream id, and a stream can
/// be skipped ahead in O(1).
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double next_unit();
    /// Uniform in (0, 1]; safe as a log() argument.
    double next_unit_open();
    /// Standard normal (Box-Muller, two uniforms per draw).
    double next_normal();

    /// Derived stream, statistically independent of the parent.
    RngStream substream(std::uint64_t k) const;
    void skip(std::uint64_t n) { counter_ += n; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t base_ = 0;
    std::uint64_t counter_ = 0;
};

/// n i.i.d. zero-mean circularly-symmetric complex Gaussians with
/// E|z|^2 = variance.
CVec sample_circular_gaussian(RngStream& rng, std::size_t n, double variance);

/// Linear-interpolation percentile of the values, p in [0, 1].
double percentile(std::vector<double> values, double p);
/// Same, but assumes `sorted` is already ascending (no copy).
double percentile_sorted(const std::vector<double>& sorted, double p);

/// Gaussian tail probability Q(x).
double gaussian_tail(double x);
/// Inverse Gaussian tail: x with Q(x) = epsilon, relative error < 1e-9.
double q_inverse(double epsilon);

struct SummaryStats {
    double median_db = 0.0;
    double range_db = 0.0;
    std::size_t samples = 0;
};

/// Median and lo..hi percentile span of a set of dB values.
SummaryStats summarize_db(std::vector<double> values_db, double lo = 0.001, double hi = 0.999);

}  // namespace risim
