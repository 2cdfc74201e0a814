// SPDX-License-Identifier: Apache-2.0

#include "risim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Stafford mix 13).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id), base_(mix64(mix64(seed + kGamma) + stream_id)) {}

std::uint64_t RngStream::next_u64() {
    ++counter_;
    return mix64(base_ + counter_ * kGamma);
}

double RngStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_unit_open() {
    return 1.0 - next_unit();
}

double RngStream::next_normal() {
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

RngStream RngStream::substream(std::uint64_t k) const {
    return RngStream(seed_, mix64(stream_ ^ 0xd1b54a32d192ed03ULL) + k);
}

CVec sample_circular_gaussian(RngStream& rng, std::size_t n, double variance) {
    if (!(variance > 0.0)) {
        throw std::invalid_argument("sample_circular_gaussian: variance must be > 0");
    }
    CVec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = rng.next_unit_open();
        const double u2 = rng.next_unit();
        const double r = std::sqrt(-variance * std::log(u1));
        out[i] = std::polar(r, kTwoPi * u2);
    }
    return out;
}

double percentile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        throw std::invalid_argument("percentile: empty value list");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("percentile: p outside [0, 1]");
    }
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t i = static_cast<std::size_t>(h);
    if (i + 1 >= sorted.size()) {
        return sorted.back();
    }
    const double frac = h - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

double percentile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return percentile_sorted(values, p);
}

double gaussian_tail(double x) {
    return 0.5 * std::erfc(x * 0.70710678118654752440);
}

namespace {

// Acklam's rational approximation to the inverse normal CDF; used only as
// the Newton starting point below.
double inv_norm_cdf_approx(double p) {
    static const double a1 = -39.69683028665376, a2 = 220.9460984245205, a3 = -275.9285104469687,
                        a4 = 138.3577518672690, a5 = -30.66479806614716, a6 = 2.506628277459239;
    static const double b1 = -54.47609879822406, b2 = 161.5858368580409, b3 = -155.6989798598866,
                        b4 = 66.80131188771972, b5 = -13.28068155288572;
    static const double c1 = -7.784894002430293e-03, c2 = -3.223964580411365e-01,
                        c3 = -2.400758277161838, c4 = -2.549732539343734, c5 = 4.374664141464968,
                        c6 = 2.938163982698783;
    static const double d1 = 7.784695709041462e-03, d2 = 3.224671290700398e-01,
                        d3 = 2.445134137142996, d4 = 3.754408661907416;
    const double plow = 0.02425;
    const double phigh = 1.0 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c1 * q + c2) * q + c3) * q + c4) * q + c5) * q + c6) /
               ((((d1 * q + d2) * q + d3) * q + d4) * q + 1.0);
    }
    if (p > phigh) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c1 * q + c2) * q + c3) * q + c4) * q + c5) * q + c6) /
               ((((d1 * q + d2) * q + d3) * q + d4) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a1 * r + a2) * r + a3) * r + a4) * r + a5) * r + a6) * q /
           (((((b1 * r + b2) * r + b3) * r + b4) * r + b5) * r + 1.0);
}

}  // namespace

double q_inverse(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("q_inverse: epsilon outside (0, 1)");
    }
    // Q(x) = eps  <=>  Phi^{-1}(eps) = -x.
    double x = -inv_norm_cdf_approx(epsilon);
    constexpr double kInvSqrt2Pi = 0.39894228040143267794;
    for (int it = 0; it < 4; ++it) {
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
        if (pdf <= 0.0) {
            break;
        }
        x += (gaussian_tail(x) - epsilon) / pdf;
    }
    return x;
}

SummaryStats summarize_db(std::vector<double> values_db, double lo, double hi) {
    std::sort(values_db.begin(), values_db.end());
    SummaryStats s;
    s.samples = values_db.size();
    s.median_db = percentile_sorted(values_db, 0.5);
    s.range_db = percentile_sorted(values_db, hi) - percentile_sorted(values_db, lo);
    return s;
}

}  // namespace risim
