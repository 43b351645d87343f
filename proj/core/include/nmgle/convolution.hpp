#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "nmgle/model.hpp"

namespace nmgle {

enum class ConvolutionMethod { Naive, Incremental };

/// Incremental state for the sliding sin-kernel integral
///   I(t) = integral_0^t sin(w (t - s)) f(s) ds.
///
/// Writing sin(w(t-s)) = Im[e^{iwt} e^{-iws}] turns the t-dependent kernel
/// into a fixed-weight prefix integral: with
///   a(t) = integral_0^t e^{-iws} f(s) ds,   b(t) = integral_0^t e^{+iws} f(s) ds,
/// the result is I(t) = (e^{iwt} a(t) - e^{-iwt} b(t)) / (2i), and for real
/// signals b = conj(a) so I(t) = Im[e^{iwt} a(t)]. Both prefixes grow by one
/// trapezoid panel per step, so evaluation is O(1) per step instead of O(n).
/// The trapezoid weights are identical to the naive quadrature, so the two
/// methods agree to rounding.
struct ConvolutionAccumulator {
    std::complex<double> a{0.0, 0.0};  ///< trapezoid prefix of e^{-iws} f(s)
    std::complex<double> b{0.0, 0.0};  ///< trapezoid prefix of e^{+iws} f(s)
    std::size_t panels = 0;            ///< completed trapezoid panels

    void reset() {
        a = b = {0.0, 0.0};
        panels = 0;
    }
};

/// Evaluates integral_0^t sin(w (t - s)) f(s) ds by trapezoidal quadrature
/// over the sampled prefix f(0), f(dt), ..., f(t), with t the time of the
/// last sample.
///
/// Naive recomputes the full sum each call: O(n) per call. Incremental
/// requires an accumulator; it appends any panels the accumulator has not
/// seen (one per step when fed every step) and evaluates in O(1). Throws
/// HistorySyncError if the accumulator is ahead of the signal.
double memory_convolution(std::span<const double> samples, double omega, double dt,
                          ConvolutionMethod method, ConvolutionAccumulator* acc = nullptr);

/// Complex-signal variant; real and imaginary parts convolve independently.
Complex memory_convolution(std::span<const Complex> samples, double omega, double dt,
                           ConvolutionMethod method, ConvolutionAccumulator* acc = nullptr);

/// Per-mode record of the interaction signal V(p(s), x(s)) along a
/// trajectory, sampled on the integration grid. Samples of the
/// position-linear coupling are pure imaginary by construction.
class HistoryBuffer {
public:
    explicit HistoryBuffer(std::size_t n_modes) : samples_(n_modes) {}

    std::size_t n_modes() const { return samples_.size(); }

    /// Number of completed steps; each mode holds steps() + 1 samples once
    /// the initial record is in place.
    std::size_t steps() const { return samples_.empty() || samples_[0].empty() ? 0 : samples_[0].size() - 1; }

    void append(std::span<const Complex> values);

    /// Overwrites the most recent record (corrector pass of a
    /// predictor-corrector step).
    void replace_last(std::span<const Complex> values);

    std::span<const Complex> mode(std::size_t m) const { return samples_[m]; }

private:
    std::vector<std::vector<Complex>> samples_;
};

/// Timing row of the convolution strategy benchmark at one history length.
struct ConvolutionBenchRow {
    std::size_t n_steps = 0;
    double naive_per_step_seconds = 0.0;        ///< one full-history call at length n
    double incremental_per_step_seconds = 0.0;  ///< one panel append + evaluation
    double max_rel_difference = 0.0;            ///< cross-method agreement on the signal
};

/// Times both strategies on a deterministic random smooth signal per step
/// count and cross-checks their results. Medians over `repeats` runs.
std::vector<ConvolutionBenchRow> benchmark_convolution(const std::vector<std::size_t>& step_counts,
                                                       int repeats = 5, double omega = 1.0,
                                                       double dt = 1e-3);

}  // namespace nmgle
