#pragma once

// ============================================================================
// Pulse test signals: finite weighted sums of shifted Heaviside steps.
//
// The identification experiment drives the two input channels with unit
// pulses of width h (a difference of two shifted Heaviside steps).  Two
// series of test pairs exist:
//   - series 1 keeps channel 1's pulse at [0, h) and delays channel 2's
//     pulse to [upsilon, upsilon + h);
//   - series 2 swaps the channel roles.
// Scanning upsilon through [0, T - h] probes the kernel on both sides of
// its diagonal.
// ============================================================================

#include <vector>

namespace volterra {

/// Heaviside unit step with the right-continuous convention e(0) = 1.
/// The convention only matters on a measure-zero set inside the response
/// integrals; right continuity makes every pulse half-open [a, a + h).
[[nodiscard]] constexpr double heaviside(double t) noexcept {
    return t < 0.0 ? 0.0 : 1.0;
}

/// One weighted, shifted step term: t -> weight * e(t - shift).
struct StepTerm {
    double weight = 0.0;
    double shift = 0.0; ///< >= 0
};

/// A finite sum of weighted, shifted Heaviside steps.
///
/// Invariants enforced at construction: shifts are nonnegative and
/// nondecreasing in storage order.  Immutable afterwards, so instances are
/// freely shareable between threads.
class StepSignal {
public:
    /// Throws std::invalid_argument when a shift is negative or the shifts
    /// are not nondecreasing.
    explicit StepSignal(std::vector<StepTerm> terms);

    /// Unit pulse on [start, start + width): terms (+1, start), (-1, start + width).
    /// Throws std::invalid_argument for start < 0 or width <= 0.
    [[nodiscard]] static StepSignal pulse(double start, double width);

    [[nodiscard]] const std::vector<StepTerm>& terms() const noexcept { return terms_; }

    /// Signal value at time t.
    [[nodiscard]] double operator()(double t) const noexcept;

private:
    std::vector<StepTerm> terms_;
};

/// Which test-signal series a pair belongs to.
enum class Series { One = 1, Two = 2 };

/// A two-channel test input.  One channel carries the anchored pulse [0, h),
/// the other the delayed pulse [upsilon, upsilon + h); `series` records which
/// channel is delayed.  upsilon <= t - h is a constraint on where responses
/// are evaluated, not on construction.
struct TestPair {
    Series series;
    StepSignal x1;
    StepSignal x2;
    double h;
    double upsilon;
};

/// Build the test pair for one series.
/// Throws std::invalid_argument for h <= 0 or upsilon < 0.
[[nodiscard]] TestPair make_test_pair(Series series, double h, double upsilon);

/// Evaluate a step signal at time t (free-function form of operator()).
[[nodiscard]] double eval_signal(const StepSignal& sig, double t) noexcept;

} // namespace volterra
