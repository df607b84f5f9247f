#include "volterra/signals.hpp"

#include <stdexcept>
#include <utility>

namespace volterra {

StepSignal::StepSignal(std::vector<StepTerm> terms) : terms_(std::move(terms)) {
    double prev = 0.0;
    bool first = true;
    for (const StepTerm& term : terms_) {
        if (term.shift < 0.0) {
            throw std::invalid_argument("StepSignal: shifts must be nonnegative");
        }
        if (!first && term.shift < prev) {
            throw std::invalid_argument("StepSignal: shifts must be nondecreasing in storage order");
        }
        prev = term.shift;
        first = false;
    }
}

StepSignal StepSignal::pulse(double start, double width) {
    if (start < 0.0) throw std::invalid_argument("StepSignal::pulse: start must be >= 0");
    if (!(width > 0.0)) throw std::invalid_argument("StepSignal::pulse: width must be > 0");
    return StepSignal({{+1.0, start}, {-1.0, start + width}});
}

double StepSignal::operator()(double t) const noexcept {
    double sum = 0.0;
    for (const StepTerm& term : terms_) {
        sum += term.weight * heaviside(t - term.shift);
    }
    return sum;
}

TestPair make_test_pair(Series series, double h, double upsilon) {
    if (!(h > 0.0)) throw std::invalid_argument("make_test_pair: h must be > 0");
    if (upsilon < 0.0) throw std::invalid_argument("make_test_pair: upsilon must be >= 0");
    StepSignal anchored = StepSignal::pulse(0.0, h);
    StepSignal delayed = StepSignal::pulse(upsilon, h);
    if (series == Series::One) {
        return TestPair{series, std::move(anchored), std::move(delayed), h, upsilon};
    }
    return TestPair{series, std::move(delayed), std::move(anchored), h, upsilon};
}

double eval_signal(const StepSignal& sig, double t) noexcept {
    return sig(t);
}

} // namespace volterra
