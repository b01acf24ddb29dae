#pragma once

#include <stdexcept>
#include <string>

namespace gccm {

// Margin-based losses ell(h), h = y * (w.x / sqrt(N) + b). All losses here
// are functions of the margin alone, so the two-argument form ell(h, y) is
// ell(y*h) by convention.
enum class LossFamily {
    zero_one,           // step loss: 1_{h<0} (+ 1/2 at h = 0)
    smoothed_zero_one,  // (1 - tanh(gamma*h)) / 2, gamma > 0
    ce_logistic,        // log(1 + exp(-2h)) = -h + log(2 cosh h)
    hinge,              // max(0, 1 - h)
    exponential,        // exp(-h)
};

struct LossSpec {
    LossFamily family = LossFamily::ce_logistic;
    double gamma = 1.0;  // smoothing sharpness; only smoothed_zero_one uses it
};

// Raised when derivatives of a non-differentiable loss are requested.
struct UnsupportedLossOperation : std::logic_error {
    using std::logic_error::logic_error;
};

// Config-string round trip. Accepted names: "zero_one", "smoothed_zero_one",
// "ce_logistic", "hinge", "exponential". Unknown names and non-positive gamma
// for smoothed_zero_one throw std::invalid_argument.
LossSpec make_loss(const std::string& name, double gamma = 1.0);
std::string loss_name(const LossSpec& loss);

// ell(h). Non-finite h throws std::domain_error.
double loss_value(const LossSpec& loss, double h);
inline double loss_value(const LossSpec& loss, double h, int y) {
    return loss_value(loss, y >= 0 ? h : -h);
}

// g(h) = -ell'(h) (the "force"; nonnegative for every family here) and
// g'(h) = -ell''(h). zero_one throws UnsupportedLossOperation with a pointer
// to the dedicated closed-form inner solver.
double loss_grad(const LossSpec& loss, double h);
double loss_grad2(const LossSpec& loss, double h);

inline bool loss_differentiable(const LossSpec& loss) {
    return loss.family != LossFamily::zero_one;
}

// True for losses whose ell is convex in h (=> the single-sample variational
// problem is strictly concave and has a unique interior optimum).
inline bool loss_convex(const LossSpec& loss) {
    switch (loss.family) {
        case LossFamily::ce_logistic:
        case LossFamily::hinge:
        case LossFamily::exponential: return true;
        default: return false;
    }
}

}  // namespace gccm
