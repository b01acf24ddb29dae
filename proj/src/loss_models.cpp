#include "gccm/loss_models.hpp"

#include <cmath>

namespace gccm {

namespace {

void check_finite(double h) {
    if (!std::isfinite(h))
        throw std::domain_error("loss argument h is not finite");
}

[[noreturn]] void zero_one_derivative() {
    throw UnsupportedLossOperation(
        "zero_one loss has no derivatives; use solve_inner_zero_one (closed "
        "form) or the smoothed_zero_one family");
}

}  // namespace

LossSpec make_loss(const std::string& name, double gamma) {
    LossSpec spec;
    if (name == "zero_one") spec.family = LossFamily::zero_one;
    else if (name == "smoothed_zero_one") spec.family = LossFamily::smoothed_zero_one;
    else if (name == "ce_logistic") spec.family = LossFamily::ce_logistic;
    else if (name == "hinge") spec.family = LossFamily::hinge;
    else if (name == "exponential") spec.family = LossFamily::exponential;
    else
        throw std::invalid_argument(
            "unknown loss \"" + name +
            "\"; expected one of zero_one, smoothed_zero_one, ce_logistic, "
            "hinge, exponential");
    spec.gamma = gamma;
    if (spec.family == LossFamily::smoothed_zero_one && !(gamma > 0.0))
        throw std::invalid_argument("smoothed_zero_one requires gamma > 0");
    return spec;
}

std::string loss_name(const LossSpec& loss) {
    switch (loss.family) {
        case LossFamily::zero_one: return "zero_one";
        case LossFamily::smoothed_zero_one: return "smoothed_zero_one";
        case LossFamily::ce_logistic: return "ce_logistic";
        case LossFamily::hinge: return "hinge";
        case LossFamily::exponential: return "exponential";
    }
    return "?";
}

double loss_value(const LossSpec& loss, double h) {
    check_finite(h);
    switch (loss.family) {
        case LossFamily::zero_one:
            return h > 0.0 ? 0.0 : (h < 0.0 ? 1.0 : 0.5);
        case LossFamily::smoothed_zero_one:
            return 0.5 * (1.0 - std::tanh(loss.gamma * h));
        case LossFamily::ce_logistic:
            // log(1 + e^{-2h}), written to avoid overflow on either tail.
            return h >= 0.0 ? std::log1p(std::exp(-2.0 * h))
                            : -2.0 * h + std::log1p(std::exp(2.0 * h));
        case LossFamily::hinge:
            return h < 1.0 ? 1.0 - h : 0.0;
        case LossFamily::exponential:
            return std::exp(-h);
    }
    return 0.0;
}

double loss_grad(const LossSpec& loss, double h) {
    check_finite(h);
    switch (loss.family) {
        case LossFamily::zero_one:
            zero_one_derivative();
        case LossFamily::smoothed_zero_one: {
            const double c = std::cosh(loss.gamma * h);  // overflows to +inf, sech -> 0
            const double sech = 1.0 / c;
            return 0.5 * loss.gamma * sech * sech;
        }
        case LossFamily::ce_logistic:
            return 1.0 - std::tanh(h);
        case LossFamily::hinge:
            return h < 1.0 ? 1.0 : 0.0;  // convention g(1) = 0 at the kink
        case LossFamily::exponential:
            return std::exp(-h);
    }
    return 0.0;
}

double loss_grad2(const LossSpec& loss, double h) {
    check_finite(h);
    switch (loss.family) {
        case LossFamily::zero_one:
            zero_one_derivative();
        case LossFamily::smoothed_zero_one: {
            const double g = loss.gamma;
            const double sech = 1.0 / std::cosh(g * h);
            return -g * g * sech * sech * std::tanh(g * h);
        }
        case LossFamily::ce_logistic: {
            const double sech = 1.0 / std::cosh(h);
            return -sech * sech;
        }
        case LossFamily::hinge:
            return 0.0;
        case LossFamily::exponential:
            return -std::exp(-h);
    }
    return 0.0;
}

}  // namespace gccm
