#pragma once

#include <cmath>
#include <cstdint>

#include "efld/errors.hpp"

namespace efld {

// Positive scalar schedules indexed by step; step-decay follows the
// "decay by r every k epochs" convention.
struct Schedule {
    enum class Kind { constant, step_decay, inverse_sqrt };

    Kind kind = Kind::constant;
    double base = 1.0;
    double rate = 1.0;
    int every_epochs = 1;

    static Schedule constant(double b) { return {Kind::constant, b, 1.0, 1}; }
    static Schedule step_decay(double b, double r, int every) {
        return {Kind::step_decay, b, r, every};
    }
    static Schedule inverse_sqrt(double b) { return {Kind::inverse_sqrt, b, 1.0, 1}; }

    double at(std::int64_t t, std::int64_t steps_per_epoch) const {
        double v = base;
        switch (kind) {
            case Kind::constant:
                break;
            case Kind::step_decay: {
                const std::int64_t epoch = steps_per_epoch > 0 ? t / steps_per_epoch : 0;
                v = base * std::pow(rate, static_cast<double>(epoch / every_epochs));
                break;
            }
            case Kind::inverse_sqrt:
                v = base / std::sqrt(static_cast<double>(t + 1));
                break;
        }
        if (!(v > 0.0)) throw config_error("schedule: evaluated to non-positive value");
        return v;
    }
};

}  // namespace efld
