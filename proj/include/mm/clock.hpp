#pragma once

#include <optional>

#include "mm/common.hpp"

namespace mm {

enum class PaymentRule { PayYourBid, QuarterRebate };

/// Descending clock: the price starts (conceptually) at +infinity, follows
/// p(t) = 1/(2t) on (0, 1/2] and p(t) = 2 - 2t on [1/2, 1], reaching 0 at
/// t = 1. A finite cap pMax truncates the hyperbolic head so t = 0 maps to a
/// usable price. The engine simulates in price space; this class exists to
/// convert match prices to clock times for reporting.
class PriceSchedule {
public:
    PriceSchedule() = default;
    explicit PriceSchedule(double p_max) : p_max_(p_max) {
        if (p_max <= 0.0) throw Fault("PriceSchedule: pMax must be positive");
    }

    std::optional<double> p_max() const { return p_max_; }

    /// Price at clock time t in [0, 1]. Faults at t = 0 without a cap.
    double price_at_time(double t) const;

    /// Clock time at which the price reaches p (>= 0), capped at pMax.
    double time_at_price(double p) const;

private:
    std::optional<double> p_max_;
};

/// price_at_time / time_at_price as one entry point: exactly one of t, p set.
double clock_convert_to_price(const PriceSchedule& sched, double t);
double clock_convert_to_time(const PriceSchedule& sched, double p);

}  // namespace mm
