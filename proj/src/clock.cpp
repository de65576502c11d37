#include "mm/clock.hpp"

#include <algorithm>
#include <cmath>

namespace mm {

double PriceSchedule::price_at_time(double t) const {
    if (t < 0.0 || t > 1.0) throw Fault("price_at_time: t outside [0, 1]");
    double p;
    if (t == 0.0) {
        if (!p_max_) throw Fault("price_at_time: infinite price at t = 0 without pMax");
        return *p_max_;
    }
    if (t <= 0.5)
        p = 1.0 / (2.0 * t);
    else
        p = 2.0 - 2.0 * t;
    if (p_max_) p = std::min(p, *p_max_);
    return p;
}

double PriceSchedule::time_at_price(double p) const {
    if (p < 0.0) throw Fault("time_at_price: negative price");
    if (p_max_) p = std::min(p, *p_max_);
    if (p <= 1.0) return (2.0 - p) / 2.0;
    return 1.0 / (2.0 * p);
}

double clock_convert_to_price(const PriceSchedule& sched, double t) {
    return sched.price_at_time(t);
}

double clock_convert_to_time(const PriceSchedule& sched, double p) {
    return sched.time_at_price(p);
}

}  // namespace mm
