#include "mm/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mm {

double RunningStat::stderr_mean() const { return n > 0 ? std::sqrt(variance() / n) : 0.0; }

double Distribution::mean() const {
    if (auto* p = as_point()) return p->value;
    if (auto* u = as_uniform()) return 0.5 * (u->lo + u->hi);
    double m = 0.0;
    for (const auto& [v, prob] : as_finite()->atoms) m += v * prob;
    return m;
}

double Distribution::max_support() const {
    if (auto* p = as_point()) return p->value;
    if (auto* u = as_uniform()) return u->hi;
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& [v, prob] : as_finite()->atoms)
        if (prob > 0.0) m = std::max(m, v);
    return m;
}

double Distribution::min_support() const {
    if (auto* p = as_point()) return p->value;
    if (auto* u = as_uniform()) return u->lo;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [v, prob] : as_finite()->atoms)
        if (prob > 0.0) m = std::min(m, v);
    return m;
}

double Distribution::expected_excess(double threshold) const {
    if (auto* p = as_point()) return std::max(p->value - threshold, 0.0);
    if (auto* u = as_uniform()) {
        if (threshold >= u->hi) return 0.0;
        if (threshold <= u->lo) return mean() - threshold;
        double width = u->hi - u->lo;
        double over = u->hi - threshold;
        return over * over / (2.0 * width);
    }
    double e = 0.0;
    for (const auto& [v, prob] : as_finite()->atoms) e += prob * std::max(v - threshold, 0.0);
    return e;
}

double Distribution::sample(Rng& rng) const {
    if (auto* p = as_point()) return p->value;
    double u = rng.next_double();
    if (auto* un = as_uniform()) return un->lo + u * (un->hi - un->lo);
    // Inverse CDF over the atoms in listed order.
    double acc = 0.0;
    const auto& atoms = as_finite()->atoms;
    for (const auto& [v, prob] : atoms) {
        acc += prob;
        if (u < acc) return v;
    }
    return atoms.empty() ? 0.0 : atoms.back().first;
}

bool Distribution::well_formed(std::string* why) const {
    if (as_point()) return true;
    if (auto* u = as_uniform()) {
        if (!(u->lo <= u->hi)) {
            if (why) *why = "uniform requires lo <= hi";
            return false;
        }
        return true;
    }
    const auto& atoms = as_finite()->atoms;
    if (atoms.empty()) {
        if (why) *why = "finite support is empty";
        return false;
    }
    double total = 0.0;
    for (const auto& [v, prob] : atoms) {
        (void)v;
        if (prob < 0.0) {
            if (why) *why = "negative probability";
            return false;
        }
        total += prob;
    }
    if (std::abs(total - 1.0) > kProbTol) {
        if (why) *why = "probabilities sum to " + std::to_string(total);
        return false;
    }
    return true;
}

}  // namespace mm
