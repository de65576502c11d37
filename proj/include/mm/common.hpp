#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mm {

using AgentId = std::string;

/// Index into MarketGraph::groups.
using GroupRef = int;

/// One (agent, group) membership slot.
struct Incidence {
    AgentId agent;
    GroupRef group = -1;

    friend bool operator<(const Incidence& a, const Incidence& b) {
        if (a.agent != b.agent) return a.agent < b.agent;
        return a.group < b.group;
    }
    friend bool operator==(const Incidence& a, const Incidence& b) {
        return a.agent == b.agent && a.group == b.group;
    }
};

enum class Side { Bidder, Asker };

/// Hard contract violations (bad inputs, exceeded budgets). Recoverable data
/// problems are reported as values, not thrown.
class Fault : public std::runtime_error {
public:
    explicit Fault(const std::string& what) : std::runtime_error(what) {}
};

/// Mean/stderr accumulator for Monte Carlo loops.
struct RunningStat {
    double sum = 0.0;
    double sumsq = 0.0;
    long n = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        double m = mean();
        double v = sumsq / n - m * m;
        return v > 0.0 ? v * n / (n - 1) : 0.0;
    }
    double stderr_mean() const;
};

}  // namespace mm
