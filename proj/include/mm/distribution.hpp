#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "mm/common.hpp"
#include "mm/rng.hpp"

namespace mm {

struct PointMass {
    double value = 0.0;
    bool operator==(const PointMass&) const = default;
};

struct FiniteSupport {
    // (value, probability) pairs; probabilities sum to 1 within kProbTol.
    std::vector<std::pair<double, double>> atoms;
    bool operator==(const FiniteSupport&) const = default;
};

struct UniformReal {
    double lo = 0.0;
    double hi = 1.0;
    bool operator==(const UniformReal&) const = default;
};

inline constexpr double kProbTol = 1e-12;

/// A one-dimensional valuation distribution. Deliberately small: point
/// masses, finite supports, and uniform intervals cover every scenario in
/// scope and keep strike-price solving exact or bisectable.
class Distribution {
public:
    Distribution() : rep_(PointMass{0.0}) {}
    Distribution(PointMass p) : rep_(p) {}
    Distribution(FiniteSupport f) : rep_(std::move(f)) {}
    Distribution(UniformReal u) : rep_(u) {}

    static Distribution point(double v) { return Distribution(PointMass{v}); }
    static Distribution finite(std::vector<std::pair<double, double>> atoms) {
        return Distribution(FiniteSupport{std::move(atoms)});
    }
    static Distribution uniform(double lo, double hi) { return Distribution(UniformReal{lo, hi}); }

    const PointMass* as_point() const { return std::get_if<PointMass>(&rep_); }
    const FiniteSupport* as_finite() const { return std::get_if<FiniteSupport>(&rep_); }
    const UniformReal* as_uniform() const { return std::get_if<UniformReal>(&rep_); }

    double mean() const;
    /// Essential maximum of the support.
    double max_support() const;
    double min_support() const;

    /// E[(v - threshold)^+].
    double expected_excess(double threshold) const;

    /// Inverse-CDF sample driven by one uniform draw from rng.
    double sample(Rng& rng) const;

    /// Probabilities sum to one (finite supports) and lo <= hi (uniform).
    bool well_formed(std::string* why = nullptr) const;

    bool operator==(const Distribution& other) const { return rep_ == other.rep_; }

private:
    std::variant<PointMass, FiniteSupport, UniformReal> rep_;
};

}  // namespace mm
