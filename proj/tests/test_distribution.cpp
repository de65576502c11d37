#include <doctest.h>

#include "mm/distribution.hpp"

using namespace mm;

TEST_CASE("moments of the three distribution kinds") {
    CHECK(Distribution::point(5.0).mean() == 5.0);
    CHECK(Distribution::uniform(0.0, 1.0).mean() == 0.5);
    Distribution binary = Distribution::finite({{0.0, 0.5}, {10.0, 0.5}});
    CHECK(binary.mean() == 5.0);
    CHECK(binary.max_support() == 10.0);
    CHECK(binary.min_support() == 0.0);
    CHECK(Distribution::uniform(2.0, 6.0).max_support() == 6.0);
}

TEST_CASE("expected excess value") {
    Distribution binary = Distribution::finite({{0.0, 0.5}, {10.0, 0.5}});
    CHECK(binary.expected_excess(8.0) == doctest::Approx(1.0));
    CHECK(binary.expected_excess(10.0) == 0.0);
    CHECK(binary.expected_excess(0.0) == doctest::Approx(5.0));
    Distribution u = Distribution::uniform(0.0, 1.0);
    CHECK(u.expected_excess(0.5) == doctest::Approx(0.125));
    CHECK(u.expected_excess(-1.0) == doctest::Approx(1.5));
    CHECK(Distribution::point(5.0).expected_excess(4.0) == 1.0);
}

TEST_CASE("inverse-CDF sampling hits the support with the right frequencies") {
    Distribution binary = Distribution::finite({{0.0, 0.5}, {10.0, 0.5}});
    Rng rng(7);
    int tens = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        double v = binary.sample(rng);
        CHECK((v == 0.0 || v == 10.0));
        if (v == 10.0) ++tens;
    }
    CHECK(std::abs(tens / double(n) - 0.5) < 0.02);

    Distribution u = Distribution::uniform(2.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        double v = u.sample(rng);
        CHECK(v >= 2.0);
        CHECK(v < 4.0);
    }
    CHECK(Distribution::point(3.0).sample(rng) == 3.0);
}

TEST_CASE("well-formedness checks") {
    std::string why;
    CHECK(Distribution::finite({{0.0, 0.5}, {10.0, 0.5}}).well_formed());
    CHECK_FALSE(Distribution::finite({{0.0, 0.5}, {10.0, 0.6}}).well_formed(&why));
    CHECK_FALSE(Distribution::finite({}).well_formed(&why));
    CHECK_FALSE(Distribution::finite({{1.0, 1.5}, {2.0, -0.5}}).well_formed(&why));
    CHECK_FALSE(Distribution::uniform(3.0, 1.0).well_formed(&why));
    // Tolerance admits human-authored decimals.
    CHECK(Distribution::finite({{1.0, 0.1}, {2.0, 0.9}}).well_formed());
}

TEST_CASE("sampling is a pure function of the rng stream") {
    Distribution d = Distribution::finite({{1.0, 0.25}, {2.0, 0.25}, {3.0, 0.5}});
    Rng a(42), b(42);
    for (int i = 0; i < 50; ++i) CHECK(d.sample(a) == d.sample(b));
}
