#include <doctest.h>

#include <random>

#include "gbh/stepup.hpp"
#include "test_util.hpp"

using namespace gbh;

TEST_CASE("hand example: unit weights") {
    const Layout l = Layout::one_way({4});
    const PValueSet p(l, {0.01, 0.02, 0.3, 0.9});
    const auto rej = weighted_bh(p, WeightAssignment::uniform(l, 1.0), StepUpConfig(0.05));
    CHECK(rej.threshold_index() == 2);
    CHECK(rej.rejected() == std::vector<bool>{true, true, false, false});
    CHECK(critical_constant(1, 0.05, 4) == doctest::Approx(0.0125));
    CHECK(critical_constant(3, 0.05, 4) == doctest::Approx(0.0375));
    CHECK(plain_bh(p, StepUpConfig(0.05)) == rej);
    CHECK(stepup_reference(p, WeightAssignment::uniform(l, 1.0), StepUpConfig(0.05)) == rej);
}

TEST_CASE("hand example: unequal weights") {
    const Layout l = Layout::one_way({2});
    const PValueSet p(l, {0.04, 0.02});
    const WeightAssignment w(l, {0.5, 2.0});
    const auto rej = weighted_bh(p, w, StepUpConfig(0.05));
    CHECK(rej.threshold_index() == 2);
    CHECK(stepup_reference(p, w, StepUpConfig(0.05)) == rej);
}

TEST_CASE("all p-values one rejects nothing") {
    std::mt19937_64 rng(3);
    for (double alpha : {0.01, 0.5, 0.99}) {
        const Layout l = Layout::one_way({7});
        const PValueSet p(l, std::vector<double>(7, 1.0));
        const auto w = WeightAssignment(l, testing::random_weights(rng, 7));
        std::vector<double> wf(7);
        for (std::size_t i = 0; i < 7; ++i) wf[i] = w[i] == 0.0 ? 1.0 : w[i];  // w=0 makes 1 into 0
        CHECK(weighted_bh(p, WeightAssignment(l, wf), StepUpConfig(alpha)).threshold_index() == 0);
    }
}

TEST_CASE("single hypothesis") {
    const Layout l = Layout::one_way({1});
    CHECK(plain_bh(PValueSet(l, {0.04}), StepUpConfig(0.05)).threshold_index() == 1);
    for (auto [pv, expect] : {std::pair{0.0, true}, std::pair{0.025, true}, std::pair{1.0, false}}) {
        const PValueSet p(l, {pv});
        CHECK(stepup_reference(p, WeightAssignment::uniform(l, 1.0), StepUpConfig(0.05)).rejected_at(0) == expect);
        CHECK(plain_bh(p, StepUpConfig(0.05)).rejected_at(0) == expect);
    }
}

TEST_CASE("alpha must be inside (0,1)") {
    for (double a : {0.0, 1.0, -0.1, 1.5}) CHECK_THROWS_AS(StepUpConfig{a}, Error);
}

TEST_CASE("infinite weight only passes p = 0") {
    const Layout l = Layout::one_way({3});
    const PValueSet p(l, {0.0, 1e-12, 0.5});
    const auto rej = weighted_bh(p, WeightAssignment::uniform(l, kInf), StepUpConfig(0.05));
    CHECK(rej.rejected() == std::vector<bool>{true, false, false});
}

TEST_CASE("randomized agreement with reference") {
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> alpha(0.001, 0.3);
    for (int t = 0; t < 2000; ++t) {
        const Layout l = testing::random_layout(rng);
        const PValueSet p(l, testing::random_pvalues(rng, l.size()));
        const WeightAssignment w(l, testing::random_weights(rng, l.size()));
        const StepUpConfig cfg(alpha(rng));
        REQUIRE(weighted_bh(p, w, cfg) == stepup_reference(p, w, cfg));
    }
}

TEST_CASE("monotone in alpha and in p-values") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + rng() % 60;
        std::vector<double> p = testing::random_pvalues(rng, n);
        std::vector<double> w = testing::random_weights(rng, n);
        std::vector<double> wp(n);
        for (std::size_t i = 0; i < n; ++i) wp[i] = weighted_pvalue(w[i], p[i]);
        const auto lo = step_up(wp, 0.02);
        const auto hi = step_up(wp, 0.1);
        CHECK(lo.count <= hi.count);
        for (std::size_t i = 0; i < n; ++i) CHECK((!lo.rejected[i] || hi.rejected[i]));

        // Lowering a rejected p-value keeps it rejected and cannot shrink R.
        const std::size_t k = rng() % n;
        auto lowered = wp;
        lowered[k] *= u(rng);
        const auto after = step_up(lowered, 0.05);
        const auto before = step_up(wp, 0.05);
        CHECK(after.count >= before.count);
        if (before.rejected[k]) CHECK(after.rejected[k]);
    }
}

TEST_CASE("scaling weights is scaling the level") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + rng() % 50;
        auto p = testing::random_pvalues(rng, n);
        std::vector<double> doubled(n);
        for (std::size_t i = 0; i < n; ++i) doubled[i] = 2.0 * p[i];
        CHECK(step_up(doubled, 0.1).rejected == step_up(p, 0.05).rejected);
    }
}
