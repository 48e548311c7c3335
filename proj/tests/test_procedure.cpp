#include <doctest.h>

#include <random>

#include "gbh/procedure.hpp"
#include "gbh/stepup.hpp"
#include "test_util.hpp"

using namespace gbh;

TEST_CASE("labels") {
    CHECK(ProcedureSpec::plain_bh().label() == "plain_bh");
    CHECK(ProcedureSpec::naive_adaptive_bh(0.5).label() == "naive_adaptive_bh");
    CHECK(ProcedureSpec::oracle_gbh(OracleVariant::TwoWayOnePerEqual).label() == "oracle_gbh:twoway_oneper");
    CHECK(ProcedureSpec::adaptive_gbh(AdaptiveVariant::OneWay, 0.5).label() == "adaptive_gbh:oneway");
    CHECK(ProcedureSpec::lsl_gbh().label() == "lsl_gbh");
    CHECK(ProcedureSpec::tst_gbh().label() == "tst_gbh");
}

TEST_CASE("one group adaptive equals naive adaptive") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + rng() % 150;
        const PValueSet p(Layout::one_way({n}), testing::random_pvalues(rng, n));
        CHECK(run_procedure(p, ProcedureSpec::adaptive_gbh(AdaptiveVariant::OneWay, 0.5), 0.05) ==
              run_procedure(p, ProcedureSpec::naive_adaptive_bh(0.5), 0.05));
    }
}

TEST_CASE("plain BH matches unit weights") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const Layout l = testing::random_layout(rng);
        const PValueSet p(l, testing::random_pvalues(rng, l.size()));
        CHECK(run_procedure(p, ProcedureSpec::plain_bh(), 0.1) ==
              weighted_bh(p, WeightAssignment::uniform(l, 1.0), StepUpConfig(0.1)));
    }
}

TEST_CASE("oracle with flat proportions is uniform weighting") {
    std::mt19937_64 rng(14);
    const Layout l = Layout::one_way({5, 8, 3});
    ProportionTable props;
    props.rows = {0.4, 0.4, 0.4};
    props.overall = 0.4;
    for (int t = 0; t < 50; ++t) {
        const PValueSet p(l, testing::random_pvalues(rng, l.size()));
        CHECK(run_procedure(p, ProcedureSpec::oracle_gbh(OracleVariant::OneWay, props), 0.05) ==
              weighted_bh(p, WeightAssignment::uniform(l, 0.4), StepUpConfig(0.05)));
    }
}

TEST_CASE("oracle needs proportions") {
    const PValueSet p(Layout::one_way({2}), {0.1, 0.2});
    try {
        run_procedure(p, ProcedureSpec::oracle_gbh(OracleVariant::OneWay), 0.05);
        FAIL("expected InvalidConfig");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidConfig);
    }
}

TEST_CASE("least-slope with an all-null estimate rejects only zeros") {
    const PValueSet p(Layout::one_way({3}), {0.0, 0.2, 0.9});
    REQUIRE(lsl_pi0(p.values()) == 1.0);
    const auto w = procedure_weights(p, ProcedureSpec::lsl_gbh(), 0.05);
    for (std::size_t i = 0; i < 3; ++i) CHECK(w[i] == kInf);
    const auto rej = run_procedure(p, ProcedureSpec::lsl_gbh(), 0.05);
    CHECK(rej.rejected() == std::vector<bool>{true, false, false});
}

TEST_CASE("plug-in group weights") {
    const Layout l = Layout::one_way({4, 4});
    const auto w = plugin_group_weights(l, {0.2, 0.8});
    CHECK(w[0] == doctest::Approx(0.125));
    CHECK(w[7] == doctest::Approx(2.0));
    CHECK_THROWS_AS(plugin_group_weights(l, {0.2}), Error);
}

TEST_CASE("two-stage groups by row on two-way layouts") {
    const Layout l = Layout::two_way_one_per_cell(2, 4);
    const PValueSet p(l, {0.001, 0.002, 0.9, 0.95, 0.5, 0.6, 0.7, 0.8});
    const auto w = procedure_weights(p, ProcedureSpec::tst_gbh(), 0.05);
    // Row 0 estimate 0.5, row 1 estimate 1, overall 0.75.
    CHECK(w[0] == doctest::Approx(0.5 * 0.25 / 0.5));
    CHECK(w[4] == kInf);
}

TEST_CASE("naive adaptive uses the Storey estimate") {
    const PValueSet p(Layout::one_way({10}), {0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0});
    const auto w = procedure_weights(p, ProcedureSpec::naive_adaptive_bh(0.5), 0.05);
    CHECK(w[3] == doctest::Approx(1.4));
}
