#include <doctest.h>

#include <cmath>
#include <random>

#include "gbh/weights_oracle.hpp"
#include "test_util.hpp"

using namespace gbh;

namespace {

// Masks for which the identity is an equality: every row and column holds
// both nulls and non-nulls, and on multi-member cells every cell holds a null.
std::vector<bool> proper_mask(std::mt19937_64& rng, const Layout& l, double null_prob) {
    while (true) {
        auto mask = testing::random_mask(rng, l.size(), null_prob);
        if (l.kind() == LayoutKind::TwoWayCells) {
            std::vector<std::vector<std::size_t>> members(l.cell_count());
            for (std::size_t i = 0; i < l.size(); ++i) members[l.cell_of(i)].push_back(i);
            for (const auto& cell : members) {
                bool any = false;
                for (auto i : cell) any = any || mask[i];
                if (!any) mask[cell[rng() % cell.size()]] = true;
            }
        }
        const auto props = null_proportions(TruthMask(l, mask));
        bool ok = true;
        for (double r : props.rows) ok = ok && r > 0.0 && r < 1.0;
        for (double c : props.cols) ok = ok && c > 0.0 && c < 1.0;
        if (ok) return mask;
    }
}

}  // namespace

TEST_CASE("component weight limits") {
    CHECK(oracle_component_weight(0.2, 0.5) == doctest::Approx(0.125));
    CHECK(oracle_component_weight(0.8, 0.5) == doctest::Approx(2.0));
    CHECK(oracle_component_weight(1.0, 0.5) == kInf);
    CHECK(oracle_component_weight(1.0, 1.0) == kInf);
    CHECK(oracle_component_weight(0.0, 0.5) == 0.0);
}

TEST_CASE("one-way: two equal groups") {
    const Layout l = Layout::one_way({10, 10});
    ProportionTable props;
    props.rows = {0.2, 0.8};
    props.overall = 0.5;
    const auto w = oneway_oracle_weights(props, l);
    CHECK(w[0] == doctest::Approx(0.125));
    CHECK(w[19] == doctest::Approx(2.0));
    std::vector<bool> mask(20, false);
    for (std::size_t i = 0; i < 2; ++i) mask[i] = true;
    for (std::size_t i = 10; i < 18; ++i) mask[i] = true;
    CHECK(std::abs(verify_weight_identity(w, TruthMask(l, mask))) < 1e-12);
}

TEST_CASE("one-way: equal proportions give the single-group weight") {
    const Layout l = Layout::one_way({3, 4, 5});
    ProportionTable props;
    props.rows = {0.3, 0.3, 0.3};
    props.overall = 0.3;
    const auto w = oneway_oracle_weights(props, l);
    for (std::size_t i = 0; i < l.size(); ++i) CHECK(w[i] == doctest::Approx(0.3));
}

TEST_CASE("one-way: fully null group is never rejected") {
    ProportionTable props;
    props.rows = {1.0, 0.2};
    props.overall = 0.6;
    const auto w = oneway_oracle_weights(props, Layout::one_way({5, 5}));
    CHECK(w[0] == kInf);
}

TEST_CASE("two-way one per cell: hand example") {
    const Layout l = Layout::two_way_one_per_cell(1, 1);
    ProportionTable props;
    props.rows = {0.5};
    props.cols = {0.25};
    props.overall = 0.375;
    CHECK(oracle_component_weight(0.5, 0.375) == doctest::Approx(0.625));
    CHECK(oracle_component_weight(0.25, 0.375) == doctest::Approx(0.208333333333));
    const auto w = twoway_oneper_oracle_weights(props, l, OracleVariant::TwoWayOnePerEqual);
    CHECK(w[0] == doctest::Approx(0.3125).epsilon(1e-12));
}

TEST_CASE("two-way one per cell: collapse and m = n") {
    std::mt19937_64 rng(5);
    const Layout l = Layout::two_way_one_per_cell(4, 4);
    ProportionTable eq;
    eq.rows.assign(4, 0.4);
    eq.cols.assign(4, 0.4);
    eq.overall = 0.4;
    const auto w = twoway_oneper_oracle_weights(eq, l, OracleVariant::TwoWayOnePerEqual);
    for (std::size_t i = 0; i < l.size(); ++i) CHECK(w[i] == doctest::Approx(0.4));

    for (int t = 0; t < 50; ++t) {
        const auto props = null_proportions(TruthMask(l, proper_mask(rng, l, 0.5)));
        const auto a = twoway_oneper_oracle_weights(props, l, OracleVariant::TwoWayOnePerEqual);
        const auto b = twoway_oneper_oracle_weights(props, l, OracleVariant::TwoWayOnePerSizeAdjusted);
        for (std::size_t i = 0; i < l.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("cells: symmetric proportions") {
    const Layout l = Layout::two_way_cells(2, 3, std::vector<std::size_t>(6, 4));
    ProportionTable props;
    props.rows.assign(2, 0.35);
    props.cols.assign(3, 0.35);
    props.cells.assign(6, 0.35);
    props.overall = 0.35;
    for (auto v : {OracleVariant::TwoWayCellsFourTerm, OracleVariant::TwoWayCellsTwoTerm,
                   OracleVariant::TwoWayCellsEqualSizeA, OracleVariant::TwoWayCellsEqualSizeB}) {
        const auto w = twoway_cells_oracle_weights(props, l, v);
        for (std::size_t i = 0; i < l.size(); ++i) CHECK(w[i] == doctest::Approx(0.35));
    }
}

TEST_CASE("cells: fully null cell") {
    const Layout l = Layout::two_way_cells(1, 1, {3});
    ProportionTable props;
    props.rows = {0.5};
    props.cols = {0.5};
    props.cells = {1.0};
    props.overall = 0.5;
    // Two infinite components; the row and column terms keep the weight finite.
    const auto w = twoway_cells_oracle_weights(props, l, OracleVariant::TwoWayCellsFourTerm);
    CHECK(std::isfinite(w[0]));
    CHECK(w[0] == doctest::Approx(1.0));
    props.rows = {1.0};
    CHECK(twoway_cells_oracle_weights(props, l, OracleVariant::TwoWayCellsFourTerm)[0] == doctest::Approx(2.0));
    props.cols = {1.0};
    CHECK(twoway_cells_oracle_weights(props, l, OracleVariant::TwoWayCellsFourTerm)[0] == kInf);
}

TEST_CASE("variant and layout checks") {
    ProportionTable props;
    props.rows = {0.5, 0.5};
    props.cols = {0.5, 0.5};
    props.cells = {0.5, 0.5, 0.5, 0.5};
    props.overall = 0.5;
    CHECK_THROWS_AS(oracle_weights(props, Layout::two_way_one_per_cell(2, 2), OracleVariant::OneWay), Error);
    CHECK_THROWS_AS(oracle_weights(props, Layout::two_way_one_per_cell(2, 2), OracleVariant::TwoWayCellsFourTerm),
                    Error);
    try {
        oracle_weights(props, Layout::two_way_cells(2, 2, {1, 2, 2, 2}), OracleVariant::TwoWayCellsEqualSizeA);
        FAIL("expected UnequalCells");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnequalCells);
    }
    props.rows = {1.5, 0.5};
    CHECK_THROWS_AS(oracle_weights(props, Layout::two_way_one_per_cell(2, 2), OracleVariant::TwoWayOnePerEqual),
                    Error);
}

TEST_CASE("weight identity on random masks") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    for (int t = 0; t < 100; ++t) {
        const Layout one = Layout::one_way({3, 9, 5, 2 + rng() % 6});
        const TruthMask m1(one, proper_mask(rng, one, u(rng)));
        CHECK(std::abs(verify_weight_identity(oneway_oracle_weights(null_proportions(m1), one), m1)) <
              1e-9 * one.size());

        const Layout opc = Layout::two_way_one_per_cell(5, 7);
        const TruthMask m2(opc, proper_mask(rng, opc, u(rng)));
        for (auto v : {OracleVariant::TwoWayOnePerEqual, OracleVariant::TwoWayOnePerSizeAdjusted}) {
            CHECK(std::abs(verify_weight_identity(oracle_weights(null_proportions(m2), opc, v), m2)) <
                  1e-9 * opc.size());
        }

        std::vector<std::size_t> sizes(12);
        for (auto& s : sizes) s = 2 + rng() % 4;
        const Layout ragged = Layout::two_way_cells(3, 4, sizes);
        const TruthMask m3(ragged, proper_mask(rng, ragged, u(rng)));
        for (auto v : {OracleVariant::TwoWayCellsFourTerm, OracleVariant::TwoWayCellsTwoTerm}) {
            CHECK(std::abs(verify_weight_identity(oracle_weights(null_proportions(m3), ragged, v), m3)) <
                  1e-9 * ragged.size());
        }

        const Layout even = Layout::two_way_cells(4, 3, std::vector<std::size_t>(12, 3));
        const TruthMask m4(even, proper_mask(rng, even, u(rng)));
        for (auto v : {OracleVariant::TwoWayCellsEqualSizeA, OracleVariant::TwoWayCellsEqualSizeB}) {
            CHECK(std::abs(verify_weight_identity(oracle_weights(null_proportions(m4), even, v), m4)) <
                  1e-9 * even.size());
        }
    }
}

TEST_CASE("identity is an upper bound on arbitrary masks") {
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const Layout l = testing::random_layout(rng, 60);
        const TruthMask mask(l, testing::random_mask(rng, l.size(), u(rng)));
        std::vector<OracleVariant> variants;
        switch (l.kind()) {
            case LayoutKind::OneWay: variants = {OracleVariant::OneWay}; break;
            case LayoutKind::TwoWayOnePerCell:
                variants = {OracleVariant::TwoWayOnePerEqual, OracleVariant::TwoWayOnePerSizeAdjusted};
                break;
            case LayoutKind::TwoWayCells:
                variants = {OracleVariant::TwoWayCellsFourTerm, OracleVariant::TwoWayCellsTwoTerm};
                break;
        }
        for (auto v : variants) {
            CHECK(verify_weight_identity(oracle_weights(null_proportions(mask), l, v), mask) <= 1e-9 * l.size());
        }
    }
}

TEST_CASE("unit weights under all-null truth") {
    const Layout l = Layout::one_way({6});
    CHECK(verify_weight_identity(WeightAssignment::uniform(l, 1.0), TruthMask(l, std::vector<bool>(6, true))) ==
          0.0);
}
