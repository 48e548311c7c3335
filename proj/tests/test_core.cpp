#include <doctest.h>

#include <random>

#include "gbh/core.hpp"
#include "test_util.hpp"

using namespace gbh;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidConfig;
}

}  // namespace

TEST_CASE("pvalue set validation") {
    const auto ok = make_pvalue_set(Layout::one_way({2, 2}), {0.1, 0.2, 0.3, 0.4});
    CHECK(ok.size() == 4);
    CHECK(code_of([] { make_pvalue_set(Layout::one_way({2}), {0.1, 1.2}); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { make_pvalue_set(Layout::two_way_one_per_cell(2, 3), {0.1, 0.2, 0.3, 0.4, 0.5}); }) ==
          ErrorCode::LengthMismatch);
    CHECK(code_of([] { make_pvalue_set(Layout::one_way({1}), {std::nan("")}); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { make_pvalue_set(Layout::one_way({1}), {-0.0001}); }) == ErrorCode::OutOfRange);
}

TEST_CASE("layout shape") {
    const auto l = Layout::two_way_cells(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(l.size() == 21);
    CHECK(l.row_size(0) == 6);
    CHECK(l.row_size(1) == 15);
    CHECK(l.col_size(2) == 9);
    CHECK(l.cell_size(1, 0) == 4);
    CHECK_FALSE(l.equal_cells());
    CHECK(Layout::two_way_cells(2, 2, {3, 3, 3, 3}).equal_cells());
    CHECK(code_of([] { Layout::one_way({2, 0}); }) == ErrorCode::InvalidLayout);
    CHECK(code_of([] { Layout::two_way_one_per_cell(0, 3); }) == ErrorCode::InvalidLayout);
    CHECK(code_of([] { Layout::two_way_cells(2, 2, {1, 1, 1}); }) == ErrorCode::InvalidLayout);
}

TEST_CASE("index bijection") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 300; ++t) {
        const Layout l = testing::random_layout(rng);
        for (std::size_t i = 0; i < l.size(); ++i) {
            const auto s = l.structured_index(i);
            REQUIRE(l.flat_index(s) == i);
            CHECK(l.row_of(i) == s.row);
            if (l.kind() != LayoutKind::OneWay) {
                CHECK(l.col_of(i) == s.col);
                CHECK(l.cell_of(i) == s.row * l.cols() + s.col);
            }
        }
    }
}

TEST_CASE("fdp") {
    const Layout l = Layout::one_way({4});
    const TruthMask all_null(l, {true, true, true, true});
    CHECK(fdp(RejectionSet(l, {false, false, false, false}, 0), all_null) == 0.0);
    CHECK(fdp(RejectionSet(l, {true, true, true, true}, 4), all_null) == 1.0);
    const TruthMask one_null(l, {true, false, false, false});
    CHECK(fdp(RejectionSet(l, {true, true, true, false}, 3), one_null) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("power") {
    const Layout l4 = Layout::one_way({4});
    const TruthMask all_null(l4, {true, true, true, true});
    CHECK(power(RejectionSet(l4, {true, false, true, false}, 2), all_null) == 0.0);
    const Layout l5 = Layout::one_way({5});
    const TruthMask no_null(l5, std::vector<bool>(5, false));
    CHECK(power(RejectionSet(l5, std::vector<bool>(5, true), 5), no_null) == 1.0);
    const TruthMask four(l5, {false, false, false, false, true});
    CHECK(power(RejectionSet(l5, {true, true, false, false, false}, 2), four) == 0.5);
}

TEST_CASE("null proportions") {
    const auto one = null_proportions(TruthMask(Layout::one_way({2, 2}), {true, true, false, false}));
    CHECK(one.rows == std::vector<double>{1.0, 0.0});
    CHECK(one.overall == 0.5);

    const auto two = null_proportions(TruthMask(Layout::two_way_one_per_cell(2, 2), {true, false, true, true}));
    CHECK(two.rows == std::vector<double>{0.5, 1.0});
    CHECK(two.cols == std::vector<double>{1.0, 0.5});
    CHECK(two.overall == 0.75);

    const auto all = null_proportions(TruthMask(Layout::two_way_cells(2, 2, {2, 1, 1, 3}), std::vector<bool>(7, true)));
    CHECK(all.overall == 1.0);
    for (double v : all.rows) CHECK(v == 1.0);
    for (double v : all.cols) CHECK(v == 1.0);
    for (double v : all.cells) CHECK(v == 1.0);
}

TEST_CASE("extended-real helpers") {
    CHECK(weighted_pvalue(0.0, 0.5) == 0.0);
    CHECK(weighted_pvalue(kInf, 0.0) == 0.0);
    CHECK(weighted_pvalue(kInf, 1e-300) == kInf);
    CHECK(weighted_pvalue(2.0, 0.25) == 0.5);
    CHECK(inverse(0.0) == kInf);
    CHECK(inverse(kInf) == 0.0);
    CHECK(inverse(4.0) == 0.25);
}

TEST_CASE("weights and rejections validate") {
    const Layout l = Layout::one_way({2});
    CHECK(code_of([&] { WeightAssignment(l, {1.0, -1.0}); }) == ErrorCode::OutOfRange);
    CHECK(code_of([&] { WeightAssignment(l, {1.0}); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([&] { RejectionSet(l, {true, true}, 1); }) == ErrorCode::OutOfRange);
    CHECK(code_of([&] { require_same_layout(l, Layout::one_way({1, 1}), "t"); }) == ErrorCode::LayoutMismatch);
}
