#pragma once

#include "gbh/core.hpp"

namespace gbh {

/// Closed-form oracle weight schemes.
enum class OracleVariant {
    OneWay,                    ///< w_g = pi_g0 (1 - pi_0) / (1 - pi_g0)
    TwoWayOnePerEqual,         ///< equal-share harmonic mix of row and column weights
    TwoWayOnePerSizeAdjusted,  ///< row/column shares m/(m+n) and n/(m+n)
    TwoWayCellsFourTerm,       ///< two cell-level terms plus row and column terms, 1/4 each
    TwoWayCellsTwoTerm,        ///< row and column terms only, 1/2 each
    TwoWayCellsEqualSizeA,     ///< two-term with m/(m+n), n/(m+n) shares; equal cell sizes
    TwoWayCellsEqualSizeB,     ///< four-term with p(m-1), p(n-1) factors; equal cell sizes
};

const char* to_string(OracleVariant v) noexcept;

/// pi (1 - parent) / (1 - pi) with pi = 1 -> +inf and pi = 0 -> 0.
double oracle_component_weight(double pi, double parent_pi);

WeightAssignment oneway_oracle_weights(const ProportionTable& props, const Layout& layout);

WeightAssignment twoway_oneper_oracle_weights(const ProportionTable& props, const Layout& layout,
                                              OracleVariant variant);

WeightAssignment twoway_cells_oracle_weights(const ProportionTable& props, const Layout& layout,
                                             OracleVariant variant);

/// Dispatches on `variant`; throws VariantMismatch when it does not fit the layout.
WeightAssignment oracle_weights(const ProportionTable& props, const Layout& layout, OracleVariant variant);

/// Sum over true nulls of 1/w_i, minus N. Infinite weights contribute 0.
double verify_weight_identity(const WeightAssignment& w, const TruthMask& truth);

}  // namespace gbh
