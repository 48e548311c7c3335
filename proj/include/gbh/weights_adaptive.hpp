#pragma once

#include <span>
#include <vector>

#include "gbh/core.hpp"

namespace gbh {

/// Counts of p-values <= lambda at every structural level.
///
/// `rows` holds R_{n_g.} (groups or rows), `cols` holds R_{n_.h} (R_{m_h} for
/// one-per-cell) and `cells` holds R_{n_gh} row-major. Two-way only fields
/// are empty for OneWay layouts.
struct CountTable {
    double lambda = 0.5;
    std::size_t total = 0;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    std::vector<std::size_t> cells;
};

enum class AdaptiveVariant {
    OneWay,                    ///< Storey-type group weights with the (R_N + m - 1)/R_g factor
    TwoWayOnePer,              ///< equal-share mix of row and column estimates
    TwoWayOnePerSizeAdjusted,  ///< m/(m+n), n/(m+n) shares
    TwoWayCellsFourTerm,       ///< two cell-level terms plus row and column terms
    TwoWayCellsTwoTerm,        ///< row and column terms only
    TwoWayCellsEqualSizeFour,  ///< four-term with p(m-1) factors; equal cell sizes
    TwoWayCellsEqualSizeTwo,   ///< two-term with mp, np factors; equal cell sizes
};

const char* to_string(AdaptiveVariant v) noexcept;

struct AdaptiveOptions {
    /// The published equal-size four-term estimate uses p(m-1) on both the
    /// row and the column term. Setting this uses p(n-1) on the column term,
    /// mirroring the oracle equal-size weights.
    bool column_term_uses_cols = false;
};

void check_lambda(double lambda);

CountTable threshold_counts(const PValueSet& p, double lambda);

/// One Storey-type component estimate
///   (unit - R_self + 1) / (scale (1 - lambda)) * (R_parent + k - 1) / R_self,
/// with the ratio taken as 1 when R_self = R_parent + k - 1 = 0 and +inf when
/// only R_self = 0.
double adaptive_component_weight(std::size_t unit_size, std::size_t r_self, std::size_t r_parent,
                                 std::size_t k, double scale, double lambda);

WeightAssignment oneway_adaptive_weights(const PValueSet& p, double lambda);

WeightAssignment twoway_oneper_adaptive_weights(const PValueSet& p, double lambda, AdaptiveVariant variant);

WeightAssignment twoway_cells_adaptive_weights(const PValueSet& p, double lambda, AdaptiveVariant variant,
                                               const AdaptiveOptions& options = {});

/// Dispatches on `variant`; throws VariantMismatch when it does not fit the layout.
WeightAssignment adaptive_weights(const PValueSet& p, double lambda, AdaptiveVariant variant,
                                  const AdaptiveOptions& options = {});

/// (N - R_N + 1) / (N (1 - lambda)); uncapped unless `cap_at_one`.
double storey_pi0(const PValueSet& p, double lambda, bool cap_at_one = false);

/// Least-slope estimate of the null proportion of a single group.
double lsl_pi0(std::span<const double> group_pvalues);

/// Two-stage estimate (n - r) / n, r = BH rejections at alpha / (1 + alpha).
double tst_pi0(std::span<const double> group_pvalues, double alpha);

}  // namespace gbh
