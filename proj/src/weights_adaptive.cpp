#include "gbh/weights_adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>

#include "gbh/stepup.hpp"

namespace gbh {

const char* to_string(AdaptiveVariant v) noexcept {
    switch (v) {
        case AdaptiveVariant::OneWay: return "oneway";
        case AdaptiveVariant::TwoWayOnePer: return "twoway_oneper";
        case AdaptiveVariant::TwoWayOnePerSizeAdjusted: return "twoway_oneper_size_adjusted";
        case AdaptiveVariant::TwoWayCellsFourTerm: return "twoway_cells_four_term";
        case AdaptiveVariant::TwoWayCellsTwoTerm: return "twoway_cells_two_term";
        case AdaptiveVariant::TwoWayCellsEqualSizeFour: return "twoway_cells_equal_size_four";
        case AdaptiveVariant::TwoWayCellsEqualSizeTwo: return "twoway_cells_equal_size_two";
    }
    return "unknown";
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw Error(ErrorCode::BadLambda, "lambda must lie in (0,1), got " + std::to_string(lambda));
    }
}

CountTable threshold_counts(const PValueSet& p, double lambda) {
    check_lambda(lambda);
    const Layout& layout = p.layout();
    CountTable t;
    t.lambda = lambda;
    t.rows.assign(layout.rows(), 0);
    const bool two_way = layout.kind() != LayoutKind::OneWay;
    if (two_way) {
        t.cols.assign(layout.cols(), 0);
        t.cells.assign(layout.cell_count(), 0);
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] <= lambda)) continue;
        ++t.total;
        ++t.rows[layout.row_of(i)];
        if (two_way) {
            ++t.cols[layout.col_of(i)];
            ++t.cells[layout.cell_of(i)];
        }
    }
    return t;
}

double adaptive_component_weight(std::size_t unit_size, std::size_t r_self, std::size_t r_parent,
                                 std::size_t k, double scale, double lambda) {
    const double lead =
        static_cast<double>(unit_size - r_self + 1) / (scale * (1.0 - lambda));
    const std::size_t numer = r_parent + k - 1;
    if (r_self == 0) return numer == 0 ? lead : kInf;
    return lead * (static_cast<double>(numer) / static_cast<double>(r_self));
}

namespace {

double harmonic_mix(std::initializer_list<std::pair<double, double>> terms) {
    double acc = 0.0;
    for (const auto& [coef, w] : terms) {
        if (coef == 0.0) continue;
        acc += coef * inverse(w);
    }
    return inverse(acc);
}

WeightAssignment spread_by_cell(const Layout& layout, const std::vector<double>& cell_weights) {
    std::vector<double> w(layout.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = cell_weights[layout.cell_of(i)];
    return WeightAssignment(layout, std::move(w));
}

[[noreturn]] void variant_mismatch(AdaptiveVariant v, const Layout& layout) {
    throw Error(ErrorCode::VariantMismatch,
                std::string("adaptive variant ") + to_string(v) + " does not fit layout " + layout.describe());
}

}  // namespace

WeightAssignment oneway_adaptive_weights(const PValueSet& p, double lambda) {
    const Layout& layout = p.layout();
    if (layout.kind() != LayoutKind::OneWay) variant_mismatch(AdaptiveVariant::OneWay, layout);
    const CountTable counts = threshold_counts(p, lambda);
    const double total = static_cast<double>(layout.size());
    const std::size_t m = layout.rows();

    std::vector<double> group_w(m);
    for (std::size_t g = 0; g < m; ++g) {
        group_w[g] = adaptive_component_weight(layout.row_size(g), counts.rows[g], counts.total, m, total, lambda);
    }
    std::vector<double> w(layout.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = group_w[layout.row_of(i)];
    return WeightAssignment(layout, std::move(w));
}

WeightAssignment twoway_oneper_adaptive_weights(const PValueSet& p, double lambda, AdaptiveVariant variant) {
    const Layout& layout = p.layout();
    if (layout.kind() != LayoutKind::TwoWayOnePerCell) variant_mismatch(variant, layout);
    if (variant != AdaptiveVariant::TwoWayOnePer && variant != AdaptiveVariant::TwoWayOnePerSizeAdjusted) {
        variant_mismatch(variant, layout);
    }
    const CountTable counts = threshold_counts(p, lambda);
    const std::size_t m = layout.rows();
    const std::size_t n = layout.cols();
    const double total = static_cast<double>(layout.size());
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);

    std::vector<double> row_w(m);
    std::vector<double> col_w(n);
    for (std::size_t g = 0; g < m; ++g) {
        row_w[g] = adaptive_component_weight(n, counts.rows[g], counts.total, m, total, lambda);
    }
    for (std::size_t h = 0; h < n; ++h) {
        col_w[h] = adaptive_component_weight(m, counts.cols[h], counts.total, n, total, lambda);
    }

    std::vector<double> cell_w(m * n);
    for (std::size_t g = 0; g < m; ++g) {
        for (std::size_t h = 0; h < n; ++h) {
            cell_w[g * n + h] = variant == AdaptiveVariant::TwoWayOnePer
                                    ? harmonic_mix({{0.5, row_w[g]}, {0.5, col_w[h]}})
                                    : harmonic_mix({{md / (md + nd), row_w[g]}, {nd / (md + nd), col_w[h]}});
        }
    }
    return spread_by_cell(layout, cell_w);
}

WeightAssignment twoway_cells_adaptive_weights(const PValueSet& p, double lambda, AdaptiveVariant variant,
                                               const AdaptiveOptions& options) {
    const Layout& layout = p.layout();
    if (layout.kind() != LayoutKind::TwoWayCells) variant_mismatch(variant, layout);
    switch (variant) {
        case AdaptiveVariant::TwoWayCellsFourTerm:
        case AdaptiveVariant::TwoWayCellsTwoTerm:
            break;
        case AdaptiveVariant::TwoWayCellsEqualSizeFour:
        case AdaptiveVariant::TwoWayCellsEqualSizeTwo:
            if (!layout.equal_cells()) {
                throw Error(ErrorCode::UnequalCells,
                            std::string("adaptive variant ") + to_string(variant) + " needs equal cell sizes");
            }
            break;
        default:
            variant_mismatch(variant, layout);
    }
    const CountTable counts = threshold_counts(p, lambda);
    const std::size_t m = layout.rows();
    const std::size_t n = layout.cols();
    const double total = static_cast<double>(layout.size());
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double pd = static_cast<double>(layout.cell_size(0, 0));

    std::vector<double> row_w(m);
    std::vector<double> col_w(n);
    for (std::size_t g = 0; g < m; ++g) {
        row_w[g] = adaptive_component_weight(layout.row_size(g), counts.rows[g], counts.total, m, total, lambda);
    }
    for (std::size_t h = 0; h < n; ++h) {
        col_w[h] = adaptive_component_weight(layout.col_size(h), counts.cols[h], counts.total, n, total, lambda);
    }

    std::vector<double> cell_w(m * n);
    for (std::size_t g = 0; g < m; ++g) {
        for (std::size_t h = 0; h < n; ++h) {
            const std::size_t cell = g * n + h;
            const std::size_t size = layout.cell_size(g, h);
            const std::size_t r_cell = counts.cells[cell];
            const double w1 = adaptive_component_weight(size, r_cell, counts.rows[g], n,
                                                        static_cast<double>(layout.row_size(g)), lambda);
            const double w2 = adaptive_component_weight(size, r_cell, counts.cols[h], m,
                                                        static_cast<double>(layout.col_size(h)), lambda);
            const double wg = row_w[g];
            const double wh = col_w[h];
            double w = 0.0;
            switch (variant) {
                case AdaptiveVariant::TwoWayCellsFourTerm:
                    w = harmonic_mix({{0.25, w1}, {0.25, w2}, {0.25, wg}, {0.25, wh}});
                    break;
                case AdaptiveVariant::TwoWayCellsTwoTerm:
                    w = harmonic_mix({{0.5, wg}, {0.5, wh}});
                    break;
                case AdaptiveVariant::TwoWayCellsEqualSizeFour: {
                    const double denom = (md + nd) * pd;
                    const double col_factor = options.column_term_uses_cols ? nd - 1.0 : md - 1.0;
                    w = harmonic_mix({{pd / denom, w1},
                                      {pd / denom, w2},
                                      {pd * (md - 1.0) / denom, wg},
                                      {pd * col_factor / denom, wh}});
                    break;
                }
                case AdaptiveVariant::TwoWayCellsEqualSizeTwo: {
                    const double denom = (md + nd) * pd;
                    w = harmonic_mix({{md * pd / denom, wg}, {nd * pd / denom, wh}});
                    break;
                }
                default:
                    break;
            }
            cell_w[cell] = w;
        }
    }
    return spread_by_cell(layout, cell_w);
}

WeightAssignment adaptive_weights(const PValueSet& p, double lambda, AdaptiveVariant variant,
                                  const AdaptiveOptions& options) {
    switch (variant) {
        case AdaptiveVariant::OneWay:
            return oneway_adaptive_weights(p, lambda);
        case AdaptiveVariant::TwoWayOnePer:
        case AdaptiveVariant::TwoWayOnePerSizeAdjusted:
            return twoway_oneper_adaptive_weights(p, lambda, variant);
        default:
            return twoway_cells_adaptive_weights(p, lambda, variant, options);
    }
}

double storey_pi0(const PValueSet& p, double lambda, bool cap_at_one) {
    check_lambda(lambda);
    std::size_t below = 0;
    for (double v : p.values()) {
        if (v <= lambda) ++below;
    }
    const std::size_t n = p.size();
    // Same arithmetic as adaptive_component_weight with a ratio of one.
    const double est = static_cast<double>(n - below + 1) / (static_cast<double>(n) * (1.0 - lambda));
    return cap_at_one ? std::min(est, 1.0) : est;
}

double lsl_pi0(std::span<const double> group_pvalues) {
    if (group_pvalues.empty()) throw Error(ErrorCode::EmptyGroup, "lsl_pi0 needs at least one p-value");
    std::vector<double> sorted(group_pvalues.begin(), group_pvalues.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double nd = static_cast<double>(n);

    auto slope_stat = [&](std::size_t i) {  // i is 1-based
        const double denom = 1.0 - sorted[i - 1];
        const double numer = static_cast<double>(n - i + 1);
        return denom <= 0.0 ? kInf : numer / denom;
    };

    double prev = slope_stat(1);
    for (std::size_t i = 2; i <= n; ++i) {
        const double cur = slope_stat(i);
        if (cur > prev) {
            if (cur == kInf) return 1.0;
            return std::min((std::floor(cur) + 1.0) / nd, 1.0);
        }
        prev = cur;
    }
    return 1.0;
}

double tst_pi0(std::span<const double> group_pvalues, double alpha) {
    if (group_pvalues.empty()) throw Error(ErrorCode::EmptyGroup, "tst_pi0 needs at least one p-value");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::BadAlpha, "alpha must lie in (0,1), got " + std::to_string(alpha));
    }
    const auto result = step_up(group_pvalues, alpha / (1.0 + alpha));
    const double n = static_cast<double>(group_pvalues.size());
    return (n - static_cast<double>(result.count)) / n;
}

}  // namespace gbh
