#include "gbh/weights_oracle.hpp"

#include <initializer_list>
#include <string>
#include <utility>

namespace gbh {

const char* to_string(OracleVariant v) noexcept {
    switch (v) {
        case OracleVariant::OneWay: return "oneway";
        case OracleVariant::TwoWayOnePerEqual: return "twoway_oneper";
        case OracleVariant::TwoWayOnePerSizeAdjusted: return "twoway_oneper_size_adjusted";
        case OracleVariant::TwoWayCellsFourTerm: return "twoway_cells_four_term";
        case OracleVariant::TwoWayCellsTwoTerm: return "twoway_cells_two_term";
        case OracleVariant::TwoWayCellsEqualSizeA: return "twoway_cells_equal_size_a";
        case OracleVariant::TwoWayCellsEqualSizeB: return "twoway_cells_equal_size_b";
    }
    return "unknown";
}

double oracle_component_weight(double pi, double parent_pi) {
    if (pi >= 1.0) return kInf;
    if (pi <= 0.0) return 0.0;
    return pi * (1.0 - parent_pi) / (1.0 - pi);
}

namespace {

/// [ sum_k c_k / w_k ]^{-1} over extended reals.
double harmonic_mix(std::initializer_list<std::pair<double, double>> terms) {
    double acc = 0.0;
    for (const auto& [coef, w] : terms) {
        if (coef == 0.0) continue;
        acc += coef * inverse(w);
    }
    return inverse(acc);
}

void check_unit_range(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw Error(ErrorCode::OutOfRange, std::string(what) + " proportions must lie in [0,1]");
        }
    }
}

void check_props(const ProportionTable& props, const Layout& layout) {
    if (!(props.overall >= 0.0 && props.overall <= 1.0)) {
        throw Error(ErrorCode::OutOfRange, "overall null proportion must lie in [0,1]");
    }
    if (props.rows.size() != layout.rows()) {
        throw Error(ErrorCode::LengthMismatch, "row proportions do not match layout");
    }
    check_unit_range(props.rows, "row");
    if (layout.kind() == LayoutKind::OneWay) return;
    if (props.cols.size() != layout.cols()) {
        throw Error(ErrorCode::LengthMismatch, "column proportions do not match layout");
    }
    check_unit_range(props.cols, "column");
    if (layout.kind() == LayoutKind::TwoWayCells) {
        if (props.cells.size() != layout.cell_count()) {
            throw Error(ErrorCode::LengthMismatch, "cell proportions do not match layout");
        }
        check_unit_range(props.cells, "cell");
    }
}

void require_kind(const Layout& layout, LayoutKind kind, OracleVariant variant) {
    if (layout.kind() != kind) {
        throw Error(ErrorCode::VariantMismatch,
                    std::string("oracle variant ") + to_string(variant) + " does not fit layout " + layout.describe());
    }
}

WeightAssignment spread_by_cell(const Layout& layout, const std::vector<double>& cell_weights) {
    std::vector<double> w(layout.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = cell_weights[layout.cell_of(i)];
    return WeightAssignment(layout, std::move(w));
}

}  // namespace

WeightAssignment oneway_oracle_weights(const ProportionTable& props, const Layout& layout) {
    require_kind(layout, LayoutKind::OneWay, OracleVariant::OneWay);
    check_props(props, layout);
    std::vector<double> group_w(layout.rows());
    for (std::size_t g = 0; g < layout.rows(); ++g) {
        group_w[g] = oracle_component_weight(props.rows[g], props.overall);
    }
    std::vector<double> w(layout.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = group_w[layout.row_of(i)];
    return WeightAssignment(layout, std::move(w));
}

WeightAssignment twoway_oneper_oracle_weights(const ProportionTable& props, const Layout& layout,
                                              OracleVariant variant) {
    require_kind(layout, LayoutKind::TwoWayOnePerCell, variant);
    if (variant != OracleVariant::TwoWayOnePerEqual && variant != OracleVariant::TwoWayOnePerSizeAdjusted) {
        throw Error(ErrorCode::VariantMismatch,
                    std::string("oracle variant ") + to_string(variant) + " is not a one-per-cell scheme");
    }
    check_props(props, layout);
    const std::size_t m = layout.rows();
    const std::size_t n = layout.cols();
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);

    std::vector<double> cell_w(m * n);
    for (std::size_t g = 0; g < m; ++g) {
        const double wg = oracle_component_weight(props.rows[g], props.overall);
        for (std::size_t h = 0; h < n; ++h) {
            const double wh = oracle_component_weight(props.cols[h], props.overall);
            if (variant == OracleVariant::TwoWayOnePerEqual) {
                cell_w[g * n + h] = harmonic_mix({{0.5, wg}, {0.5, wh}});
            } else {
                cell_w[g * n + h] = harmonic_mix({{md / (md + nd), wg}, {nd / (md + nd), wh}});
            }
        }
    }
    return spread_by_cell(layout, cell_w);
}

WeightAssignment twoway_cells_oracle_weights(const ProportionTable& props, const Layout& layout,
                                             OracleVariant variant) {
    require_kind(layout, LayoutKind::TwoWayCells, variant);
    switch (variant) {
        case OracleVariant::TwoWayCellsFourTerm:
        case OracleVariant::TwoWayCellsTwoTerm:
            break;
        case OracleVariant::TwoWayCellsEqualSizeA:
        case OracleVariant::TwoWayCellsEqualSizeB:
            if (!layout.equal_cells()) {
                throw Error(ErrorCode::UnequalCells,
                            std::string("oracle variant ") + to_string(variant) + " needs equal cell sizes");
            }
            break;
        default:
            throw Error(ErrorCode::VariantMismatch,
                        std::string("oracle variant ") + to_string(variant) + " is not a multi-per-cell scheme");
    }
    check_props(props, layout);
    const std::size_t m = layout.rows();
    const std::size_t n = layout.cols();
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double pd = static_cast<double>(layout.cell_size(0, 0));

    std::vector<double> cell_w(m * n);
    for (std::size_t g = 0; g < m; ++g) {
        const double wg = oracle_component_weight(props.rows[g], props.overall);
        for (std::size_t h = 0; h < n; ++h) {
            const double wh = oracle_component_weight(props.cols[h], props.overall);
            const double pi_cell = props.cells[g * n + h];
            const double w1 = oracle_component_weight(pi_cell, props.rows[g]);
            const double w2 = oracle_component_weight(pi_cell, props.cols[h]);
            double w = 0.0;
            switch (variant) {
                case OracleVariant::TwoWayCellsFourTerm:
                    w = harmonic_mix({{0.25, w1}, {0.25, w2}, {0.25, wg}, {0.25, wh}});
                    break;
                case OracleVariant::TwoWayCellsTwoTerm:
                    w = harmonic_mix({{0.5, wg}, {0.5, wh}});
                    break;
                case OracleVariant::TwoWayCellsEqualSizeA: {
                    const double denom = pd * (md + nd);
                    w = harmonic_mix({{md * pd / denom, wg}, {nd * pd / denom, wh}});
                    break;
                }
                case OracleVariant::TwoWayCellsEqualSizeB: {
                    const double denom = pd * (md + nd);
                    w = harmonic_mix({{pd / denom, w1},
                                      {pd / denom, w2},
                                      {pd * (md - 1.0) / denom, wg},
                                      {pd * (nd - 1.0) / denom, wh}});
                    break;
                }
                default:
                    break;
            }
            cell_w[g * n + h] = w;
        }
    }
    return spread_by_cell(layout, cell_w);
}

WeightAssignment oracle_weights(const ProportionTable& props, const Layout& layout, OracleVariant variant) {
    switch (variant) {
        case OracleVariant::OneWay:
            return oneway_oracle_weights(props, layout);
        case OracleVariant::TwoWayOnePerEqual:
        case OracleVariant::TwoWayOnePerSizeAdjusted:
            return twoway_oneper_oracle_weights(props, layout, variant);
        default:
            return twoway_cells_oracle_weights(props, layout, variant);
    }
}

double verify_weight_identity(const WeightAssignment& w, const TruthMask& truth) {
    require_same_layout(w.layout(), truth.layout(), "verify_weight_identity");
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (truth.null_at(i)) sum += inverse(w[i]);
    }
    return sum - static_cast<double>(w.size());
}

}  // namespace gbh
