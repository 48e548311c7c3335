#include "gbh/procedure.hpp"

#include <vector>

namespace gbh {

ProcedureSpec ProcedureSpec::plain_bh() { return ProcedureSpec{}; }

ProcedureSpec ProcedureSpec::naive_adaptive_bh(double lambda) {
    ProcedureSpec s;
    s.kind = ProcedureKind::NaiveAdaptiveBH;
    s.lambda = lambda;
    return s;
}

ProcedureSpec ProcedureSpec::oracle_gbh(OracleVariant variant, std::optional<ProportionTable> props) {
    ProcedureSpec s;
    s.kind = ProcedureKind::OracleGBH;
    s.oracle_variant = variant;
    s.oracle_props = std::move(props);
    return s;
}

ProcedureSpec ProcedureSpec::adaptive_gbh(AdaptiveVariant variant, double lambda) {
    ProcedureSpec s;
    s.kind = ProcedureKind::AdaptiveGBH;
    s.adaptive_variant = variant;
    s.lambda = lambda;
    return s;
}

ProcedureSpec ProcedureSpec::lsl_gbh() {
    ProcedureSpec s;
    s.kind = ProcedureKind::LslGBH;
    return s;
}

ProcedureSpec ProcedureSpec::tst_gbh() {
    ProcedureSpec s;
    s.kind = ProcedureKind::TstGBH;
    return s;
}

std::string ProcedureSpec::label() const {
    switch (kind) {
        case ProcedureKind::PlainBH: return "plain_bh";
        case ProcedureKind::NaiveAdaptiveBH: return "naive_adaptive_bh";
        case ProcedureKind::OracleGBH: return std::string("oracle_gbh:") + to_string(oracle_variant);
        case ProcedureKind::AdaptiveGBH: {
            std::string s = std::string("adaptive_gbh:") + to_string(adaptive_variant);
            if (adaptive_options.column_term_uses_cols) s += "+cols";
            return s;
        }
        case ProcedureKind::LslGBH: return "lsl_gbh";
        case ProcedureKind::TstGBH: return "tst_gbh";
    }
    return "unknown";
}

WeightAssignment plugin_group_weights(const Layout& layout, const std::vector<double>& group_pi0) {
    if (group_pi0.size() != layout.rows()) {
        throw Error(ErrorCode::LengthMismatch, "one estimate per group is required");
    }
    double weighted_sum = 0.0;
    for (std::size_t g = 0; g < layout.rows(); ++g) {
        weighted_sum += static_cast<double>(layout.row_size(g)) * group_pi0[g];
    }
    const double overall = weighted_sum / static_cast<double>(layout.size());
    std::vector<double> group_w(layout.rows());
    for (std::size_t g = 0; g < layout.rows(); ++g) {
        group_w[g] = oracle_component_weight(group_pi0[g], overall);
    }
    std::vector<double> w(layout.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = group_w[layout.row_of(i)];
    return WeightAssignment(layout, std::move(w));
}

namespace {

std::vector<std::vector<double>> split_by_row(const PValueSet& p) {
    const Layout& layout = p.layout();
    std::vector<std::vector<double>> groups(layout.rows());
    for (std::size_t g = 0; g < layout.rows(); ++g) groups[g].reserve(layout.row_size(g));
    for (std::size_t i = 0; i < p.size(); ++i) groups[layout.row_of(i)].push_back(p[i]);
    return groups;
}

}  // namespace

WeightAssignment procedure_weights(const PValueSet& p, const ProcedureSpec& proc, double alpha) {
    const Layout& layout = p.layout();
    switch (proc.kind) {
        case ProcedureKind::PlainBH:
            return WeightAssignment::uniform(layout, 1.0);
        case ProcedureKind::NaiveAdaptiveBH:
            return WeightAssignment::uniform(layout, storey_pi0(p, proc.lambda));
        case ProcedureKind::OracleGBH:
            if (!proc.oracle_props) {
                throw Error(ErrorCode::InvalidConfig, "oracle procedure needs known null proportions");
            }
            return oracle_weights(*proc.oracle_props, layout, proc.oracle_variant);
        case ProcedureKind::AdaptiveGBH:
            return adaptive_weights(p, proc.lambda, proc.adaptive_variant, proc.adaptive_options);
        case ProcedureKind::LslGBH: {
            const auto groups = split_by_row(p);
            std::vector<double> est(groups.size());
            for (std::size_t g = 0; g < groups.size(); ++g) est[g] = lsl_pi0(groups[g]);
            return plugin_group_weights(layout, est);
        }
        case ProcedureKind::TstGBH: {
            const auto groups = split_by_row(p);
            std::vector<double> est(groups.size());
            for (std::size_t g = 0; g < groups.size(); ++g) est[g] = tst_pi0(groups[g], alpha);
            return plugin_group_weights(layout, est);
        }
    }
    throw Error(ErrorCode::InvalidConfig, "unknown procedure kind");
}

RejectionSet run_procedure(const PValueSet& p, const ProcedureSpec& proc, double alpha) {
    const StepUpConfig cfg(alpha);
    return weighted_bh(p, procedure_weights(p, proc, alpha), cfg);
}

}  // namespace gbh
