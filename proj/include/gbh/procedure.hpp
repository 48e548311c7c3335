#pragma once

#include <optional>
#include <string>

#include "gbh/core.hpp"
#include "gbh/stepup.hpp"
#include "gbh/weights_adaptive.hpp"
#include "gbh/weights_oracle.hpp"

namespace gbh {

enum class ProcedureKind {
    PlainBH,
    NaiveAdaptiveBH,  ///< uniform weight from storey_pi0
    OracleGBH,
    AdaptiveGBH,
    LslGBH,  ///< one-way oracle weights with least-slope group estimates
    TstGBH,  ///< one-way oracle weights with two-stage group estimates
};

/// A complete recipe for turning a PValueSet into a rejection set.
///
/// `oracle_props` must be filled for OracleGBH before running; the simulation
/// runner fills it from the realized truth mask. LSL and TST group by row
/// for every layout kind.
struct ProcedureSpec {
    ProcedureKind kind = ProcedureKind::PlainBH;
    double lambda = 0.5;
    OracleVariant oracle_variant = OracleVariant::OneWay;
    AdaptiveVariant adaptive_variant = AdaptiveVariant::OneWay;
    AdaptiveOptions adaptive_options{};
    std::optional<ProportionTable> oracle_props;

    static ProcedureSpec plain_bh();
    static ProcedureSpec naive_adaptive_bh(double lambda);
    static ProcedureSpec oracle_gbh(OracleVariant variant, std::optional<ProportionTable> props = std::nullopt);
    static ProcedureSpec adaptive_gbh(AdaptiveVariant variant, double lambda);
    static ProcedureSpec lsl_gbh();
    static ProcedureSpec tst_gbh();

    /// Stable label used in CSV output, e.g. "adaptive_gbh:oneway".
    std::string label() const;
};

/// Group-level estimates plugged into the one-way oracle weights, grouping by row.
WeightAssignment plugin_group_weights(const Layout& layout, const std::vector<double>& group_pi0);

/// The weights a procedure would hand to weighted_bh for this data.
WeightAssignment procedure_weights(const PValueSet& p, const ProcedureSpec& proc, double alpha);

RejectionSet run_procedure(const PValueSet& p, const ProcedureSpec& proc, double alpha);

}  // namespace gbh
