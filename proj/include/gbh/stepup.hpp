#pragma once

#include <span>
#include <vector>

#include "gbh/core.hpp"

namespace gbh {

/// Target FDR level; constructor enforces 0 < alpha < 1.
class StepUpConfig {
public:
    explicit StepUpConfig(double alpha);
    double alpha() const noexcept { return alpha_; }

private:
    double alpha_;
};

/// Critical constant j * level / n for the j-th order statistic (1-based).
inline double critical_constant(std::size_t j, double level, std::size_t n) noexcept {
    return static_cast<double>(j) * level / static_cast<double>(n);
}

struct StepUpResult {
    std::vector<bool> rejected;
    std::size_t count = 0;
};

/// Step-up over already-weighted p-values with constants j*level/N.
///
/// `level` is not restricted to (0,1) so the engine can be exercised on
/// rescaled problems. Hypotheses whose weighted value is <= the R-th order
/// statistic are rejected; sorting is stable by index.
StepUpResult step_up(std::span<const double> weighted, double level);

RejectionSet weighted_bh(const PValueSet& p, const WeightAssignment& w, const StepUpConfig& cfg);
RejectionSet plain_bh(const PValueSet& p, const StepUpConfig& cfg);

/// Quadratic-time transcription of the weighted BH definition, used as a
/// testing oracle. It shares no code with weighted_bh beyond the weighted
/// p-value product.
RejectionSet stepup_reference(const PValueSet& p, const WeightAssignment& w, const StepUpConfig& cfg);

}  // namespace gbh
