#include "gbh/stepup.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace gbh {

StepUpConfig::StepUpConfig(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::BadAlpha, "alpha must lie in (0,1), got " + std::to_string(alpha));
    }
}

StepUpResult step_up(std::span<const double> weighted, double level) {
    const std::size_t n = weighted.size();
    StepUpResult out;
    out.rejected.assign(n, false);
    if (n == 0) return out;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weighted[a] < weighted[b]; });

    std::size_t r = 0;
    for (std::size_t j = n; j >= 1; --j) {
        if (weighted[order[j - 1]] <= critical_constant(j, level, n)) {
            r = j;
            break;
        }
    }
    if (r == 0) return out;

    // Everything tied with the R-th order statistic is rejected too; by
    // maximality of R there are no such ties beyond position R.
    const double cutoff = weighted[order[r - 1]];
    for (std::size_t i = 0; i < n; ++i) {
        if (weighted[i] <= cutoff) {
            out.rejected[i] = true;
            ++out.count;
        }
    }
    return out;
}

namespace {

std::vector<double> weighted_values(const PValueSet& p, const WeightAssignment& w) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = weighted_pvalue(w[i], p[i]);
    return out;
}

}  // namespace

RejectionSet weighted_bh(const PValueSet& p, const WeightAssignment& w, const StepUpConfig& cfg) {
    require_same_layout(p.layout(), w.layout(), "weighted_bh");
    const auto weighted = weighted_values(p, w);
    auto result = step_up(weighted, cfg.alpha());
    return RejectionSet(p.layout(), std::move(result.rejected), result.count);
}

RejectionSet plain_bh(const PValueSet& p, const StepUpConfig& cfg) {
    return weighted_bh(p, WeightAssignment::uniform(p.layout(), 1.0), cfg);
}

RejectionSet stepup_reference(const PValueSet& p, const WeightAssignment& w, const StepUpConfig& cfg) {
    require_same_layout(p.layout(), w.layout(), "stepup_reference");
    const std::size_t n = p.size();
    const auto weighted = weighted_values(p, w);

    // P_(j) <= c_j  iff  at least j weighted values are <= c_j.
    std::size_t r = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double c = critical_constant(j, cfg.alpha(), n);
        std::size_t below = 0;
        for (double v : weighted) {
            if (v <= c) ++below;
        }
        if (below >= j) r = j;
    }

    std::vector<bool> rejected(n, false);
    if (r > 0) {
        const double c = critical_constant(r, cfg.alpha(), n);
        for (std::size_t i = 0; i < n; ++i) rejected[i] = weighted[i] <= c;
    }
    return RejectionSet(p.layout(), std::move(rejected), r);
}

}  // namespace gbh
