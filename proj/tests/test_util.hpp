#pragma once

#include <random>
#include <vector>

#include "gbh/core.hpp"

namespace gbh::testing {

inline Layout random_layout(std::mt19937_64& rng, std::size_t max_total = 200) {
    std::uniform_int_distribution<int> kind(0, 2);
    switch (kind(rng)) {
        case 0: {
            std::uniform_int_distribution<std::size_t> groups(1, 8);
            std::uniform_int_distribution<std::size_t> size(1, std::max<std::size_t>(1, max_total / 8));
            std::vector<std::size_t> sizes(groups(rng));
            for (auto& s : sizes) s = size(rng);
            return Layout::one_way(sizes);
        }
        case 1: {
            std::uniform_int_distribution<std::size_t> dim(1, 12);
            return Layout::two_way_one_per_cell(dim(rng), dim(rng));
        }
        default: {
            std::uniform_int_distribution<std::size_t> dim(1, 5);
            std::uniform_int_distribution<std::size_t> size(1, 7);
            const std::size_t m = dim(rng);
            const std::size_t n = dim(rng);
            std::vector<std::size_t> sizes(m * n);
            for (auto& s : sizes) s = size(rng);
            return Layout::two_way_cells(m, n, sizes);
        }
    }
}

/// Uniform p-values with a sprinkling of exact 0, 1 and repeated values.
inline std::vector<double> random_pvalues(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 19);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int k = pick(rng);
        if (k == 0) {
            out[i] = 0.0;
        } else if (k == 1) {
            out[i] = 1.0;
        } else if (k == 2 && i > 0) {
            out[i] = out[i - 1];
        } else if (k < 10) {
            out[i] = u(rng) * 0.05;
        } else {
            out[i] = u(rng);
        }
    }
    return out;
}

/// Weights drawn from {0, finite, +inf}.
inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.05, 4.0);
    std::uniform_int_distribution<int> pick(0, 9);
    std::vector<double> out(n);
    for (auto& w : out) {
        const int k = pick(rng);
        w = k == 0 ? 0.0 : k == 1 ? kInf : u(rng);
    }
    return out;
}

inline std::vector<bool> random_mask(std::mt19937_64& rng, std::size_t n, double null_prob) {
    std::bernoulli_distribution b(null_prob);
    std::vector<bool> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = b(rng);
    return out;
}

}  // namespace gbh::testing
