#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbh {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorCode {
    LengthMismatch,
    OutOfRange,
    LayoutMismatch,
    VariantMismatch,
    UnequalCells,
    BadLambda,
    BadAlpha,
    EmptyGroup,
    InvalidLayout,
    InvalidConfig,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class LayoutKind { OneWay, TwoWayOnePerCell, TwoWayCells };

/// Position of a hypothesis inside its layout.
///
/// OneWay uses (group, k); TwoWayOnePerCell uses (row, col); TwoWayCells uses
/// (row, col, k). Unused coordinates are zero.
struct StructuredIndex {
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t member = 0;

    friend bool operator==(const StructuredIndex&, const StructuredIndex&) = default;
};

/// Classification structure of a family of hypotheses.
///
/// Flat storage is row-major over (row, col, member) with member innermost.
/// Instances are immutable and cheap to copy.
class Layout {
public:
    static Layout one_way(std::vector<std::size_t> group_sizes);
    static Layout two_way_one_per_cell(std::size_t rows, std::size_t cols);
    static Layout two_way_cells(std::size_t rows, std::size_t cols,
                                std::vector<std::size_t> cell_sizes);

    LayoutKind kind() const noexcept;
    std::size_t size() const noexcept;

    /// Number of groups (OneWay) or rows (two-way).
    std::size_t rows() const noexcept;
    /// Number of columns; zero for OneWay.
    std::size_t cols() const noexcept;
    std::size_t cell_count() const noexcept { return rows() * cols(); }

    /// n_{g.}: hypotheses in group/row g.
    std::size_t row_size(std::size_t row) const;
    /// n_{.h}: hypotheses in column h.
    std::size_t col_size(std::size_t col) const;
    /// n_{gh}: hypotheses in cell (g, h).
    std::size_t cell_size(std::size_t row, std::size_t col) const;
    /// True when every cell holds the same number of hypotheses.
    bool equal_cells() const noexcept;

    std::size_t row_of(std::size_t flat) const { return d_->row_of.at(flat); }
    std::size_t col_of(std::size_t flat) const { return d_->col_of.at(flat); }
    /// Row-major cell number g*cols + h; zero for OneWay.
    std::size_t cell_of(std::size_t flat) const { return d_->cell_of.at(flat); }

    std::size_t flat_index(const StructuredIndex& idx) const;
    StructuredIndex structured_index(std::size_t flat) const;

    std::string describe() const;

    friend bool operator==(const Layout& a, const Layout& b) noexcept;

private:
    struct Data {
        LayoutKind kind = LayoutKind::OneWay;
        std::size_t rows = 0;
        std::size_t cols = 0;
        // Group sizes (OneWay) or row-major cell sizes (two-way).
        std::vector<std::size_t> unit_sizes;
        std::vector<std::size_t> unit_offsets;
        std::vector<std::size_t> row_sizes;
        std::vector<std::size_t> col_sizes;
        std::size_t total = 0;
        std::vector<std::size_t> row_of;
        std::vector<std::size_t> col_of;
        std::vector<std::size_t> cell_of;
    };

    explicit Layout(Data data);

    std::shared_ptr<const Data> d_;
};

class PValueSet {
public:
    PValueSet(Layout layout, std::vector<double> values);

    const Layout& layout() const noexcept { return layout_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    Layout layout_;
    std::vector<double> values_;
};

/// Validating constructor; throws LengthMismatch or OutOfRange.
PValueSet make_pvalue_set(const Layout& layout, std::vector<double> values);

class TruthMask {
public:
    TruthMask(Layout layout, std::vector<bool> is_null);

    const Layout& layout() const noexcept { return layout_; }
    const std::vector<bool>& is_null() const noexcept { return is_null_; }
    bool null_at(std::size_t i) const { return is_null_[i]; }
    std::size_t size() const noexcept { return is_null_.size(); }
    std::size_t null_count() const noexcept;

private:
    Layout layout_;
    std::vector<bool> is_null_;
};

/// Nonnegative extended-real weights; +inf is allowed.
class WeightAssignment {
public:
    WeightAssignment(Layout layout, std::vector<double> weights);
    static WeightAssignment uniform(const Layout& layout, double w);

    const Layout& layout() const noexcept { return layout_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::size_t size() const noexcept { return weights_.size(); }

private:
    Layout layout_;
    std::vector<double> weights_;
};

class RejectionSet {
public:
    RejectionSet(Layout layout, std::vector<bool> rejected, std::size_t threshold_index);

    const Layout& layout() const noexcept { return layout_; }
    const std::vector<bool>& rejected() const noexcept { return rejected_; }
    bool rejected_at(std::size_t i) const { return rejected_[i]; }
    /// R, the number of rejections.
    std::size_t threshold_index() const noexcept { return threshold_index_; }
    std::size_t size() const noexcept { return rejected_.size(); }

    friend bool operator==(const RejectionSet& a, const RejectionSet& b) noexcept;

private:
    Layout layout_;
    std::vector<bool> rejected_;
    std::size_t threshold_index_;
};

/// Null proportions at every structural level of a layout.
///
/// OneWay fills `rows` with pi_{g0}. TwoWayOnePerCell fills `rows` (pi_{g0}),
/// `cols` (pi_{0h}) and `cells` (0 or 1). TwoWayCells fills `rows` (pi_{g00}),
/// `cols` (pi_{0h0}) and `cells` (pi_{gh0}, row-major).
struct ProportionTable {
    double overall = 0.0;
    std::vector<double> rows;
    std::vector<double> cols;
    std::vector<double> cells;
};

/// V / max(R, 1).
double fdp(const RejectionSet& rej, const TruthMask& truth);
/// Correct rejections over non-nulls; 0 when there are no non-nulls.
double power(const RejectionSet& rej, const TruthMask& truth);

ProportionTable null_proportions(const TruthMask& truth);

/// w * p with the limits w = +inf (p > 0 -> +inf, p = 0 -> 0) and w = 0 (-> 0).
inline double weighted_pvalue(double w, double p) noexcept {
    if (w == 0.0 || p == 0.0) return 0.0;
    if (w == kInf) return kInf;
    return w * p;
}

/// Inverse of an extended nonnegative real: 1/0 = +inf, 1/inf = 0.
inline double inverse(double w) noexcept {
    if (w == 0.0) return kInf;
    if (w == kInf) return 0.0;
    return 1.0 / w;
}

void require_same_layout(const Layout& a, const Layout& b, const char* context);

}  // namespace gbh
