#include "gbh/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gbh {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::LayoutMismatch: return "LayoutMismatch";
        case ErrorCode::VariantMismatch: return "VariantMismatch";
        case ErrorCode::UnequalCells: return "UnequalCells";
        case ErrorCode::BadLambda: return "BadLambda";
        case ErrorCode::BadAlpha: return "BadAlpha";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::InvalidLayout: return "InvalidLayout";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

// ---------------------------------------------------------------------------
// Layout

Layout::Layout(Data data) {
    auto& d = data;
    d.unit_offsets.resize(d.unit_sizes.size() + 1, 0);
    std::partial_sum(d.unit_sizes.begin(), d.unit_sizes.end(), d.unit_offsets.begin() + 1);
    d.total = d.unit_offsets.back();
    if (d.total == 0) throw Error(ErrorCode::InvalidLayout, "layout has no hypotheses");

    d.row_of.reserve(d.total);
    d.col_of.reserve(d.total);
    d.cell_of.reserve(d.total);
    if (d.kind == LayoutKind::OneWay) {
        d.row_sizes = d.unit_sizes;
        for (std::size_t g = 0; g < d.unit_sizes.size(); ++g) {
            for (std::size_t k = 0; k < d.unit_sizes[g]; ++k) {
                d.row_of.push_back(g);
                d.col_of.push_back(0);
                d.cell_of.push_back(0);
            }
        }
    } else {
        d.row_sizes.assign(d.rows, 0);
        d.col_sizes.assign(d.cols, 0);
        for (std::size_t g = 0; g < d.rows; ++g) {
            for (std::size_t h = 0; h < d.cols; ++h) {
                const std::size_t cell = g * d.cols + h;
                const std::size_t sz = d.unit_sizes[cell];
                d.row_sizes[g] += sz;
                d.col_sizes[h] += sz;
                for (std::size_t k = 0; k < sz; ++k) {
                    d.row_of.push_back(g);
                    d.col_of.push_back(h);
                    d.cell_of.push_back(cell);
                }
            }
        }
    }
    d_ = std::make_shared<const Data>(std::move(data));
}

Layout Layout::one_way(std::vector<std::size_t> group_sizes) {
    if (group_sizes.empty()) throw Error(ErrorCode::InvalidLayout, "one-way layout needs at least one group");
    for (std::size_t s : group_sizes) {
        if (s == 0) throw Error(ErrorCode::InvalidLayout, "group sizes must be >= 1");
    }
    Data d;
    d.kind = LayoutKind::OneWay;
    d.rows = group_sizes.size();
    d.cols = 0;
    d.unit_sizes = std::move(group_sizes);
    return Layout(std::move(d));
}

Layout Layout::two_way_one_per_cell(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw Error(ErrorCode::InvalidLayout, "two-way layout needs rows, cols >= 1");
    Data d;
    d.kind = LayoutKind::TwoWayOnePerCell;
    d.rows = rows;
    d.cols = cols;
    d.unit_sizes.assign(rows * cols, 1);
    return Layout(std::move(d));
}

Layout Layout::two_way_cells(std::size_t rows, std::size_t cols, std::vector<std::size_t> cell_sizes) {
    if (rows == 0 || cols == 0) throw Error(ErrorCode::InvalidLayout, "two-way layout needs rows, cols >= 1");
    if (cell_sizes.size() != rows * cols) {
        throw Error(ErrorCode::InvalidLayout, "cell size table must have rows*cols entries");
    }
    for (std::size_t s : cell_sizes) {
        if (s == 0) throw Error(ErrorCode::InvalidLayout, "cell sizes must be >= 1");
    }
    Data d;
    d.kind = LayoutKind::TwoWayCells;
    d.rows = rows;
    d.cols = cols;
    d.unit_sizes = std::move(cell_sizes);
    return Layout(std::move(d));
}

LayoutKind Layout::kind() const noexcept { return d_->kind; }
std::size_t Layout::size() const noexcept { return d_->total; }
std::size_t Layout::rows() const noexcept { return d_->rows; }
std::size_t Layout::cols() const noexcept { return d_->cols; }

std::size_t Layout::row_size(std::size_t row) const { return d_->row_sizes.at(row); }

std::size_t Layout::col_size(std::size_t col) const {
    if (d_->kind == LayoutKind::OneWay) throw Error(ErrorCode::VariantMismatch, "one-way layout has no columns");
    return d_->col_sizes.at(col);
}

std::size_t Layout::cell_size(std::size_t row, std::size_t col) const {
    if (d_->kind == LayoutKind::OneWay) throw Error(ErrorCode::VariantMismatch, "one-way layout has no cells");
    if (row >= d_->rows || col >= d_->cols) throw std::out_of_range("cell index out of range");
    return d_->unit_sizes[row * d_->cols + col];
}

bool Layout::equal_cells() const noexcept {
    const auto& s = d_->unit_sizes;
    return std::adjacent_find(s.begin(), s.end(), std::not_equal_to<>()) == s.end();
}

std::size_t Layout::flat_index(const StructuredIndex& idx) const {
    const auto& d = *d_;
    std::size_t unit = 0;
    if (d.kind == LayoutKind::OneWay) {
        if (idx.row >= d.rows || idx.col != 0) throw std::out_of_range("group index out of range");
        unit = idx.row;
    } else {
        if (idx.row >= d.rows || idx.col >= d.cols) throw std::out_of_range("cell index out of range");
        unit = idx.row * d.cols + idx.col;
    }
    if (idx.member >= d.unit_sizes[unit]) throw std::out_of_range("member index out of range");
    return d.unit_offsets[unit] + idx.member;
}

StructuredIndex Layout::structured_index(std::size_t flat) const {
    const auto& d = *d_;
    if (flat >= d.total) throw std::out_of_range("flat index out of range");
    StructuredIndex idx;
    idx.row = d.row_of[flat];
    idx.col = d.col_of[flat];
    const std::size_t unit = d.kind == LayoutKind::OneWay ? idx.row : d.cell_of[flat];
    idx.member = flat - d.unit_offsets[unit];
    return idx;
}

std::string Layout::describe() const {
    std::ostringstream os;
    switch (d_->kind) {
        case LayoutKind::OneWay:
            os << "one-way m=" << d_->rows;
            break;
        case LayoutKind::TwoWayOnePerCell:
            os << "two-way-one-per-cell m=" << d_->rows << " n=" << d_->cols;
            break;
        case LayoutKind::TwoWayCells:
            os << "two-way-cells m=" << d_->rows << " n=" << d_->cols;
            if (equal_cells()) os << " p=" << d_->unit_sizes.front();
            break;
    }
    os << " N=" << d_->total;
    return os.str();
}

bool operator==(const Layout& a, const Layout& b) noexcept {
    if (a.d_ == b.d_) return true;
    return a.d_->kind == b.d_->kind && a.d_->rows == b.d_->rows && a.d_->cols == b.d_->cols &&
           a.d_->unit_sizes == b.d_->unit_sizes;
}

void require_same_layout(const Layout& a, const Layout& b, const char* context) {
    if (!(a == b)) throw Error(ErrorCode::LayoutMismatch, std::string(context) + ": layouts differ");
}

// ---------------------------------------------------------------------------
// Value types

PValueSet::PValueSet(Layout layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
    if (values_.size() != layout_.size()) {
        throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(layout_.size()) +
                                                   " p-values, got " + std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double p = values_[i];
        // NaN fails both comparisons.
        if (!(p >= 0.0 && p <= 1.0)) {
            std::ostringstream os;
            os << "p-value at index " << i << " is " << p << ", outside [0,1]";
            throw Error(ErrorCode::OutOfRange, os.str());
        }
    }
}

PValueSet make_pvalue_set(const Layout& layout, std::vector<double> values) {
    return PValueSet(layout, std::move(values));
}

TruthMask::TruthMask(Layout layout, std::vector<bool> is_null)
    : layout_(std::move(layout)), is_null_(std::move(is_null)) {
    if (is_null_.size() != layout_.size()) {
        throw Error(ErrorCode::LengthMismatch, "truth mask length does not match layout");
    }
}

std::size_t TruthMask::null_count() const noexcept {
    return static_cast<std::size_t>(std::count(is_null_.begin(), is_null_.end(), true));
}

WeightAssignment::WeightAssignment(Layout layout, std::vector<double> weights)
    : layout_(std::move(layout)), weights_(std::move(weights)) {
    if (weights_.size() != layout_.size()) {
        throw Error(ErrorCode::LengthMismatch, "weight vector length does not match layout");
    }
    for (double w : weights_) {
        if (!(w >= 0.0)) throw Error(ErrorCode::OutOfRange, "weights must be nonnegative and defined");
    }
}

WeightAssignment WeightAssignment::uniform(const Layout& layout, double w) {
    return WeightAssignment(layout, std::vector<double>(layout.size(), w));
}

RejectionSet::RejectionSet(Layout layout, std::vector<bool> rejected, std::size_t threshold_index)
    : layout_(std::move(layout)), rejected_(std::move(rejected)), threshold_index_(threshold_index) {
    if (rejected_.size() != layout_.size()) {
        throw Error(ErrorCode::LengthMismatch, "rejection vector length does not match layout");
    }
    const auto count = static_cast<std::size_t>(std::count(rejected_.begin(), rejected_.end(), true));
    if (count != threshold_index_) {
        throw Error(ErrorCode::OutOfRange, "rejection count does not equal threshold index");
    }
}

bool operator==(const RejectionSet& a, const RejectionSet& b) noexcept {
    return a.layout_ == b.layout_ && a.threshold_index_ == b.threshold_index_ && a.rejected_ == b.rejected_;
}

// ---------------------------------------------------------------------------
// Metrics

double fdp(const RejectionSet& rej, const TruthMask& truth) {
    require_same_layout(rej.layout(), truth.layout(), "fdp");
    std::size_t r = 0;
    std::size_t v = 0;
    for (std::size_t i = 0; i < rej.size(); ++i) {
        if (!rej.rejected_at(i)) continue;
        ++r;
        if (truth.null_at(i)) ++v;
    }
    return static_cast<double>(v) / static_cast<double>(std::max<std::size_t>(r, 1));
}

double power(const RejectionSet& rej, const TruthMask& truth) {
    require_same_layout(rej.layout(), truth.layout(), "power");
    std::size_t signals = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < rej.size(); ++i) {
        if (truth.null_at(i)) continue;
        ++signals;
        if (rej.rejected_at(i)) ++hits;
    }
    if (signals == 0) return 0.0;
    return static_cast<double>(hits) / static_cast<double>(signals);
}

ProportionTable null_proportions(const TruthMask& truth) {
    const Layout& layout = truth.layout();
    ProportionTable t;
    std::vector<std::size_t> row_nulls(layout.rows(), 0);
    std::vector<std::size_t> col_nulls(layout.cols(), 0);
    std::vector<std::size_t> cell_nulls(layout.cell_count(), 0);
    std::size_t total_nulls = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!truth.null_at(i)) continue;
        ++total_nulls;
        ++row_nulls[layout.row_of(i)];
        if (layout.kind() != LayoutKind::OneWay) {
            ++col_nulls[layout.col_of(i)];
            ++cell_nulls[layout.cell_of(i)];
        }
    }
    t.overall = static_cast<double>(total_nulls) / static_cast<double>(layout.size());
    t.rows.resize(layout.rows());
    for (std::size_t g = 0; g < layout.rows(); ++g) {
        t.rows[g] = static_cast<double>(row_nulls[g]) / static_cast<double>(layout.row_size(g));
    }
    if (layout.kind() != LayoutKind::OneWay) {
        t.cols.resize(layout.cols());
        for (std::size_t h = 0; h < layout.cols(); ++h) {
            t.cols[h] = static_cast<double>(col_nulls[h]) / static_cast<double>(layout.col_size(h));
        }
        t.cells.resize(layout.cell_count());
        for (std::size_t g = 0; g < layout.rows(); ++g) {
            for (std::size_t h = 0; h < layout.cols(); ++h) {
                const std::size_t c = g * layout.cols() + h;
                t.cells[c] = static_cast<double>(cell_nulls[c]) / static_cast<double>(layout.cell_size(g, h));
            }
        }
    }
    return t;
}

}  // namespace gbh
