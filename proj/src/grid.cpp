#include "twso/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace twso {

namespace {

void check_dims(int rows, int cols) {
    if (rows < 2 || cols < 2) {
        throw std::invalid_argument("grid must be at least 2x2, got " + std::to_string(rows) +
                                    "x" + std::to_string(cols));
    }
}

void check_same(const ScalarField& a, const ScalarField& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("field dimension mismatch");
}

}  // namespace

ScalarField::ScalarField(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
    check_dims(rows, cols);
    data_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

ScalarField::ScalarField(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    check_dims(rows, cols);
    if (data_.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("data length does not match grid dimensions");
    }
}

bool ScalarField::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField ScalarField::transposed() const {
    ScalarField t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    check_same(*this, o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    check_same(*this, o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double a) noexcept {
    for (double& v : data_) v *= a;
    return *this;
}

double inner(const ScalarField& a, const ScalarField& b) {
    check_same(a, b);
    return std::transform_reduce(a.values().begin(), a.values().end(), b.values().begin(), 0.0);
}

double norm2(const ScalarField& a) { return std::sqrt(inner(a, a)); }

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    check_same(a, b);
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double mean(const ScalarField& a) {
    if (a.empty()) return 0.0;
    return std::accumulate(a.values().begin(), a.values().end(), 0.0) /
           static_cast<double>(a.size());
}

ScalarField clamp01(ScalarField a) {
    for (double& v : a.values()) v = std::clamp(v, 0.0, 1.0);
    return a;
}

MaskField::MaskField(int rows, int cols, bool known) : rows_(rows), cols_(cols) {
    check_dims(rows, cols);
    known_.assign(static_cast<std::size_t>(rows) * cols, known ? 1 : 0);
}

MaskField::MaskField(int rows, int cols, std::vector<std::uint8_t> known)
    : rows_(rows), cols_(cols), known_(std::move(known)) {
    check_dims(rows, cols);
    if (known_.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("mask length does not match grid dimensions");
    }
    for (auto& k : known_) k = k ? 1 : 0;
}

std::size_t MaskField::known_count() const noexcept {
    return static_cast<std::size_t>(std::count(known_.begin(), known_.end(), std::uint8_t{1}));
}

ScalarField luminance(const Channels& channels) {
    if (channels.empty()) throw std::invalid_argument("no channels");
    if (channels.size() == 1) return channels.front();
    ScalarField out(channels.front().rows(), channels.front().cols());
    for (const auto& ch : channels) out += ch;
    out *= 1.0 / static_cast<double>(channels.size());
    return out;
}

}  // namespace twso
