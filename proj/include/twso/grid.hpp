#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace twso {

/// Periodic index: i mod n with a nonnegative result. Requires n >= 1.
constexpr int wrap_index(int i, int n) noexcept {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

/// Row-major M x N grid of doubles. Rows run along y, columns along x.
/// Samples nominally live in [0, 1].
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int rows, int cols, double fill = 0.0);
    ScalarField(int rows, int cols, std::vector<double> data);

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(int r, int c) noexcept { return data_[index(r, c)]; }
    double operator()(int r, int c) const noexcept { return data_[index(r, c)]; }

    /// Periodic access; any integer row/column is folded back onto the grid.
    [[nodiscard]] double wrapped(int r, int c) const noexcept {
        return data_[index(wrap_index(r, rows_), wrap_index(c, cols_))];
    }

    double& operator[](std::size_t k) noexcept { return data_[k]; }
    double operator[](std::size_t k) const noexcept { return data_[k]; }

    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    [[nodiscard]] bool same_shape(const ScalarField& o) const noexcept {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    [[nodiscard]] bool all_finite() const noexcept;
    [[nodiscard]] ScalarField transposed() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double a) noexcept;

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double a, ScalarField b) noexcept { return b *= a; }

    bool operator==(const ScalarField&) const = default;

private:
    [[nodiscard]] std::size_t index(int r, int c) const noexcept {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Sum over pixels of a*b.
double inner(const ScalarField& a, const ScalarField& b);
/// Euclidean norm over all pixels.
double norm2(const ScalarField& a);
double max_abs_diff(const ScalarField& a, const ScalarField& b);
double mean(const ScalarField& a);
ScalarField clamp01(ScalarField a);

/// Known / missing indicator per pixel. "Known" is the fidelity region,
/// "missing" the inpainting domain.
class MaskField {
public:
    MaskField() = default;
    /// Every pixel known (denoising).
    MaskField(int rows, int cols, bool known = true);
    MaskField(int rows, int cols, std::vector<std::uint8_t> known);

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return known_.size(); }

    [[nodiscard]] bool known(int r, int c) const noexcept {
        return known_[static_cast<std::size_t>(r) * cols_ + c] != 0;
    }
    [[nodiscard]] bool known(std::size_t k) const noexcept { return known_[k] != 0; }
    void set_known(int r, int c, bool k) noexcept {
        known_[static_cast<std::size_t>(r) * cols_ + c] = k ? 1 : 0;
    }

    [[nodiscard]] std::size_t known_count() const noexcept;
    [[nodiscard]] std::size_t missing_count() const noexcept { return size() - known_count(); }
    [[nodiscard]] bool all_known() const noexcept { return known_count() == size(); }

    [[nodiscard]] bool matches(const ScalarField& f) const noexcept {
        return rows_ == f.rows() && cols_ == f.cols();
    }

    bool operator==(const MaskField&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> known_;
};

/// Channel-wise image: one field for grayscale, three for RGB.
using Channels = std::vector<ScalarField>;

/// Reads a binary PGM/PPM (P5/P6) or PNG. Color is averaged to one luminance
/// channel. Samples are scaled to [0, 1].
ScalarField load_image(const std::filesystem::path& path);
/// Like load_image but keeps color channels separate.
Channels load_image_channels(const std::filesystem::path& path);
/// Clamps to [0, 1], quantizes to 8 bits and writes PGM or PNG by extension.
void save_image(const ScalarField& field, const std::filesystem::path& path);
/// Writes one channel as gray, three as RGB (PPM for .ppm/.pnm/.pgm, else PNG).
void save_image_channels(const Channels& channels, const std::filesystem::path& path);

/// Mask file convention: gray value >= 128 marks a missing pixel.
MaskField load_mask(const std::filesystem::path& path);
void save_mask(const MaskField& mask, const std::filesystem::path& path);

/// Mean over channels.
ScalarField luminance(const Channels& channels);

}  // namespace twso
