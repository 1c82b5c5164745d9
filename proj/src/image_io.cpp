#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "twso/grid.hpp"

namespace twso {

namespace {

namespace fs = std::filesystem;

struct Raster {
    int rows = 0;
    int cols = 0;
    int channels = 1;  // 1 or 3
    std::vector<std::uint8_t> px;  // interleaved, row-major
};

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

std::string lower_ext(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return ext;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Netpbm header token reader that skips whitespace and '#' comments.
class PnmHeader {
public:
    PnmHeader(const std::vector<std::uint8_t>& bytes, const fs::path& path)
        : bytes_(bytes), path_(path) {}

    int next_int() {
        skip();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail(path_, "malformed PNM header");
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_++] - '0');
            if (v > (1L << 30)) fail(path_, "PNM header value out of range");
        }
        return static_cast<int>(v);
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset() const { return pos_ + 1; }
    void seek(std::size_t p) { pos_ = p; }

private:
    void skip() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    const fs::path& path_;
    std::size_t pos_ = 0;
};

Raster read_pnm(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
    Raster r;
    r.channels = bytes[1] == '5' ? 1 : 3;
    PnmHeader hdr(bytes, path);
    hdr.seek(2);
    r.cols = hdr.next_int();
    r.rows = hdr.next_int();
    const int maxval = hdr.next_int();
    if (r.rows == 0 || r.cols == 0) fail(path, "zero-sized image");
    if (maxval <= 0 || maxval > 255) fail(path, "only 8-bit PNM is supported");
    const std::size_t n = static_cast<std::size_t>(r.rows) * r.cols * r.channels;
    const std::size_t off = hdr.raster_offset();
    if (off > bytes.size() || bytes.size() - off < n) fail(path, "truncated PNM raster");
    r.px.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                bytes.begin() + static_cast<std::ptrdiff_t>(off + n));
    if (maxval != 255) {
        for (auto& v : r.px) v = static_cast<std::uint8_t>(std::lround(v * 255.0 / maxval));
    }
    return r;
}

Raster read_png(const fs::path& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
        fail(path, std::string("PNG decode error: ") + img.message);
    }
    Raster r;
    r.cols = static_cast<int>(img.width);
    r.rows = static_cast<int>(img.height);
    r.channels = (img.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
    img.format = r.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (r.rows == 0 || r.cols == 0) {
        png_image_free(&img);
        fail(path, "zero-sized image");
    }
    r.px.resize(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, r.px.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        fail(path, "PNG decode error: " + msg);
    }
    return r;
}

Raster read_raster(const fs::path& path) {
    const auto bytes = read_bytes(path);
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return read_png(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
        return read_pnm(bytes, path);
    }
    if (bytes.empty()) fail(path, "empty file");
    fail(path, "unsupported image format (expected binary PGM/PPM or PNG)");
}

void write_pnm(const Raster& r, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << (r.channels == 1 ? "P5" : "P6") << '\n' << r.cols << ' ' << r.rows << "\n255\n";
    out.write(reinterpret_cast<const char*>(r.px.data()), static_cast<std::streamsize>(r.px.size()));
    if (!out) fail(path, "write failed");
}

void write_png(const Raster& r, const fs::path& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(r.cols);
    img.height = static_cast<png_uint_32>(r.rows);
    img.format = r.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.string().c_str(), 0, r.px.data(), 0, nullptr)) {
        fail(path, std::string("PNG encode error: ") + img.message);
    }
}

void write_raster(const Raster& r, const fs::path& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
        write_pnm(r, path);
    } else if (ext == ".png") {
        write_png(r, path);
    } else {
        fail(path, "unsupported output extension '" + ext + "'");
    }
}

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Channels load_image_channels(const fs::path& path) {
    const Raster r = read_raster(path);
    if (r.rows < 2 || r.cols < 2) fail(path, "image must be at least 2x2");
    Channels out(static_cast<std::size_t>(r.channels), ScalarField(r.rows, r.cols));
    const std::size_t n = static_cast<std::size_t>(r.rows) * r.cols;
    for (std::size_t k = 0; k < n; ++k)
        for (int ch = 0; ch < r.channels; ++ch)
            out[ch][k] = r.px[k * r.channels + ch] / 255.0;
    return out;
}

ScalarField load_image(const fs::path& path) { return luminance(load_image_channels(path)); }

void save_image_channels(const Channels& channels, const fs::path& path) {
    if (channels.size() != 1 && channels.size() != 3) {
        throw std::invalid_argument("expected 1 or 3 channels");
    }
    Raster r;
    r.rows = channels.front().rows();
    r.cols = channels.front().cols();
    r.channels = static_cast<int>(channels.size());
    const std::size_t n = static_cast<std::size_t>(r.rows) * r.cols;
    r.px.resize(n * r.channels);
    for (std::size_t k = 0; k < n; ++k)
        for (int ch = 0; ch < r.channels; ++ch) r.px[k * r.channels + ch] = quantize(channels[ch][k]);
    if (r.channels == 3 && lower_ext(path) == ".pgm") fail(path, "PGM cannot hold color");
    write_raster(r, path);
}

void save_image(const ScalarField& field, const fs::path& path) {
    save_image_channels(Channels{field}, path);
}

MaskField load_mask(const fs::path& path) {
    const Raster r = read_raster(path);
    if (r.rows < 2 || r.cols < 2) fail(path, "mask must be at least 2x2");
    const std::size_t n = static_cast<std::size_t>(r.rows) * r.cols;
    std::vector<std::uint8_t> known(n);
    for (std::size_t k = 0; k < n; ++k) {
        int sum = 0;
        for (int ch = 0; ch < r.channels; ++ch) sum += r.px[k * r.channels + ch];
        known[k] = sum < 128 * r.channels ? 1 : 0;
    }
    return {r.rows, r.cols, std::move(known)};
}

void save_mask(const MaskField& mask, const fs::path& path) {
    Raster r;
    r.rows = mask.rows();
    r.cols = mask.cols();
    r.px.resize(mask.size());
    for (std::size_t k = 0; k < mask.size(); ++k) r.px[k] = mask.known(k) ? 0 : 255;
    write_raster(r, path);
}

}  // namespace twso
