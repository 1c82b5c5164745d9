#include "twso/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace twso {

namespace {

// std::mt19937_64 output is fixed by the standard; the standard
// distributions are not, so the transforms below are spelled out.
class Rng {
public:
    explicit Rng(Seed seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n), unbiased by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal by Box-Muller; both variates of a pair are used.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace

ScalarField add_gaussian_noise(const ScalarField& u, double variance, Seed seed) {
    if (!(variance >= 0.0)) throw std::invalid_argument("variance must be >= 0");
    if (variance == 0.0) return u;
    Rng rng(seed);
    const double sd = std::sqrt(variance);
    ScalarField out = u;
    for (double& v : out.values()) v = std::clamp(v + sd * rng.normal(), 0.0, 1.0);
    return out;
}

ScalarField add_salt_pepper(const ScalarField& u, double density, Seed seed) {
    if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in [0, 1]");
    Rng rng(seed);
    ScalarField out = u;
    for (double& v : out.values()) {
        // Two draws per pixel regardless of outcome keeps streams aligned.
        const double hit = rng.uniform();
        const double which = rng.uniform();
        if (hit < density) v = which < 0.5 ? 0.0 : 1.0;
    }
    return out;
}

MaskField make_random_mask(int rows, int cols, double missing_fraction, Seed seed) {
    if (!(missing_fraction >= 0.0 && missing_fraction <= 1.0)) {
        throw std::invalid_argument("missing fraction must lie in [0, 1]");
    }
    MaskField mask(rows, cols, true);
    const std::size_t n = mask.size();
    const auto missing = static_cast<std::size_t>(std::llround(missing_fraction * static_cast<double>(n)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    // Partial Fisher-Yates: the first `missing` slots become a uniform sample.
    for (std::size_t k = 0; k < missing; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.below(n - k));
        std::swap(idx[k], idx[pick]);
        const std::size_t p = idx[k];
        mask.set_known(static_cast<int>(p / cols), static_cast<int>(p % cols), false);
    }
    return mask;
}

GapSpec GapSpec::parse(const std::string& text) {
    GapSpec g;
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    if (name == "straight") {
        g.shape = GapShape::straight;
    } else if (name == "slanted") {
        g.shape = GapShape::slanted;
    } else if (name == "zigzag") {
        g.shape = GapShape::zigzag;
    } else if (name == "wide") {
        g.shape = GapShape::wide;
    } else {
        throw std::invalid_argument("unknown gap geometry '" + name + "'");
    }
    if (colon != std::string::npos) {
        std::size_t used = 0;
        const std::string w = text.substr(colon + 1);
        try {
            g.width = std::stoi(w, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != w.size()) throw std::invalid_argument("bad gap width '" + w + "'");
    }
    if (g.width < 1) throw std::invalid_argument("gap width must be >= 1");
    return g;
}

StripeFixture make_stripe_fixture(int rows, int cols, const GapSpec& gap) {
    if (gap.width < 1) throw std::invalid_argument("gap width must be >= 1");
    ScalarField truth(rows, cols, 1.0);
    const int thickness = std::max(2, rows / 4);
    const int top = (rows - thickness) / 2;
    for (int i = top; i < top + thickness; ++i)
        for (int j = 0; j < cols; ++j) truth(i, j) = 0.0;

    const int width = gap.shape == GapShape::wide ? 3 * gap.width : gap.width;
    const int base = (cols - width) / 2;
    auto offset = [&](int i) -> int {
        switch (gap.shape) {
            case GapShape::slanted:
                // Slope of one column per two rows, centred on the stripe.
                return static_cast<int>(std::lround((i - rows / 2) * 0.5));
            case GapShape::zigzag: {
                const int period = std::max(4, rows / 4);
                return std::abs(i % period - period / 2) - period / 4;
            }
            default:
                return 0;
        }
    };

    MaskField mask(rows, cols, true);
    for (int i = 0; i < rows; ++i) {
        const int c0 = base + offset(i);
        if (c0 < 0 || c0 + width > cols) {
            throw std::invalid_argument("gap geometry does not fit inside the image");
        }
        for (int j = c0; j < c0 + width; ++j) mask.set_known(i, j, false);
    }
    return {std::move(truth), std::move(mask)};
}

ScalarField make_shapes_fixture(int rows, int cols) {
    if (rows < 32 || cols < 32) throw std::invalid_argument("shapes fixture needs at least 32x32");
    constexpr double background = 0.3;
    ScalarField u(rows, cols, background);

    // Smooth dome: paraboloid that meets the background continuously.
    const double cy = 0.3 * rows, cx = 0.3 * cols;
    const double radius = 0.22 * std::min(rows, cols);
    // Sharp square.
    const int sq_top = static_cast<int>(0.55 * rows), sq_bottom = static_cast<int>(0.85 * rows);
    const int sq_left = static_cast<int>(0.1 * cols), sq_right = static_cast<int>(0.4 * cols);
    // Sharp triangle: apex at top, base along sq_bottom.
    const double apex_y = 0.15 * rows, apex_x = 0.75 * cols;
    const double base_y = 0.85 * rows, half_base = 0.2 * cols;

    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double y = i + 0.5, x = j + 0.5;
            const double r = std::hypot(y - cy, x - cx);
            if (r < radius) u(i, j) = background + 0.5 * (1.0 - (r / radius) * (r / radius));
            if (i >= sq_top && i < sq_bottom && j >= sq_left && j < sq_right) u(i, j) = 0.9;
            if (y >= apex_y && y < base_y) {
                const double half = half_base * (y - apex_y) / (base_y - apex_y);
                if (std::abs(x - apex_x) <= half) u(i, j) = 0.05;
            }
        }
    }
    return u;
}

ScalarField apply_mask(const ScalarField& truth, const MaskField& mask, double fill) {
    if (!mask.matches(truth)) throw std::invalid_argument("mask and image dimensions differ");
    ScalarField out = truth;
    for (std::size_t k = 0; k < out.size(); ++k)
        if (!mask.known(k)) out[k] = fill;
    return out;
}

}  // namespace twso
