#pragma once

#include <cstdint>
#include <string>

#include "twso/grid.hpp"

// Synthetic degradations and test fixtures. Every generator is a pure
// function of its arguments: same seed, same bits, on every platform.

namespace twso {

using Seed = std::uint64_t;

/// Adds i.i.d. N(0, variance) noise and clamps to [0, 1].
ScalarField add_gaussian_noise(const ScalarField& u, double variance, Seed seed);

/// Replaces each pixel with probability `density` by 0 or 1 (equally likely).
ScalarField add_salt_pepper(const ScalarField& u, double density, Seed seed);

/// Marks exactly round(fraction * M * N) pixels missing, uniformly without replacement.
MaskField make_random_mask(int rows, int cols, double missing_fraction, Seed seed);

enum class GapShape { straight, slanted, zigzag, wide };

struct GapSpec {
    GapShape shape = GapShape::straight;
    int width = 8;

    /// Parses "straight:8", "slanted:6", "zigzag", ... (width defaults to 8).
    static GapSpec parse(const std::string& text);
};

struct StripeFixture {
    ScalarField truth;  ///< white background, black horizontal stripe
    MaskField mask;     ///< missing band crossing the stripe
};

/// Black horizontal stripe on white with a gap of the given geometry.
/// A "wide" gap is a straight band three times the requested width.
StripeFixture make_stripe_fixture(int rows, int cols, const GapSpec& gap);

/// Piecewise-smooth test image: flat background, a smooth dome, and
/// sharp-edged square and triangle. Requires rows, cols >= 32.
ScalarField make_shapes_fixture(int rows, int cols);

/// Observed image for inpainting: truth on known pixels, `fill` on missing ones.
ScalarField apply_mask(const ScalarField& truth, const MaskField& mask, double fill = 0.5);

}  // namespace twso
