#include <doctest.h>

#include <cmath>
#include <fstream>

#include "support.hpp"

using namespace twso;

TEST_SUITE("grid") {

TEST_CASE("wrap_index folds every integer into range") {
    CHECK(wrap_index(0, 5) == 0);
    CHECK(wrap_index(5, 5) == 0);
    CHECK(wrap_index(-1, 5) == 4);
    CHECK(wrap_index(-6, 5) == 4);
    CHECK(wrap_index(12, 5) == 2);
}

TEST_CASE("fields smaller than 2x2 are rejected") {
    CHECK_THROWS_AS(ScalarField(1, 4), std::invalid_argument);
    CHECK_THROWS_AS(ScalarField(4, 1), std::invalid_argument);
    CHECK_THROWS_AS(ScalarField(2, 2, std::vector<double>(3)), std::invalid_argument);
    CHECK_THROWS_AS(MaskField(1, 3), std::invalid_argument);
}

TEST_CASE("row-major layout and periodic access") {
    ScalarField f(2, 3, std::vector<double>{0, 1, 2, 3, 4, 5});
    CHECK(f(1, 0) == 3);
    CHECK(f.wrapped(-1, -1) == 5);
    CHECK(f.wrapped(2, 3) == 0);
    const ScalarField t = f.transposed();
    CHECK(t.rows() == 3);
    CHECK(t(2, 1) == 5);
}

TEST_CASE("arithmetic and reductions against explicit sums") {
    std::mt19937_64 rng(1);
    const ScalarField a = tsupport::random_field(5, 7, rng);
    const ScalarField b = tsupport::random_field(5, 7, rng);
    double dot = 0.0, sq = 0.0, sum = 0.0, mx = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 7; ++j) {
            dot += a(i, j) * b(i, j);
            sq += a(i, j) * a(i, j);
            sum += a(i, j);
            mx = std::max(mx, std::abs(a(i, j) - b(i, j)));
        }
    CHECK(inner(a, b) == doctest::Approx(dot).epsilon(1e-14));
    CHECK(norm2(a) == doctest::Approx(std::sqrt(sq)).epsilon(1e-14));
    CHECK(mean(a) == doctest::Approx(sum / 35).epsilon(1e-14));
    CHECK(max_abs_diff(a, b) == mx);

    const ScalarField c = a + 2.0 * b - b;
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == doctest::Approx(a[k] + b[k]));
    CHECK_THROWS_AS(a + ScalarField(7, 5), std::invalid_argument);

    const ScalarField cl = clamp01(ScalarField(2, 2, std::vector<double>{-1, 0.5, 2, 1}));
    CHECK(cl == ScalarField(2, 2, std::vector<double>{0, 0.5, 1, 1}));
}

TEST_CASE("mask bookkeeping") {
    MaskField m(4, 4);
    CHECK(m.all_known());
    m.set_known(1, 2, false);
    m.set_known(3, 3, false);
    CHECK(m.known_count() == 14);
    CHECK(m.missing_count() == 2);
    CHECK_FALSE(m.known(1, 2));
    CHECK(m.matches(ScalarField(4, 4)));
    CHECK_FALSE(m.matches(ScalarField(4, 5)));
}

TEST_CASE("luminance is the channel mean") {
    Channels rgb{ScalarField(2, 2, 0.3), ScalarField(2, 2, 0.6), ScalarField(2, 2, 0.9)};
    CHECK(luminance(rgb)(1, 1) == doctest::Approx(0.6));
}

TEST_CASE("image files round-trip to 8-bit precision") {
    tsupport::TempDir dir("io");
    std::mt19937_64 rng(2);
    const ScalarField f = tsupport::random_field(9, 13, rng, 0.0, 1.0);
    for (const char* name : {"a.pgm", "a.png"}) {
        save_image(f, dir / name);
        const ScalarField g = load_image(dir / name);
        REQUIRE(g.same_shape(f));
        CHECK(max_abs_diff(f, g) <= 0.5 / 255 + 1e-12);
        // a second pass is exact
        save_image(g, dir / "b.png");
        CHECK(load_image(dir / "b.png") == g);
    }

    Channels rgb{tsupport::random_field(6, 5, rng, 0, 1), tsupport::random_field(6, 5, rng, 0, 1),
                 tsupport::random_field(6, 5, rng, 0, 1)};
    for (const char* name : {"c.ppm", "c.png"}) {
        save_image_channels(rgb, dir / name);
        const Channels back = load_image_channels(dir / name);
        REQUIRE(back.size() == 3);
        for (int c = 0; c < 3; ++c) CHECK(max_abs_diff(back[c], rgb[c]) <= 0.5 / 255 + 1e-12);
        CHECK(max_abs_diff(load_image(dir / name), luminance(back)) <= 1e-12);
    }
}

TEST_CASE("PGM header comments and small maxval") {
    tsupport::TempDir dir("pgm");
    {
        std::ofstream os(dir / "x.pgm", std::ios::binary);
        os << "P5\n# made by hand\n2 2\n# another\n15\n";
        const unsigned char px[4] = {0, 15, 5, 10};
        os.write(reinterpret_cast<const char*>(px), 4);
    }
    const ScalarField f = load_image(dir / "x.pgm");
    CHECK(f(0, 1) == doctest::Approx(1.0));
    CHECK(f(1, 0) == doctest::Approx(5.0 / 15.0));
}

TEST_CASE("broken image files raise errors naming the path") {
    tsupport::TempDir dir("bad");
    {
        std::ofstream os(dir / "short.pgm", std::ios::binary);
        os << "P5\n4 4\n255\nab";
    }
    {
        std::ofstream os(dir / "junk.png", std::ios::binary);
        os << "not an image";
    }
    CHECK_THROWS_AS(load_image(dir / "short.pgm"), std::runtime_error);
    CHECK_THROWS_AS(load_image(dir / "junk.png"), std::runtime_error);
    CHECK_THROWS_AS(load_image(dir / "missing.png"), std::runtime_error);
    try {
        load_image(dir / "short.pgm");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("short.pgm") != std::string::npos);
    }
}

TEST_CASE("mask files: white means missing") {
    tsupport::TempDir dir("mask");
    MaskField m(5, 6);
    m.set_known(0, 0, false);
    m.set_known(4, 5, false);
    save_mask(m, dir / "m.png");
    CHECK(load_mask(dir / "m.png") == m);

    ScalarField img(5, 6, 0.2);
    img(2, 2) = 0.9;  // >= 128/255
    img(2, 3) = 0.4;
    save_image(img, dir / "g.pgm");
    const MaskField g = load_mask(dir / "g.pgm");
    CHECK(g.missing_count() == 1);
    CHECK_FALSE(g.known(2, 2));
}

}
