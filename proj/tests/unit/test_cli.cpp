#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using namespace twso;
using twso::cli::run_cli;

namespace {

struct Outcome {
    int status;
    std::string out, err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth writes a truth and mask pair") {
    tsupport::TempDir d("cli_synth");
    const auto r = call({"synth", "stripe", "--size", "64", "--gap", "straight:8", "--output",
                         (d / "t.png").string(), "--mask", (d / "m.png").string()});
    REQUIRE(r.status == 0);
    const auto fx = make_stripe_fixture(64, 64, {GapShape::straight, 8});
    CHECK(load_image(d / "t.png") == fx.truth);
    CHECK(load_mask(d / "m.png") == fx.mask);
    CHECK(call({"synth", "stripe", "--gap", "curvy", "--output", (d / "x.png").string(), "--mask",
                (d / "y.png").string()})
              .status != 0);
}

TEST_CASE("degrade is deterministic in the seed") {
    tsupport::TempDir d("cli_deg");
    REQUIRE(call({"synth", "shapes", "--size", "32", "-o", (d / "c.png").string()}).status == 0);
    for (const char* name : {"a.png", "b.png"}) {
        REQUIRE(call({"degrade", "saltpepper", "--density", "0.2", "--seed", "7", "-i",
                      (d / "c.png").string(), "-o", (d / name).string()})
                    .status == 0);
    }
    CHECK(slurp(d / "a.png") == slurp(d / "b.png"));
    REQUIRE(call({"degrade", "gaussian", "--variance", "0.01", "--seed", "7", "-i",
                  (d / "c.png").string(), "-o", (d / "g.png").string()})
                .status == 0);
    CHECK(call({"degrade", "mask", "--fraction", "0.25", "--seed", "1", "-i", (d / "c.png").string(),
                "-o", (d / "m.png").string(), "--observed", (d / "obs.png").string()})
              .status == 0);
    CHECK(load_mask(d / "m.png").missing_count() == 256u);
    CHECK(call({"degrade", "blur", "-i", (d / "c.png").string(), "-o", (d / "z.png").string()})
              .status != 0);
}

TEST_CASE("metrics of an image against itself") {
    tsupport::TempDir d("cli_met");
    REQUIRE(call({"synth", "shapes", "--size", "32", "-o", (d / "a.png").string()}).status == 0);
    const auto r = call({"metrics", "--ref", (d / "a.png").string(), "--test", (d / "a.png").string()});
    REQUIRE(r.status == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "command");
    CHECK(rows[1][3] == "inf");
    CHECK(std::stod(rows[1][4]) == doctest::Approx(1.0));
    CHECK(std::stod(rows[1][5]) == 0.0);
}

TEST_CASE("denoise: happy path, validation and metrics row") {
    tsupport::TempDir d("cli_den");
    const ScalarField truth = make_shapes_fixture(32, 32);
    save_image(truth, d / "clean.png");
    save_image(add_gaussian_noise(truth, 0.01, 2), d / "noisy.png");

    auto r = call({"denoise", "--input", (d / "noisy.png").string(), "--output",
                   (d / "out.png").string(), "--p", "2", "--eta", "20", "--max-iter", "30"});
    CHECK(r.status == 0);
    CHECK(std::filesystem::exists(d / "out.png"));

    r = call({"denoise", "--input", (d / "noisy.png").string(), "--output", (d / "o3.png").string(),
              "--p", "3"});
    CHECK(r.status != 0);
    CHECK_FALSE(std::filesystem::exists(d / "o3.png"));
    CHECK(call({"denoise", "-i", (d / "noisy.png").string(), "-o", (d / "o4.png").string(), "--eta",
                "-1"})
              .status != 0);
    CHECK(call({"denoise", "-i", (d / "nothing.png").string(), "-o", (d / "o5.png").string()})
              .status != 0);

    for (int k = 0; k < 2; ++k) {
        r = call({"denoise", "-i", (d / "noisy.png").string(), "-o", (d / "out.png").string(),
                  "--max-iter", "30", "--reference", (d / "clean.png").string(), "--metrics-csv",
                  (d / "m.csv").string()});
        REQUIRE(r.status == 0);
    }
    const auto rows = parse_csv(slurp(d / "m.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"command", "input", "reference", "psnr", "ssim",
                                              "mse", "iterations"});
    CHECK(rows[1][0] == "denoise");
    CHECK(rows[1] == rows[2]);
    CHECK(std::stod(rows[1][3]) > 20.0);
}

TEST_CASE("per-iteration log goes to stderr") {
    tsupport::TempDir d("cli_log");
    save_image(make_shapes_fixture(32, 32), d / "a.png");
    const auto r = call({"denoise", "-i", (d / "a.png").string(), "-o", (d / "b.png").string(),
                         "--max-iter", "3", "--tol", "1e-300", "--log"});
    REQUIRE(r.status == 0);
    CHECK(r.err.find("iter 3 split") != std::string::npos);
}

TEST_CASE("inpaint: stripe end to end") {
    tsupport::TempDir d("cli_inp");
    REQUIRE(call({"synth", "stripe", "--size", "64", "--gap", "straight:8", "-o",
                  (d / "t.png").string(), "-m", (d / "m.png").string(), "--observed",
                  (d / "f.png").string()})
                .status == 0);
    const auto r = call({"inpaint", "-i", (d / "f.png").string(), "-m", (d / "m.png").string(), "-o",
                         (d / "u.png").string(), "--reference", (d / "t.png").string()});
    REQUIRE(r.status == 0);
    CHECK(psnr(load_image(d / "u.png"), load_image(d / "t.png")) >= 40.0);
    CHECK(parse_csv(r.out)[1][0] == "inpaint");
}

TEST_CASE("inpaint: mask checks and degenerate masks") {
    tsupport::TempDir d("cli_inp2");
    const ScalarField f = add_gaussian_noise(make_shapes_fixture(32, 32), 0.01, 3);
    save_image(f, d / "f.png");
    save_mask(MaskField(32, 40), d / "bad.png");
    CHECK(call({"inpaint", "-i", (d / "f.png").string(), "-m", (d / "bad.png").string(), "-o",
                (d / "u.png").string()})
              .status != 0);
    CHECK(call({"inpaint", "-i", (d / "f.png").string(), "-o", (d / "u.png").string()}).status != 0);

    save_mask(MaskField(32, 32, false), d / "none.png");
    CHECK(call({"inpaint", "-i", (d / "f.png").string(), "-m", (d / "none.png").string(), "-o",
                (d / "u.png").string(), "--max-iter", "20"})
              .status == 0);

    // every pixel known: same run as denoise with the same settings
    save_mask(MaskField(32, 32, true), d / "all.png");
    const std::vector<std::string> shared{"--eta", "20", "--theta1", "10", "--theta2", "10",
                                          "--theta3", "100", "--tensor-mode", "edge",
                                          "--contrast", "0.05", "--max-iter", "40"};
    std::vector<std::string> a{"inpaint", "-i", (d / "f.png").string(), "-m",
                               (d / "all.png").string(), "-o", (d / "ua.png").string()};
    std::vector<std::string> b{"denoise", "-i", (d / "f.png").string(), "-o", (d / "ub.png").string()};
    a.insert(a.end(), shared.begin(), shared.end());
    b.insert(b.end(), shared.begin(), shared.end());
    a.insert(a.end(), {"--refine-every", "0"});
    REQUIRE(call(a).status == 0);
    REQUIRE(call(b).status == 0);
    CHECK(slurp(d / "ua.png") == slurp(d / "ub.png"));
}

TEST_CASE("config file sits between flags and defaults") {
    tsupport::TempDir d("cli_cfg");
    {
        std::ofstream os(d / "c.toml");
        os << "eta = 5\ntheta1 = 2.5\ntensor-mode = \"coherence\"\nmax_iter = 12\nseed = 4\n";
    }
    const cli::Overrides file = cli::read_config_file(d / "c.toml");
    cli::Overrides flags;
    flags.eta = 7.0;
    const SolverParams p = cli::resolve_params(Task::denoise, flags, file);
    CHECK(p.eta == 7.0);
    CHECK(p.theta1 == 2.5);
    CHECK(p.max_iter == 12);
    CHECK(p.tensor.mode == TensorMode::coherence);
    CHECK(p.theta2 == SolverParams::denoise_defaults().theta2);
    CHECK(file.seed == Seed{4});

    cli::Overrides impulse;
    impulse.p = 1;
    CHECK(cli::resolve_params(Task::denoise, impulse, {}).eta ==
          SolverParams::impulse_defaults().eta);

    {
        std::ofstream os(d / "bad.toml");
        os << "eta = [1, 2\n";
    }
    CHECK_THROWS_AS(cli::read_config_file(d / "bad.toml"), std::runtime_error);
    {
        std::ofstream os(d / "typo.toml");
        os << "eta = \"big\"\n";
    }
    CHECK_THROWS_AS(cli::read_config_file(d / "typo.toml"), std::runtime_error);

    save_image(make_shapes_fixture(32, 32), d / "a.png");
    CHECK(call({"denoise", "-i", (d / "a.png").string(), "-o", (d / "b.png").string(), "--config",
                (d / "c.toml").string()})
              .status == 0);
    CHECK(call({"denoise", "-i", (d / "a.png").string(), "-o", (d / "b.png").string(), "--config",
                (d / "bad.toml").string()})
              .status != 0);
}

TEST_CASE("bench: rows, summaries and determinism") {
    tsupport::TempDir d("cli_bench");
    std::filesystem::create_directory(d / "corpus");
    save_image(make_shapes_fixture(32, 32), d / "corpus" / "a.png");
    save_image(make_shapes_fixture(32, 48).transposed(), d / "corpus" / "b.pgm");
    save_image(make_stripe_fixture(32, 32, {}).truth, d / "corpus" / "c.png");
    {
        std::ofstream os(d / "corpus" / "notes.txt");
        os << "ignored";
    }

    auto bench = [&](const std::string& out) {
        return call({"bench", "--corpus", (d / "corpus").string(), "--task", "gaussian", "--levels",
                     "0.005", "0.02", "--seed", "3", "--max-iter", "15", "--output",
                     (d / out).string()});
    };
    REQUIRE(bench("one.csv").status == 0);
    REQUIRE(bench("two.csv").status == 0);
    const auto one = parse_csv(slurp(d / "one.csv"));
    const auto two = parse_csv(slurp(d / "two.csv"));
    REQUIRE(one.size() == 1 + 6 + 2);
    CHECK(one[0].size() == 12);
    CHECK(one[0][0] == "image");
    CHECK(one[0][11] == "wall_seconds");

    for (std::size_t i = 1; i < one.size(); ++i) {
        REQUIRE(one[i].size() == 12);
        std::vector<std::string> a(one[i].begin(), one[i].end() - 1), b(two[i].begin(), two[i].end() - 1);
        CHECK(a == b);
    }
    for (std::size_t s : {4u, 8u}) {
        const auto& sum = one[s];
        CHECK(sum[0] == "summary");
        double mp = 0.0, ms = 0.0;
        for (std::size_t r = s - 3; r < s; ++r) {
            CHECK(one[r][2] == sum[2]);
            mp += std::stod(one[r][6]);
            ms += std::stod(one[r][7]);
        }
        CHECK(std::abs(std::stod(sum[6]) - mp / 3) <= 1e-12 * std::abs(mp));
        CHECK(std::abs(std::stod(sum[7]) - ms / 3) <= 1e-12);
        double var = 0.0;
        for (std::size_t r = s - 3; r < s; ++r) var += std::pow(std::stod(one[r][6]) - mp / 3, 2);
        CHECK(std::stod(sum[8]) == doctest::Approx(std::sqrt(var / 2)));
    }

    std::filesystem::create_directory(d / "empty");
    CHECK(call({"bench", "--corpus", (d / "empty").string()}).status != 0);

    {
        std::ofstream os(d / "b.toml");
        os << "max-iter = 5\n[bench]\ntask = \"saltpepper\"\nlevels = [0.1]\ncorpus = \""
           << (d / "corpus").generic_string() << "\"\n";
    }
    const auto r = call({"bench", "--config", (d / "b.toml").string()});
    REQUIRE(r.status == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[1][1] == "saltpepper");
    CHECK(rows[1][10] == "5");
}

TEST_CASE("usage errors") {
    CHECK(call({}).status != 0);
    CHECK(call({"frobnicate"}).status != 0);
    CHECK(call({"denoise", "--tensor-mode", "sideways"}).status != 0);
    CHECK(call({"--help"}).status == 0);
}

}
