#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <toml.hpp>

#include "twso/twso.hpp"

namespace twso::cli {

namespace fs = std::filesystem;

namespace {

// Usage errors (bad values, missing files on the command line) vs failures at run time.
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
    if (!dst && src) dst = src;
}

Overrides merge(Overrides cli, const Overrides& file) {
    take(cli.p, file.p);
    take(cli.eta, file.eta);
    take(cli.theta1, file.theta1);
    take(cli.theta2, file.theta2);
    take(cli.theta3, file.theta3);
    take(cli.sigma, file.sigma);
    take(cli.rho, file.rho);
    take(cli.contrast, file.contrast);
    take(cli.gamma, file.gamma);
    take(cli.tensor_mode, file.tensor_mode);
    take(cli.max_iter, file.max_iter);
    take(cli.refine_every, file.refine_every);
    take(cli.tol, file.tol);
    take(cli.seed, file.seed);
    return cli;
}

TensorMode parse_mode(const std::string& s) {
    if (s == "edge") return TensorMode::edge;
    if (s == "coherence") return TensorMode::coherence;
    throw UsageError("tensor mode must be 'edge' or 'coherence', got '" + s + "'");
}

template <class T>
std::optional<T> toml_get(const toml::table& t, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        if (const auto* node = t.get(k)) {
            if (auto v = node->value<T>()) return v;
            throw std::runtime_error(std::string("config key '") + k + "' has the wrong type");
        }
    }
    return std::nullopt;
}

void add_solver_flags(CLI::App* app, Overrides& o) {
    app->add_option("--p", o.p, "fidelity exponent")->check(CLI::IsMember({1, 2}));
    app->add_option("--eta", o.eta, "fidelity weight");
    app->add_option("--theta1", o.theta1);
    app->add_option("--theta2", o.theta2);
    app->add_option("--theta3", o.theta3);
    app->add_option("--sigma", o.sigma, "pre-smoothing scale");
    app->add_option("--rho", o.rho, "tensor averaging scale");
    app->add_option("--contrast", o.contrast, "contrast parameter C");
    app->add_option("--gamma", o.gamma, "coherence floor eigenvalue");
    app->add_option("--tensor-mode", o.tensor_mode)
        ->check(CLI::IsMember({"edge", "coherence"}));
    app->add_option("--max-iter", o.max_iter);
    app->add_option("--tol", o.tol, "relative-change stop");
    app->add_option("--refine-every", o.refine_every, "tensor refresh period, 0 = never");
}

// Same channel count: pooled MSE, SSIM averaged over channels. Otherwise luminance.
MetricReport evaluate_channels(const Channels& test, const Channels& ref) {
    if (test.size() != ref.size()) return evaluate(luminance(test), luminance(ref));
    MetricReport r;
    for (std::size_t c = 0; c < test.size(); ++c) {
        r.mse += mse(test[c], ref[c]);
        r.ssim += ssim(test[c], ref[c]);
    }
    r.mse /= static_cast<double>(test.size());
    r.ssim /= static_cast<double>(test.size());
    r.psnr = r.mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(1.0 / r.mse);
    return r;
}

void append_row(const fs::path& path, const char* header, const std::string& row) {
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    std::ofstream os(path, std::ios::app);
    if (!os) throw std::runtime_error(path.string() + ": cannot open for appending");
    if (fresh) os << header << '\n';
    os << row << '\n';
    if (!os) throw std::runtime_error(path.string() + ": write failed");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}

std::string metrics_row(const std::string& command, const fs::path& input, const fs::path& ref,
                        const MetricReport& m, std::optional<int> iterations) {
    return command + ',' + csv_field(input.string()) + ',' + csv_field(ref.string()) + ',' +
           num(m.psnr) + ',' + num(m.ssim) + ',' + num(m.mse) + ',' +
           (iterations ? std::to_string(*iterations) : std::string());
}

void require_file(const fs::path& p, const char* what) {
    if (p.empty()) throw UsageError(std::string(what) + " path is required");
}

IterationCallback residual_logger(bool enabled, std::ostream& err) {
    if (!enabled) return {};
    return [&err](const IterationRecord& r) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "iter %d split %.3e hessian %.3e tensor %.3e change %.3e\n",
                      r.iteration, r.split_residual, r.hessian_residual, r.tensor_residual,
                      r.relative_change);
        err << buf;
    };
}

// ---- restore -------------------------------------------------------------

struct RestoreArgs {
    fs::path input, output, mask, reference, metrics_csv, config;
    Overrides o;
    bool sotv = false;
    bool log = false;
};

int cmd_restore(Task task, const RestoreArgs& a, std::ostream& out, std::ostream& err) {
    require_file(a.input, "--input");
    require_file(a.output, "--output");
    const Overrides file = a.config.empty() ? Overrides{} : read_config_file(a.config);
    const SolverParams params = resolve_params(task, a.o, file);

    const Channels f = load_image_channels(a.input);
    MaskField mask(f.front().rows(), f.front().cols(), true);
    if (task == Task::inpaint) {
        require_file(a.mask, "--mask");
        mask = load_mask(a.mask);
        if (!mask.matches(f.front())) {
            throw UsageError("mask " + a.mask.string() + " does not match the image dimensions");
        }
    }

    const SolveResult res =
        run_channels(f, mask, task, params, a.sotv, residual_logger(a.log, err));
    save_image_channels(res.channels, a.output);

    if (!a.reference.empty()) {
        const MetricReport m = evaluate_channels(res.channels, load_image_channels(a.reference));
        const std::string row = metrics_row(task == Task::denoise ? "denoise" : "inpaint",
                                            a.input, a.reference, m, res.iterations);
        out << kMetricsHeader << '\n' << row << '\n';
        if (!a.metrics_csv.empty()) append_row(a.metrics_csv, kMetricsHeader, row);
    }
    return 0;
}

// ---- degrade / synth / metrics --------------------------------------------

struct DegradeArgs {
    std::string kind;
    fs::path input, output, observed;
    double variance = 0.01, density = 0.2, fraction = 0.5;
    std::optional<Seed> seed;
    fs::path config;
};

int cmd_degrade(const DegradeArgs& a) {
    require_file(a.input, "--input");
    require_file(a.output, "--output");
    Seed seed = 0;
    if (!a.config.empty()) {
        if (auto s = read_config_file(a.config).seed) seed = *s;
    }
    if (a.seed) seed = *a.seed;

    const Channels in = load_image_channels(a.input);
    if (a.kind == "mask") {
        const MaskField mask =
            make_random_mask(in.front().rows(), in.front().cols(), a.fraction, seed);
        save_mask(mask, a.output);
        if (!a.observed.empty()) {
            Channels obs;
            for (const auto& c : in) obs.push_back(apply_mask(c, mask));
            save_image_channels(obs, a.observed);
        }
        return 0;
    }
    Channels outc;
    for (std::size_t c = 0; c < in.size(); ++c) {
        const Seed s = seed + c;
        outc.push_back(a.kind == "gaussian" ? add_gaussian_noise(in[c], a.variance, s)
                                            : add_salt_pepper(in[c], a.density, s));
    }
    save_image_channels(outc, a.output);
    return 0;
}

struct SynthArgs {
    std::string kind;
    int size = 64;
    std::string gap = "straight:8";
    fs::path output, mask, observed;
};

int cmd_synth(const SynthArgs& a) {
    require_file(a.output, "--output");
    if (a.kind == "shapes") {
        save_image(make_shapes_fixture(a.size, a.size), a.output);
        return 0;
    }
    require_file(a.mask, "--mask");
    GapSpec gap;
    try {
        gap = GapSpec::parse(a.gap);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const StripeFixture fx = make_stripe_fixture(a.size, a.size, gap);
    save_image(fx.truth, a.output);
    save_mask(fx.mask, a.mask);
    if (!a.observed.empty()) save_image(apply_mask(fx.truth, fx.mask), a.observed);
    return 0;
}

struct MetricsArgs {
    fs::path test, reference, metrics_csv;
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
    require_file(a.test, "--test");
    require_file(a.reference, "--ref");
    const MetricReport m =
        evaluate_channels(load_image_channels(a.test), load_image_channels(a.reference));
    const std::string row = metrics_row("metrics", a.test, a.reference, m, std::nullopt);
    out << kMetricsHeader << '\n' << row << '\n';
    if (!a.metrics_csv.empty()) append_row(a.metrics_csv, kMetricsHeader, row);
    return 0;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
    fs::path corpus, output, config;
    std::optional<std::string> task;
    std::vector<double> levels;
    Overrides o;
    bool sotv = false;
};

bool is_image(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

struct BenchRow {
    double psnr0, ssim0, psnr, ssim;
    int iterations;
    double seconds;
};

double sample_sd(const std::vector<double>& xs, double m) {
    if (xs.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

int cmd_bench(BenchArgs a, std::ostream& out) {
    Overrides file;
    if (!a.config.empty()) {
        file = read_config_file(a.config);
        const toml::table tbl = toml::parse_file(a.config.string());
        if (const auto* bench = tbl["bench"].as_table()) {
            if (a.corpus.empty()) {
                if (auto c = toml_get<std::string>(*bench, {"corpus"})) a.corpus = *c;
            }
            if (!a.task) a.task = toml_get<std::string>(*bench, {"task"});
            if (a.levels.empty()) {
                if (const auto* arr = bench->get_as<toml::array>("levels")) {
                    for (const auto& n : *arr) {
                        auto v = n.value<double>();
                        if (!v) throw std::runtime_error("config: bench.levels must be numbers");
                        a.levels.push_back(*v);
                    }
                }
            }
        }
    }
    const std::string task = a.task.value_or("gaussian");
    if (task != "gaussian" && task != "saltpepper" && task != "inpaint") {
        throw UsageError("bench task must be gaussian, saltpepper or inpaint");
    }
    if (a.levels.empty()) {
        a.levels = task == "gaussian" ? std::vector<double>{0.01} : std::vector<double>{0.2};
    }
    require_file(a.corpus, "--corpus");
    if (!fs::is_directory(a.corpus)) throw UsageError(a.corpus.string() + ": not a directory");

    std::vector<fs::path> images;
    for (const auto& e : fs::directory_iterator(a.corpus)) {
        if (e.is_regular_file() && is_image(e.path())) images.push_back(e.path());
    }
    std::sort(images.begin(), images.end());
    if (images.empty()) throw UsageError(a.corpus.string() + ": no images in corpus");

    Overrides cli = a.o;
    if (task == "saltpepper" && !cli.p && !file.p) cli.p = 1;
    const Task solver_task = task == "inpaint" ? Task::inpaint : Task::denoise;
    const SolverParams params = resolve_params(solver_task, cli, file);
    const Seed base_seed = merge(a.o, file).seed.value_or(0);

    std::ofstream file_out;
    if (!a.output.empty()) {
        file_out.open(a.output);
        if (!file_out) throw std::runtime_error(a.output.string() + ": cannot open for writing");
    }
    std::ostream& os = a.output.empty() ? out : file_out;
    os << kBenchHeader << '\n';

    std::vector<ScalarField> truths;
    for (const auto& p : images) truths.push_back(load_image(p));

    for (double level : a.levels) {
        std::vector<double> p0, s0, p1, s1, its, secs;
        for (std::size_t i = 0; i < images.size(); ++i) {
            const ScalarField& truth = truths[i];
            const Seed seed = base_seed + i;
            Problem problem = Problem::denoise(truth);
            if (task == "gaussian") {
                problem = Problem::denoise(add_gaussian_noise(truth, level, seed));
            } else if (task == "saltpepper") {
                problem = Problem::denoise(add_salt_pepper(truth, level, seed));
            } else {
                const MaskField m = make_random_mask(truth.rows(), truth.cols(), level, seed);
                problem = Problem::inpaint(apply_mask(truth, m), m);
            }
            const MetricReport before = evaluate(problem.f, truth);
            const auto t0 = std::chrono::steady_clock::now();
            const SolveResult r = a.sotv ? run_sotv(problem, params) : run(problem, params);
            const double dt =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const MetricReport after = evaluate(r.image(), truth);

            os << csv_field(images[i].filename().string()) << ',' << task << ',' << num(level)
               << ',' << seed << ',' << num(before.psnr) << ',' << num(before.ssim) << ','
               << num(after.psnr) << ',' << num(after.ssim) << ",,," << r.iterations << ','
               << num(dt) << '\n';
            p0.push_back(before.psnr);
            s0.push_back(before.ssim);
            p1.push_back(after.psnr);
            s1.push_back(after.ssim);
            its.push_back(r.iterations);
            secs.push_back(dt);
        }
        const double mp = mean_of(p1), ms = mean_of(s1);
        os << "summary," << task << ',' << num(level) << ',' << base_seed << ','
           << num(mean_of(p0)) << ',' << num(mean_of(s0)) << ',' << num(mp) << ',' << num(ms)
           << ',' << num(sample_sd(p1, mp)) << ',' << num(sample_sd(s1, ms)) << ','
           << num(mean_of(its)) << ',' << num(mean_of(secs)) << '\n';
    }
    if (!os) throw std::runtime_error("bench: CSV write failed");
    return 0;
}

}  // namespace

Overrides read_config_file(const fs::path& path) {
    toml::table t;
    try {
        t = toml::parse_file(path.string());
    } catch (const toml::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + std::string(e.description()));
    }
    Overrides o;
    if (auto v = toml_get<std::int64_t>(t, {"p"})) o.p = static_cast<int>(*v);
    o.eta = toml_get<double>(t, {"eta"});
    o.theta1 = toml_get<double>(t, {"theta1"});
    o.theta2 = toml_get<double>(t, {"theta2"});
    o.theta3 = toml_get<double>(t, {"theta3"});
    o.sigma = toml_get<double>(t, {"sigma"});
    o.rho = toml_get<double>(t, {"rho"});
    o.contrast = toml_get<double>(t, {"contrast"});
    o.gamma = toml_get<double>(t, {"gamma"});
    o.tensor_mode = toml_get<std::string>(t, {"tensor-mode", "tensor_mode"});
    if (auto v = toml_get<std::int64_t>(t, {"max-iter", "max_iter"})) o.max_iter = static_cast<int>(*v);
    if (auto v = toml_get<std::int64_t>(t, {"refine-every", "refine_every"})) {
        o.refine_every = static_cast<int>(*v);
    }
    o.tol = toml_get<double>(t, {"tol"});
    if (auto v = toml_get<std::int64_t>(t, {"seed"})) {
        if (*v < 0) throw std::runtime_error(path.string() + ": seed must be non-negative");
        o.seed = static_cast<Seed>(*v);
    }
    return o;
}

SolverParams resolve_params(Task task, const Overrides& cli, const Overrides& file) {
    const Overrides o = merge(cli, file);
    SolverParams p = task == Task::inpaint           ? SolverParams::inpaint_defaults()
                     : (o.p && *o.p == 1)            ? SolverParams::impulse_defaults()
                                                     : SolverParams::denoise_defaults();
    if (o.p) p.p = *o.p;
    if (o.eta) p.eta = *o.eta;
    if (o.theta1) p.theta1 = *o.theta1;
    if (o.theta2) p.theta2 = *o.theta2;
    if (o.theta3) p.theta3 = *o.theta3;
    if (o.sigma) p.tensor.sigma = *o.sigma;
    if (o.rho) p.tensor.rho = *o.rho;
    if (o.contrast) p.tensor.contrast = *o.contrast;
    if (o.gamma) p.tensor.gamma = *o.gamma;
    if (o.tensor_mode) p.tensor.mode = parse_mode(*o.tensor_mode);
    if (o.max_iter) p.max_iter = *o.max_iter;
    if (o.refine_every) p.refine_every = *o.refine_every;
    if (o.tol) p.tol = *o.tol;
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"TWSO image denoising and inpainting", "twso"};
    app.require_subcommand(1);

    RestoreArgs den, inp;
    for (auto [name, a, help] :
         {std::tuple{"denoise", &den, "restore a noisy image"},
          std::tuple{"inpaint", &inp, "fill the missing region of an image"}}) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--input,-i", a->input, "observed image");
        sub->add_option("--output,-o", a->output, "restored image");
        sub->add_option("--reference", a->reference, "clean image for metrics");
        sub->add_option("--metrics-csv", a->metrics_csv, "append a metrics row here");
        sub->add_option("--config", a->config, "TOML file with default flag values");
        sub->add_option("--seed", a->o.seed, "accepted for uniformity; restoration is deterministic");
        sub->add_flag("--sotv", a->sotv, "identity tensor (plain second-order TV)");
        sub->add_flag("--log", a->log, "per-iteration residual line on stderr");
        add_solver_flags(sub, a->o);
        if (a == &inp) sub->add_option("--mask,-m", a->mask, "mask image, white = missing");
    }

    DegradeArgs deg;
    CLI::App* sdeg = app.add_subcommand("degrade", "add noise or punch holes");
    sdeg->add_option("kind", deg.kind)->required()->check(CLI::IsMember({"gaussian", "saltpepper", "mask"}));
    sdeg->add_option("--input,-i", deg.input);
    sdeg->add_option("--output,-o", deg.output, "degraded image, or the mask for 'mask'");
    sdeg->add_option("--observed", deg.observed, "masked image ('mask' only)");
    sdeg->add_option("--variance", deg.variance)->check(CLI::PositiveNumber);
    sdeg->add_option("--density", deg.density)->check(CLI::Range(0.0, 1.0));
    sdeg->add_option("--fraction", deg.fraction, "missing fraction")->check(CLI::Range(0.0, 1.0));
    sdeg->add_option("--seed", deg.seed);
    sdeg->add_option("--config", deg.config);

    SynthArgs syn;
    CLI::App* ssyn = app.add_subcommand("synth", "write a synthetic fixture");
    ssyn->add_option("kind", syn.kind)->required()->check(CLI::IsMember({"stripe", "shapes"}));
    ssyn->add_option("--size", syn.size)->check(CLI::Range(2, 1 << 14));
    ssyn->add_option("--gap", syn.gap, "shape[:width], shape in straight|slanted|zigzag|wide");
    ssyn->add_option("--output,-o", syn.output, "ground truth");
    ssyn->add_option("--mask,-m", syn.mask, "mask output (stripe)");
    ssyn->add_option("--observed", syn.observed, "masked image (stripe)");

    MetricsArgs met;
    CLI::App* smet = app.add_subcommand("metrics", "PSNR, SSIM and MSE of an image pair");
    smet->add_option("--test,--input", met.test);
    smet->add_option("--ref,--reference", met.reference);
    smet->add_option("--metrics-csv", met.metrics_csv);

    BenchArgs ben;
    CLI::App* sben = app.add_subcommand("bench", "degrade, restore and score every corpus image");
    sben->add_option("--corpus,--input", ben.corpus, "directory of clean images");
    sben->add_option("--task", ben.task)->check(CLI::IsMember({"gaussian", "saltpepper", "inpaint"}));
    sben->add_option("--levels", ben.levels, "noise variances, densities or missing fractions");
    sben->add_option("--output,-o,--metrics-csv", ben.output, "CSV path (stdout if omitted)");
    sben->add_option("--config", ben.config);
    sben->add_option("--seed", ben.o.seed);
    sben->add_flag("--sotv", ben.sotv);
    add_solver_flags(sben, ben.o);

    std::vector<const char*> argv{"twso"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand("denoise")) return cmd_restore(Task::denoise, den, out, err);
        if (app.got_subcommand("inpaint")) return cmd_restore(Task::inpaint, inp, out, err);
        if (app.got_subcommand("degrade")) return cmd_degrade(deg);
        if (app.got_subcommand("synth")) return cmd_synth(syn);
        if (app.got_subcommand("metrics")) return cmd_metrics(met, out);
        if (app.got_subcommand("bench")) return cmd_bench(ben, out);
    } catch (const UsageError& e) {
        err << "twso: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "twso: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "twso: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace twso::cli
