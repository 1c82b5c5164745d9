#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twso/degrade.hpp"
#include "twso/solver.hpp"

namespace twso::cli {

// Values a user may set on the command line or in a TOML file. Unset
// entries fall through to the file, then to the task defaults.
struct Overrides {
    std::optional<int> p;
    std::optional<double> eta, theta1, theta2, theta3;
    std::optional<double> sigma, rho, contrast, gamma;
    std::optional<std::string> tensor_mode;
    std::optional<int> max_iter, refine_every;
    std::optional<double> tol;
    std::optional<Seed> seed;
};

struct RunConfig {
    std::string command;
    std::filesystem::path input, output, mask, reference, metrics_csv;
    SolverParams params;
    Seed seed = 0;
};

/// Reads the keys understood by Overrides from a TOML file ("tensor-mode" and
/// "tensor_mode" both accepted). Throws std::runtime_error on parse failure.
Overrides read_config_file(const std::filesystem::path& path);

/// CLI > file > defaults. Defaults are picked by task and by the resolved p.
SolverParams resolve_params(Task task, const Overrides& cli, const Overrides& file);

/// Entry point shared by the executable and the tests. Returns the exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// CSV layout, fixed.
inline constexpr const char* kMetricsHeader = "command,input,reference,psnr,ssim,mse,iterations";
inline constexpr const char* kBenchHeader =
    "image,task,level,seed,psnr_degraded,ssim_degraded,psnr,ssim,psnr_sd,ssim_sd,iterations,"
    "wall_seconds";

}  // namespace twso::cli
