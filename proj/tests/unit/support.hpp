#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "twso/twso.hpp"

namespace tsupport {

inline twso::ScalarField random_field(int rows, int cols, std::mt19937_64& rng, double lo = -1.0,
                                      double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    twso::ScalarField f(rows, cols);
    for (double& v : f.values()) v = dist(rng);
    return f;
}

inline twso::MatrixField random_matrix(int rows, int cols, std::mt19937_64& rng) {
    return {random_field(rows, cols, rng), random_field(rows, cols, rng),
            random_field(rows, cols, rng), random_field(rows, cols, rng)};
}

// Random symmetric PSD tensor field with entries of order one.
inline twso::DiffusionTensorField random_tensor(int rows, int cols, std::mt19937_64& rng) {
    twso::DiffusionTensorField t{twso::ScalarField(rows, cols), twso::ScalarField(rows, cols),
                                 twso::ScalarField(rows, cols)};
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (std::size_t k = 0; k < t.t11.size(); ++k) {
        const double a = d(rng), b = d(rng), c = d(rng);  // T = L L^T, L = [[a,0],[b,c]]
        t.t11[k] = a * a;
        t.t12[k] = a * b;
        t.t22[k] = b * b + c * c;
    }
    return t;
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("twso_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace tsupport
