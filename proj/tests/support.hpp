#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bimef/image.hpp"

namespace bimef::testing {

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("bimef_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline Image random_image(int w, int h, std::uint32_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Image img(w, h);
    for (double& v : img.values()) v = dist(rng);
    return img;
}

inline ScalarMap random_map(int w, int h, std::uint32_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarMap m(w, h);
    for (double& v : m.values()) v = dist(rng);
    return m;
}

/// Image with R = G = B = values of `m`.
inline Image gray_image(const ScalarMap& m) {
    Image img(m.width(), m.height());
    for (int r = 0; r < m.height(); ++r) {
        for (int c = 0; c < m.width(); ++c) {
            for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = m.at(r, c);
        }
    }
    return img;
}

/// Left half `dark`, right half `bright`.
inline Image two_region(int w, int h, double dark, double bright) {
    Image img(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = c < w / 2 ? dark : bright;
        }
    }
    return img;
}

/// Dense Gaussian elimination with partial pivoting; `a` is n x n row-major.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
        }
        if (a[piv * n + k] == 0.0) throw std::runtime_error("singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / a[k * n + k];
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
        x[i] = s / a[i * n + i];
    }
    return x;
}

/// Owning copy of a raster's values, safe to iterate over a temporary.
template <int C>
std::vector<double> values_of(const Raster<C>& r) {
    return {r.values().begin(), r.values().end()};
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace bimef::testing
