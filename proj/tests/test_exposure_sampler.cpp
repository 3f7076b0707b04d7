#include <doctest.h>

#include <cmath>
#include <random>

#include "bimef/exposure_sampler.hpp"
#include "bimef/illumination.hpp"
#include "support.hpp"

using namespace bimef;

namespace {

ScalarMap half_illumination(int w, int h, double left, double right) {
    ScalarMap T(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) T.at(r, c) = c < w / 2 ? left : right;
    }
    return T;
}

// Dark test scene: smooth vignette times per-pixel noise, scaled into [0, peak].
Image dark_scene(int w, int h, std::uint32_t seed, double peak) {
    const auto noise = bimef::testing::random_map(w, h, seed);
    Image img(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double x = (c + 0.5) / w - 0.5;
            const double y = (r + 0.5) / h - 0.5;
            const double base = std::exp(-4.0 * (x * x + y * y));
            const double v = peak * base * (0.3 + 0.7 * noise.at(r, c));
            img.at(r, c, 0) = v;
            img.at(r, c, 1) = v * (0.8 + 0.2 * noise.at(h - 1 - r, c));
            img.at(r, c, 2) = v * 0.9;
        }
    }
    return img;
}

std::vector<double> fine_log_grid(double lo, double hi, int n) {
    std::vector<double> ks;
    for (int i = 0; i < n; ++i) ks.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
    return ks;
}

}  // namespace

TEST_CASE("extract_under_exposed") {
    const KSearchConfig cfg;
    const auto img = bimef::testing::random_image(80, 60, 1);

    CHECK(extract_under_exposed(img, ScalarMap(80, 60, 0.5), cfg).empty());
    CHECK(extract_under_exposed(img, ScalarMap(80, 60, 0.49), cfg).size() == 2500);

    // Count thumbnail columns whose source column falls in the dark half.
    for (int w : {100, 75, 51}) {
        const auto T = half_illumination(w, 40, 0.2, 0.8);
        const auto q = extract_under_exposed(bimef::testing::random_image(w, 40, 2), T, cfg);
        int dark_cols = 0;
        for (int j = 0; j < cfg.thumb_size; ++j) {
            const int src = static_cast<int>(std::floor((j + 0.5) * w / cfg.thumb_size));
            if (src < w / 2) ++dark_cols;
        }
        CHECK(q.size() == static_cast<std::size_t>(dark_cols * cfg.thumb_size));
    }

    // Values are the brightness of the sampled pixels.
    const Image flat(50, 50, 0.3);
    const auto q = extract_under_exposed(flat, ScalarMap(50, 50, 0.1), cfg);
    for (double v : q.values) CHECK(v == doctest::Approx(0.3));

    CHECK_THROWS_AS(extract_under_exposed(img, ScalarMap(10, 10), cfg), ArgumentError);
}

TEST_CASE("property: raising the threshold never shrinks the set") {
    const auto img = bimef::testing::random_image(64, 48, 3);
    const auto T = bimef::testing::random_map(64, 48, 4);
    KSearchConfig cfg;
    std::size_t prev = 0;
    for (double th = 0.0; th <= 1.01; th += 0.05) {
        cfg.under_exposed_threshold = th;
        const auto n = extract_under_exposed(img, T, cfg).size();
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("entropy_of_enhanced") {
    const CameraModel m;
    const UnderExposedSet constant{std::vector<double>(100, 0.2)};
    for (double k : {1.0, 3.0, 40.0}) CHECK(entropy_of_enhanced(constant, m, k) == 0.0);

    UnderExposedSet spread;
    for (int i = 0; i < 64; ++i) spread.values.push_back((i + 0.5) / 256.0);
    CHECK(entropy_of_enhanced(spread, m, 1.0) == doctest::Approx(6.0));
    CHECK(entropy_of_enhanced(spread, m, 1.0) == entropy(histogram(spread.values, 256)));

    // Ratio large enough that every value saturates.
    UnderExposedSet bright{{0.5, 0.6, 0.7, 0.8}};
    CHECK(entropy_of_enhanced(bright, m, 1e6) == 0.0);

    CHECK_THROWS_AS(entropy_of_enhanced(UnderExposedSet{}, m, 2.0), ArgumentError);
}

TEST_CASE("coarse_grid is log-spaced over the bounds") {
    const KSearchConfig cfg;
    const auto g = coarse_grid(cfg);
    REQUIRE(g.size() == 50);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 100.0);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        CHECK(g[i] / g[i - 1] == doctest::Approx(g[i + 1] / g[i]).epsilon(1e-12));
    }
}

TEST_CASE("optimal_k on a well-exposed image is 1") {
    const auto img = bimef::testing::random_image(60, 60, 5, 0.6, 1.0);
    CHECK(optimal_k(img, ScalarMap(60, 60, 0.7), CameraModel{}) == 1.0);
}

TEST_CASE("optimal_k dominates a 1000-point brute-force grid") {
    const CameraModel m;
    const KSearchConfig cfg;
    const auto fine = fine_log_grid(cfg.k_min, cfg.k_max, 1000);
    for (std::uint32_t seed = 0; seed < 6; ++seed) {
        const auto img = dark_scene(120, 90, 200 + seed, 0.15 + 0.05 * seed);
        const auto T = estimate_illumination(img, SolverConfig{});
        const auto q = extract_under_exposed(img, T, cfg);
        REQUIRE_FALSE(q.empty());
        const auto best = search_k(q, m, cfg);
        CHECK(best.entropy == entropy_of_enhanced(q, m, best.k));
        double oracle = 0.0;
        for (double k : fine) oracle = std::max(oracle, entropy_of_enhanced(q, m, k));
        CHECK(best.entropy >= oracle - 1e-9);
        double coarse = 0.0;
        for (double k : coarse_grid(cfg)) coarse = std::max(coarse, entropy_of_enhanced(q, m, k));
        CHECK(best.entropy >= coarse - 1e-9);
    }
}

TEST_CASE("optimal_k recovers the ratio used to darken a scene") {
    const CameraModel m;
    const KSearchConfig cfg;
    const auto grid = coarse_grid(cfg);
    const double step = std::log(grid[1] / grid[0]);
    const auto reference = bimef::testing::gray_image(bimef::testing::random_map(100, 100, 77));
    for (double k0 : {2.0, 5.0, 8.0}) {
        const auto dark = apply_btf(reference, m, 1.0 / k0);
        const auto T = estimate_illumination(dark, SolverConfig{});
        const double k = optimal_k(dark, T, m, cfg);
        CAPTURE(k0);
        CAPTURE(k);
        CHECK(std::abs(std::log(k / k0)) <= step);
    }
}

TEST_CASE("search is deterministic") {
    const auto img = dark_scene(64, 64, 9, 0.3);
    const auto T = estimate_illumination(img, SolverConfig{});
    const double k1 = optimal_k(img, T, CameraModel{});
    const double k2 = optimal_k(img, T, CameraModel{});
    CHECK(k1 == k2);
}

TEST_CASE("golden-section option still dominates the coarse grid") {
    const CameraModel m;
    KSearchConfig cfg;
    cfg.method = KSearchMethod::golden_section;
    for (std::uint32_t seed = 0; seed < 4; ++seed) {
        const auto img = dark_scene(80, 60, 300 + seed, 0.25);
        const auto q = extract_under_exposed(img, estimate_illumination(img, SolverConfig{}), cfg);
        const auto best = search_k(q, m, cfg);
        for (double k : coarse_grid(cfg)) CHECK(best.entropy >= entropy_of_enhanced(q, m, k) - 1e-9);
        CHECK(best.k >= cfg.k_min);
        CHECK(best.k <= cfg.k_max);
    }
}

TEST_CASE("exact sweep finds the best of a dense scan on small sets") {
    const CameraModel m;
    KSearchConfig cfg;
    cfg.k_max = 30.0;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 0.3);
    for (int trial = 0; trial < 10; ++trial) {
        UnderExposedSet q;
        for (int i = 0; i < 40; ++i) q.values.push_back(dist(rng));
        const auto best = search_k(q, m, cfg);
        double scan = 0.0;
        for (double k : fine_log_grid(cfg.k_min, cfg.k_max, 20000)) {
            scan = std::max(scan, entropy_of_enhanced(q, m, k));
        }
        CHECK(best.entropy >= scan - 1e-9);
    }
}
