#include "bimef/fusion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace bimef {

void EnhanceConfig::validate() const {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw ArgumentError("mu must be >= 0");
    solver.validate();
    camera.validate();
    ksearch.validate();
    if (fixed_k && !(*fixed_k > 0.0)) throw ArgumentError("fixed k must be > 0");
}

ScalarMap weight_map(const ScalarMap& T, double mu) {
    ScalarMap W = T;
    if (mu == 0.0) {
        std::fill(W.values().begin(), W.values().end(), 1.0);
        return W;
    }
    if (mu == 1.0) return W;
    for (double& v : W.values()) v = std::pow(v, mu);
    return W;
}

Image fuse_exposures(std::span<const Image> exposures, std::span<const ScalarMap> weights) {
    if (exposures.empty() || exposures.size() != weights.size()) {
        throw ArgumentError("fuse: need one weight map per exposure");
    }
    const Image& first = exposures.front();
    for (std::size_t i = 0; i < exposures.size(); ++i) {
        if (!exposures[i].same_shape(first) || !weights[i].same_shape(first)) {
            throw ArgumentError("fuse: exposures and weights must share dimensions");
        }
    }

    const std::size_t n = first.pixel_count();
    const std::size_t count = exposures.size();
    Image out(first.width(), first.height());
    auto dst = out.values();
    std::vector<double> w(count);
    for (std::size_t px = 0; px < n; ++px) {
        double sum = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            w[i] = weights[i].values()[px];
            sum += w[i];
        }
        for (std::size_t i = 0; i < count; ++i) {
            w[i] = sum > 0.0 ? w[i] / sum : 1.0 / static_cast<double>(count);
        }
        for (std::size_t c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < count; ++i) {
                if (w[i] != 0.0) acc += w[i] * exposures[i].values()[3 * px + c];
            }
            dst[3 * px + c] = std::clamp(acc, 0.0, 1.0);
        }
    }
    return out;
}

Image fuse(const Image& P, const Image& synthetic, const ScalarMap& W) {
    if (!P.same_shape(synthetic) || !P.same_shape(W)) {
        throw ArgumentError("fuse: dimension mismatch");
    }
    ScalarMap complement = W;
    for (double& v : complement.values()) v = 1.0 - v;
    const Image exposures[] = {P, synthetic};
    const ScalarMap weights[] = {W, std::move(complement)};
    return fuse_exposures(exposures, weights);
}

namespace {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

EnhanceOutput enhance(const Image& P, const EnhanceConfig& cfg) {
    cfg.validate();
    if (!P.is_valid()) throw ArgumentError("enhance: input components must be finite and in [0,1]");

    EnhanceOutput out;
    Stopwatch clock;
    out.illumination = estimate_illumination(P, cfg.solver, &out.solver);
    out.timings.illumination = clock.lap();

    out.weight = weight_map(out.illumination, cfg.mu);
    out.timings.weight = clock.lap();

    out.k_hat = cfg.fixed_k ? *cfg.fixed_k
                            : optimal_k(P, out.illumination, cfg.camera, cfg.ksearch);
    out.timings.k_search = clock.lap();

    out.synthetic = apply_btf(P, cfg.camera, out.k_hat);
    out.timings.synthesis = clock.lap();

    out.result = fuse(P, out.synthetic, out.weight);
    out.timings.fusion = clock.lap();
    return out;
}

}  // namespace bimef
