#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bimef/camera_response.hpp"
#include "bimef/exposure_sampler.hpp"
#include "bimef/illumination.hpp"
#include "bimef/image.hpp"

namespace bimef {

struct EnhanceConfig {
    double mu = 0.5;
    SolverConfig solver;
    CameraModel camera;
    KSearchConfig ksearch;
    /// When set, skips the entropy search and uses this exposure ratio.
    std::optional<double> fixed_k;

    void validate() const;
};

struct StageTimings {
    double illumination = 0.0;  // seconds
    double weight = 0.0;
    double k_search = 0.0;
    double synthesis = 0.0;
    double fusion = 0.0;

    double total() const noexcept {
        return illumination + weight + k_search + synthesis + fusion;
    }
};

struct EnhanceOutput {
    Image result;
    ScalarMap illumination;  // T
    ScalarMap weight;        // T^mu
    Image synthetic;         // g(P, k_hat), unclamped
    double k_hat = 1.0;
    SolveReport solver;
    StageTimings timings;
};

/// Pointwise T^mu. mu == 0 gives exactly 1 everywhere.
ScalarMap weight_map(const ScalarMap& T, double mu);

/// Normalized weighted sum of N exposures: each weight map is divided by the
/// per-pixel sum of all weights, then R_c = sum_i w_i * P_i,c, clamped to [0,1].
/// Pixels whose weights sum to zero take the plain average.
Image fuse_exposures(std::span<const Image> exposures, std::span<const ScalarMap> weights);

/// Dual-exposure blend W*P + (1-W)*synthetic, routed through fuse_exposures.
Image fuse(const Image& P, const Image& synthetic, const ScalarMap& W);

EnhanceOutput enhance(const Image& P, const EnhanceConfig& cfg = {});

}  // namespace bimef
