#pragma once

#include <vector>

#include "bimef/camera_response.hpp"
#include "bimef/image.hpp"

namespace bimef {

enum class KSearchMethod {
    /// Global maximum over [k_min, k_max] found by sweeping every exposure
    /// ratio at which some value crosses a histogram bin boundary.
    exact_sweep,
    /// Coarse log-grid scan, then golden-section refinement between the
    /// neighbours of the best grid point.
    golden_section,
};

struct KSearchConfig {
    double under_exposed_threshold = 0.5;
    int thumb_size = 50;
    double k_min = 1.0;
    double k_max = 100.0;
    int coarse_steps = 50;
    double refine_tol = 1e-3;  // golden-section bracket width in ln(k)
    int n_bins = 256;
    KSearchMethod method = KSearchMethod::exact_sweep;

    void validate() const;
};

/// Geometric-mean brightness of the pixels whose illumination is below the
/// threshold, taken from thumbnails of the image and illumination map.
struct UnderExposedSet {
    std::vector<double> values;

    bool empty() const noexcept { return values.empty(); }
    std::size_t size() const noexcept { return values.size(); }
};

UnderExposedSet extract_under_exposed(const Image& img, const ScalarMap& T,
                                      const KSearchConfig& cfg = {});

/// Entropy (bits) of clamp(g(q, k), 0, 1) over an n_bins histogram.
double entropy_of_enhanced(const UnderExposedSet& q, const CameraModel& model, double k,
                           int n_bins = 256);

/// Log-spaced grid of `steps` exposure ratios spanning [k_min, k_max].
std::vector<double> coarse_grid(const KSearchConfig& cfg);

struct KSearchResult {
    double k = 1.0;
    double entropy = 0.0;
    std::size_t under_exposed = 0;
};

/// Entropy-maximizing exposure ratio over [k_min, k_max] for a prepared set.
/// The coarse grid is always scanned; the result is at least as good as its
/// best point. Ties resolve to the smaller ratio. Returns k = 1 with zero
/// entropy when `q` is empty.
KSearchResult search_k(const UnderExposedSet& q, const CameraModel& model,
                       const KSearchConfig& cfg = {});

/// extract_under_exposed followed by search_k.
double optimal_k(const Image& img, const ScalarMap& T, const CameraModel& model,
                 const KSearchConfig& cfg = {});

}  // namespace bimef
