#pragma once

#include <optional>

#include "bimef/image.hpp"

namespace bimef {

/// Two-parameter camera model. The response curve is f(E) = exp(b (1 - E^a))
/// and the brightness transform between exposures differing by a ratio k is
/// g(P, k) = beta * P^gamma with gamma = k^a, beta = exp(b (1 - k^a)).
struct CameraModel {
    double a = -0.3293;
    double b = 1.1258;

    /// Throws ArgumentError unless a != 0 and both are finite.
    void validate() const;
};

struct BtfParams {
    double beta = 1.0;
    double gamma = 1.0;
    double k = 1.0;
};

BtfParams btf_params(const CameraModel& model, double k);

/// beta * v^gamma, with 0 mapped to 0. Not clamped.
double apply_btf(double v, const BtfParams& p) noexcept;
double apply_btf(double v, const CameraModel& model, double k);

/// Pointwise BTF on every component. k == 1 returns an exact copy.
template <int Channels>
Raster<Channels> apply_btf(const Raster<Channels>& src, const CameraModel& model, double k);

/// Camera response at normalized irradiance E > 0.
/// Without `c`: exp(b (1 - E^a)). With `c` (the linear-BTF family): E^c.
double crf(const CameraModel& model, double E, std::optional<double> c = std::nullopt);

}  // namespace bimef
