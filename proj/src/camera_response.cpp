#include "bimef/camera_response.hpp"

#include <cmath>

namespace bimef {

void CameraModel::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw ArgumentError("camera parameters must be finite");
    }
    if (a == 0.0) throw ArgumentError("camera parameter a must be nonzero");
}

BtfParams btf_params(const CameraModel& model, double k) {
    model.validate();
    if (!(k > 0.0) || !std::isfinite(k)) throw ArgumentError("exposure ratio k must be > 0");
    if (k == 1.0) return {1.0, 1.0, 1.0};
    const double gamma = std::pow(k, model.a);
    return {std::exp(model.b * (1.0 - gamma)), gamma, k};
}

double apply_btf(double v, const BtfParams& p) noexcept {
    if (p.k == 1.0) return v;
    if (v == 0.0) return 0.0;
    return p.beta * std::pow(v, p.gamma);
}

double apply_btf(double v, const CameraModel& model, double k) {
    return apply_btf(v, btf_params(model, k));
}

template <int Channels>
Raster<Channels> apply_btf(const Raster<Channels>& src, const CameraModel& model, double k) {
    const auto p = btf_params(model, k);
    Raster<Channels> out = src;
    if (p.k == 1.0) return out;
    for (double& v : out.values()) v = apply_btf(v, p);
    return out;
}

template Raster<1> apply_btf(const Raster<1>&, const CameraModel&, double);
template Raster<3> apply_btf(const Raster<3>&, const CameraModel&, double);

double crf(const CameraModel& model, double E, std::optional<double> c) {
    if (!(E > 0.0) || !std::isfinite(E)) throw ArgumentError("irradiance E must be > 0");
    if (c) return std::pow(E, *c);
    model.validate();
    if (E == 1.0) return 1.0;
    return std::exp(model.b * (1.0 - std::pow(E, model.a)));
}

}  // namespace bimef
