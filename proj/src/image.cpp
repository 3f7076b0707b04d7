#include "bimef/image.hpp"

#include <algorithm>
#include <cmath>

namespace bimef {

template <int Channels>
bool Raster<Channels>::is_valid(double lo, double hi) const noexcept {
    if (width_ < 1 || height_ < 1) return false;
    return std::all_of(data_.begin(), data_.end(), [lo, hi](double v) {
        return std::isfinite(v) && v >= lo && v <= hi;
    });
}

template class Raster<1>;
template class Raster<3>;

Histogram::Histogram(int n_bins) {
    if (n_bins < 2) throw ArgumentError("histogram needs at least 2 bins");
    bins_.assign(static_cast<std::size_t>(n_bins), 0);
}

int Histogram::bin_of(double v) const noexcept {
    const int n = size();
    if (!(v > 0.0)) return 0;
    if (v >= 1.0) return n - 1;
    return std::min(static_cast<int>(v * n), n - 1);
}

void Histogram::add(double v) noexcept {
    ++bins_[static_cast<std::size_t>(bin_of(v))];
    ++total_;
}

void Histogram::add(std::span<const double> values) noexcept {
    for (double v : values) add(v);
}

std::vector<double> Histogram::probabilities() const {
    std::vector<double> p;
    if (total_ == 0) return p;
    p.reserve(bins_.size());
    const double inv = 1.0 / static_cast<double>(total_);
    for (auto c : bins_) p.push_back(static_cast<double>(c) * inv);
    return p;
}

ScalarMap lightness(const Image& img) {
    ScalarMap out(img.width(), img.height());
    auto src = img.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = std::max({src[3 * i], src[3 * i + 1], src[3 * i + 2]});
    }
    return out;
}

ScalarMap geometric_brightness(const Image& img) {
    ScalarMap out(img.width(), img.height());
    auto src = img.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = std::cbrt(src[3 * i] * src[3 * i + 1] * src[3 * i + 2]);
    }
    return out;
}

template <int Channels>
Raster<Channels> resize_nearest(const Raster<Channels>& src, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw ArgumentError("resize target dimensions must be positive");
    }
    if (out_w == src.width() && out_h == src.height()) return src;

    std::vector<int> cols(static_cast<std::size_t>(out_w));
    for (int j = 0; j < out_w; ++j) {
        auto c = static_cast<int>(std::floor((j + 0.5) * src.width() / out_w));
        cols[static_cast<std::size_t>(j)] = std::clamp(c, 0, src.width() - 1);
    }
    Raster<Channels> out(out_w, out_h);
    for (int i = 0; i < out_h; ++i) {
        auto r = static_cast<int>(std::floor((i + 0.5) * src.height() / out_h));
        r = std::clamp(r, 0, src.height() - 1);
        for (int j = 0; j < out_w; ++j) {
            auto from = src.pixel(r, cols[static_cast<std::size_t>(j)]);
            std::copy(from.begin(), from.end(), out.pixel(i, j).begin());
        }
    }
    return out;
}

template Raster<1> resize_nearest(const Raster<1>&, int, int);
template Raster<3> resize_nearest(const Raster<3>&, int, int);

Histogram histogram(const ScalarMap& map, int n_bins) {
    return histogram(map.values(), n_bins);
}

Histogram histogram(std::span<const double> values, int n_bins) {
    Histogram h(n_bins);
    h.add(values);
    return h;
}

double entropy(const Histogram& h) {
    if (h.total() == 0) throw ArgumentError("entropy of an empty histogram");
    const double total = static_cast<double>(h.total());
    double H = 0.0;
    for (auto c : h.bins()) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        H -= p * std::log2(p);
    }
    return H;
}

}  // namespace bimef
