#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "bimef/error.hpp"

namespace bimef {

/// Row-major raster of `Channels` interleaved doubles per pixel.
///
/// Pixel data is stored as linear intensities; images decoded from 8-bit
/// files land in [0,1], but intermediates (e.g. a synthetic exposure before
/// fusion) may exceed 1, so the container itself only requires finite values
/// where the caller asks for it via is_valid().
template <int Channels>
class Raster {
public:
    static_assert(Channels >= 1);
    static constexpr int channels = Channels;

    Raster() = default;

    Raster(int width, int height, double fill = 0.0)
        : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw ArgumentError("raster dimensions must be at least 1x1");
        }
        data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
    }

    Raster(int width, int height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width < 1 || height < 1) {
            throw ArgumentError("raster dimensions must be at least 1x1");
        }
        if (data_.size() != static_cast<std::size_t>(width) * height * Channels) {
            throw ArgumentError("raster data size does not match dimensions");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * height_;
    }
    bool empty() const noexcept { return data_.empty(); }

    double& at(int row, int col, int c = 0) noexcept {
        return data_[index(row, col) + c];
    }
    double at(int row, int col, int c = 0) const noexcept {
        return data_[index(row, col) + c];
    }

    std::span<double> pixel(int row, int col) noexcept {
        return {data_.data() + index(row, col), Channels};
    }
    std::span<const double> pixel(int row, int col) const noexcept {
        return {data_.data() + index(row, col), Channels};
    }

    std::span<double> values() & noexcept { return data_; }
    std::span<const double> values() const& noexcept { return data_; }
    // A span into a temporary would dangle.
    std::span<const double> values() const&& = delete;

    bool same_shape(const Raster& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    template <int Other>
    bool same_shape(const Raster<Other>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    /// True when every component is finite and inside [lo, hi].
    bool is_valid(double lo = 0.0, double hi = 1.0) const noexcept;

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return (static_cast<std::size_t>(row) * width_ + col) * Channels;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

using Image = Raster<3>;
using ScalarMap = Raster<1>;

extern template class Raster<1>;
extern template class Raster<3>;

/// N-bin histogram over [0,1].
class Histogram {
public:
    explicit Histogram(int n_bins);

    int size() const noexcept { return static_cast<int>(bins_.size()); }
    std::size_t total() const noexcept { return total_; }
    std::span<const std::size_t> bins() const noexcept { return bins_; }

    /// Bin index floor(v*N), clamped to [0, N-1]. NaN lands in bin 0.
    int bin_of(double v) const noexcept;
    void add(double v) noexcept;
    void add(std::span<const double> values) noexcept;

    /// p_i = bins_i / total. Empty when total is zero.
    std::vector<double> probabilities() const;

private:
    std::vector<std::size_t> bins_;
    std::size_t total_ = 0;
};

// Decoding and encoding of 8-bit rasters.

/// Decodes PNG (gray, gray+alpha, RGB, RGBA, palette) or baseline JPEG.
/// Alpha is dropped; gray is replicated to three channels.
Image load_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG, each component as round(clamp(c,0,1)*255).
void save_image(const Image& img, const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG of a scalar map (clamped to [0,1]).
void save_map(const ScalarMap& map, const std::filesystem::path& path);

/// Quantizes to the 8-bit code the encoder writes.
unsigned char to_byte(double v) noexcept;

// Channel math.

/// Per-pixel maximum over R, G, B.
ScalarMap lightness(const Image& img);

/// Per-pixel cube root of R*G*B.
ScalarMap geometric_brightness(const Image& img);

/// Center-aligned nearest-neighbour sampling:
/// out(i,j) = src(floor((i+0.5)*H/out_h), floor((j+0.5)*W/out_w)).
template <int Channels>
Raster<Channels> resize_nearest(const Raster<Channels>& src, int out_w, int out_h);

Histogram histogram(const ScalarMap& map, int n_bins = 256);
Histogram histogram(std::span<const double> values, int n_bins = 256);

/// Shannon entropy in bits; throws ArgumentError on an empty histogram.
double entropy(const Histogram& h);

}  // namespace bimef
