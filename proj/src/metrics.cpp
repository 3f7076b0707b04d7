#include "bimef/metrics.hpp"

#include <cstdint>

namespace bimef {

double loe_maps(const ScalarMap& L, const ScalarMap& L_enhanced) {
    if (!L.same_shape(L_enhanced)) throw ArgumentError("loe: lightness maps differ in size");
    auto a = L.values();
    auto b = L_enhanced.values();
    const std::size_t m = a.size();
    std::uint64_t total = 0;
    for (std::size_t x = 0; x < m; ++x) {
        const double ax = a[x];
        const double bx = b[x];
        std::uint32_t rd = 0;
        for (std::size_t y = 0; y < m; ++y) {
            rd += static_cast<std::uint32_t>((ax >= a[y]) != (bx >= b[y]));
        }
        total += rd;
    }
    return static_cast<double>(total) / static_cast<double>(m);
}

double loe(const Image& original, const Image& enhanced, const LoeConfig& cfg) {
    if (cfg.sample_size < 2) throw ArgumentError("loe: sample_size must be >= 2");
    if (!original.same_shape(enhanced)) throw ArgumentError("loe: images differ in size");
    const auto L = resize_nearest(lightness(original), cfg.sample_size, cfg.sample_size);
    const auto Le = resize_nearest(lightness(enhanced), cfg.sample_size, cfg.sample_size);
    return loe_maps(L, Le);
}

}  // namespace bimef
