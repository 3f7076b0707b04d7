#pragma once

#include "bimef/image.hpp"

namespace bimef {

struct LoeConfig {
    int sample_size = 100;
};

/// Lightness order error between two lightness maps of equal size, used as-is:
/// mean over x of #{y : [L(x) >= L(y)] xor [L'(x) >= L'(y)]}.
double loe_maps(const ScalarMap& L, const ScalarMap& L_enhanced);

/// LOE of two images after sampling both lightness maps to
/// sample_size x sample_size with resize_nearest.
double loe(const Image& original, const Image& enhanced, const LoeConfig& cfg = {});

}  // namespace bimef
