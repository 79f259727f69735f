#ifndef SEMGUIDE_CONTROL_MODULATION_HPP
#define SEMGUIDE_CONTROL_MODULATION_HPP

#include "semguide/tensor.hpp"

namespace semguide {

// The three features meeting at one decoder merge point, all [c, h, w].
struct FeatureBundle {
    Tensor decoder_input;   // running decoder state
    Tensor skip;            // encoder skip connection
    Tensor control_feature; // control-branch feature
};

// decoder_input + skip + mask (*) control_feature, the mask broadcast across
// channels. This is the input handed to the next decoder block.
Tensor modulate_and_merge(const FeatureBundle& bundle, const Tensor& mask);

// In-place merge used by backbones: base += skip (optional) + m * control,
// where m is mask(y, x) when a grid is given and `scalar` otherwise. Keeping
// grid and scalar scaling on one code path makes a constant-mask run
// bit-identical to a scalar-wired one.
void merge_features(Tensor& base, const Tensor* skip, const Tensor& control, const Tensor* mask,
                    float scalar);

// Constant control-scale grid; `value` must lie in [0,1].
Tensor fixed_scale_mask(float value, int height, int width);

} // namespace semguide

#endif
