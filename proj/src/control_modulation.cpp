#include "semguide/control_modulation.hpp"

#include "semguide/errors.hpp"

namespace semguide {

void merge_features(Tensor& base, const Tensor* skip, const Tensor& control, const Tensor* mask,
                    float scalar) {
    if (skip && !base.same_shape(*skip))
        throw Error(ErrorCode::ShapeMismatch, "skip " + skip->shape_str() + " vs " + base.shape_str());
    if (!base.same_shape(control))
        throw Error(ErrorCode::ShapeMismatch,
                    "control " + control.shape_str() + " vs " + base.shape_str());
    const int c = base.dim(0), h = base.dim(1), w = base.dim(2);
    if (mask && (mask->ndim() != 2 || mask->dim(0) != h || mask->dim(1) != w))
        throw Error(ErrorCode::ShapeMismatch, "mask " + mask->shape_str() + " for grid " +
                                                  std::to_string(h) + "x" + std::to_string(w));
    for (int ic = 0; ic < c; ++ic)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const float m = mask ? mask->at(y, x) : scalar;
                float v = base.at(ic, y, x);
                if (skip) v += skip->at(ic, y, x);
                base.at(ic, y, x) = v + m * control.at(ic, y, x);
            }
}

Tensor modulate_and_merge(const FeatureBundle& bundle, const Tensor& mask) {
    Tensor out = bundle.decoder_input;
    merge_features(out, &bundle.skip, bundle.control_feature, &mask, 1.0f);
    return out;
}

Tensor fixed_scale_mask(float value, int height, int width) {
    if (value < 0.0f || value > 1.0f)
        throw Error(ErrorCode::ValueOutOfRange, "control scale must be in [0,1]");
    return Tensor({height, width}, value);
}

} // namespace semguide
