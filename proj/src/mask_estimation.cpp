#include "semguide/mask_estimation.hpp"

#include <algorithm>
#include <string>

#include "semguide/errors.hpp"

namespace semguide {

const Tensor& ControlScaleStack::mask(int timestep, int layer) const {
    auto it = masks.find({timestep, layer});
    if (it == masks.end())
        throw Error(ErrorCode::MissingArchiveEntry,
                    "no mask for (t=" + std::to_string(timestep) + ", l=" + std::to_string(layer) + ")");
    return it->second;
}

bool ControlScaleStack::has_mask(int timestep, int layer) const {
    return masks.count({timestep, layer}) > 0;
}

bool ControlScaleStack::operator==(const ControlScaleStack& other) const {
    if (fallback_layers != other.fallback_layers || masks.size() != other.masks.size()) return false;
    auto it = masks.begin();
    auto jt = other.masks.begin();
    for (; it != masks.end(); ++it, ++jt)
        if (it->first != jt->first || !bitwise_equal(it->second, jt->second)) return false;
    return true;
}

Tensor compute_control_scale(const AttentionArchive& archive,
                             const std::set<int>& non_conflicting_indices, int layer,
                             int timestep_index, Tensor* unclamped) {
    if (non_conflicting_indices.empty())
        throw Error(ErrorCode::EmptyTokenSet, "control scale needs at least one non-conflicting token");
    const int modules = archive.modules_per_layer(layer);
    auto [h, w] = archive.layer_resolution(layer);
    const int spatial = h * w;

    std::vector<double> acc(static_cast<size_t>(spatial), 0.0);
    for (int a = 1; a <= modules; ++a) {
        const Tensor& map = archive.entry({timestep_index, layer, a});
        if (map.dim(0) != spatial)
            throw Error(ErrorCode::ShapeMismatch, "archive map does not match layer resolution");
        for (int token : non_conflicting_indices) {
            if (token < 0 || token >= map.dim(1))
                throw Error(ErrorCode::TargetIndexOutOfRange,
                            "token index " + std::to_string(token) + " outside archive token axis");
            for (int s = 0; s < spatial; ++s) acc[static_cast<size_t>(s)] += map.at(s, token);
        }
    }

    const double inv = 1.0 / (static_cast<double>(non_conflicting_indices.size()) * modules);
    Tensor grid({h, w});
    for (int s = 0; s < spatial; ++s)
        grid[static_cast<size_t>(s)] = static_cast<float>(acc[static_cast<size_t>(s)] * inv);
    if (unclamped) *unclamped = grid;
    clamp_inplace(grid, 0.0f, 1.0f);
    return grid;
}

Tensor resize_mask(const Tensor& mask, int target_height, int target_width) {
    if (mask.ndim() != 2)
        throw Error(ErrorCode::ShapeMismatch, "mask must be [h, w], got " + mask.shape_str());
    for (size_t i = 0; i < mask.size(); ++i)
        if (mask[i] < 0.0f || mask[i] > 1.0f)
            throw Error(ErrorCode::ValueOutOfRange, "mask values must lie in [0,1]");
    return resize_bilinear(mask, target_height, target_width);
}

Tensor fallback_mask(const ControlScaleStack& stack, int timestep_index, int target_height,
                     int target_width) {
    if (!stack.has_mask(timestep_index, 0))
        throw Error(ErrorCode::MissingMiddleBlockMask,
                    "no middle-block mask for timestep " + std::to_string(timestep_index));
    return resize_mask(stack.mask(timestep_index, 0), target_height, target_width);
}

ControlScaleStack build_control_stack(const AttentionArchive& archive,
                                      const std::set<int>& non_conflicting_indices,
                                      const std::vector<ModulatedLayer>& layers, int steps,
                                      MaskTimePooling pooling) {
    ControlScaleStack stack;
    for (int t = 0; t < steps; ++t) {
        // middle block first so attention-free layers can borrow it
        for (const auto& layer : layers) {
            if (layer.layer != 0) continue;
            stack.masks[{t, 0}] = compute_control_scale(archive, non_conflicting_indices, 0, t);
        }
        for (const auto& layer : layers) {
            if (layer.layer == 0) continue;
            if (archive.has_entry({t, layer.layer, 1})) {
                stack.masks[{t, layer.layer}] =
                    compute_control_scale(archive, non_conflicting_indices, layer.layer, t);
            } else {
                stack.masks[{t, layer.layer}] = fallback_mask(stack, t, layer.height, layer.width);
                stack.fallback_layers.insert(layer.layer);
            }
        }
    }

    if (pooling == MaskTimePooling::Mean && steps > 0) {
        for (const auto& layer : layers) {
            std::vector<double> acc;
            int h = 0, w = 0;
            for (int t = 0; t < steps; ++t) {
                const Tensor& m = stack.mask(t, layer.layer);
                if (acc.empty()) {
                    acc.assign(m.size(), 0.0);
                    h = m.dim(0);
                    w = m.dim(1);
                }
                for (size_t i = 0; i < m.size(); ++i) acc[i] += m[i];
            }
            Tensor mean({h, w});
            for (size_t i = 0; i < mean.size(); ++i)
                mean[i] = static_cast<float>(acc[i] / steps);
            for (int t = 0; t < steps; ++t) stack.masks[{t, layer.layer}] = mean;
        }
    }
    return stack;
}

} // namespace semguide
