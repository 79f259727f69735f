#ifndef SEMGUIDE_MASK_ESTIMATION_HPP
#define SEMGUIDE_MASK_ESTIMATION_HPP

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "semguide/attention_archive.hpp"
#include "semguide/backbone.hpp"

namespace semguide {

enum class MaskTimePooling {
    Matched, // per-timestep masks applied at the same target-pass step
    Mean,    // one time-averaged mask per layer, applied at every step
};

// Per-(timestep, layer) control-scale grids in [0,1]. A mask exists for
// every modulated layer at every timestep; layers without cross-attention
// receive the middle-block mask (resized when the resolutions differ) and
// are listed in fallback_layers.
struct ControlScaleStack {
    std::map<std::pair<int, int>, Tensor> masks; // (timestep, layer) -> [h, w]
    std::set<int> fallback_layers;

    const Tensor& mask(int timestep, int layer) const; // throws MissingArchiveEntry
    bool has_mask(int timestep, int layer) const;

    bool operator==(const ControlScaleStack& other) const;
};

// Mean over the non-conflicting tokens' maps across a layer's modules:
// (1 / (N * A)) * sum_n sum_a M_(l,a)[t_n], reshaped to the layer grid and
// clamped to [0,1]. `unclamped` (optional) receives the pre-clamp grid so
// callers can verify the clamp is a numerical no-op.
Tensor compute_control_scale(const AttentionArchive& archive,
                             const std::set<int>& non_conflicting_indices, int layer,
                             int timestep_index, Tensor* unclamped = nullptr);

// Stand-in mask for a layer with no cross-attention: the middle-block mask
// of the same timestep, resized if the target resolution differs.
Tensor fallback_mask(const ControlScaleStack& stack, int timestep_index, int target_height,
                     int target_width);

// Bilinear mask resampling (half-pixel centers, edge clamp); validates the
// input range and returns an identical copy when the shape already matches.
Tensor resize_mask(const Tensor& mask, int target_height, int target_width);

// Builds masks for every modulated layer at every timestep. Layers absent
// from the archive fall back to the middle-block mask. Mean pooling replaces
// each layer's per-step masks with their time average.
ControlScaleStack build_control_stack(const AttentionArchive& archive,
                                      const std::set<int>& non_conflicting_indices,
                                      const std::vector<ModulatedLayer>& layers, int steps,
                                      MaskTimePooling pooling);

} // namespace semguide

#endif
