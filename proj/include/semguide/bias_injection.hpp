#ifndef SEMGUIDE_BIAS_INJECTION_HPP
#define SEMGUIDE_BIAS_INJECTION_HPP

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "semguide/attention_archive.hpp"
#include "semguide/backbone.hpp"

namespace semguide {

// Non-negative attention-bias grids per (timestep, layer, module), computed
// from conflicting-token maps of the auxiliary pass and added to the target
// tokens' attention during generation. Empty conflicting set => no entries
// and the stack is disabled (the mild-conflict case).
struct BiasStack {
    std::map<std::tuple<int, int, int>, Tensor> biases; // (timestep, layer, module)
    float lambda = 0.0f;
    int n_tar = 0;

    bool enabled() const { return !biases.empty(); }
    const Tensor* bias(int timestep, int layer, int module) const; // nullptr when absent

    bool operator==(const BiasStack& other) const;
};

// (lambda / n_tar) * sum over conflicting tokens of M_(l,a)[t_n], reshaped
// to the layer grid. Returns a zero grid when the conflicting set is empty.
// Errors: NonPositiveNTar (conflicting tokens but n_tar < 1), ValueOutOfRange
// (negative lambda), MissingArchiveEntry.
Tensor compute_bias(const AttentionArchive& archive, const std::set<int>& conflicting_indices,
                    float lambda, int n_tar, int layer, int module, int timestep_index);

// Adds the flattened bias grid onto each target-token column of a
// post-softmax [spatial x tokens] matrix. Rows are deliberately not
// renormalized: the bias raises total target influence. Non-target columns
// are untouched.
void apply_bias(Tensor& attention_probs, const Tensor& bias_grid,
                const std::set<int>& target_indices);

// Bias grids for every archived site at every timestep. A zero lambda or an
// empty conflicting set produces a disabled (empty) stack.
BiasStack build_bias_stack(const AttentionArchive& archive, const std::set<int>& conflicting_indices,
                           float lambda, int n_tar, int steps);

} // namespace semguide

#endif
