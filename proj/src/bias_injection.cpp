#include "semguide/bias_injection.hpp"

#include <string>

#include "semguide/errors.hpp"

namespace semguide {

const Tensor* BiasStack::bias(int timestep, int layer, int module) const {
    auto it = biases.find({timestep, layer, module});
    return it == biases.end() ? nullptr : &it->second;
}

bool BiasStack::operator==(const BiasStack& other) const {
    if (lambda != other.lambda || n_tar != other.n_tar || biases.size() != other.biases.size())
        return false;
    auto it = biases.begin();
    auto jt = other.biases.begin();
    for (; it != biases.end(); ++it, ++jt)
        if (it->first != jt->first || !bitwise_equal(it->second, jt->second)) return false;
    return true;
}

Tensor compute_bias(const AttentionArchive& archive, const std::set<int>& conflicting_indices,
                    float lambda, int n_tar, int layer, int module, int timestep_index) {
    if (lambda < 0.0f) throw Error(ErrorCode::ValueOutOfRange, "lambda must be >= 0");
    auto [h, w] = archive.layer_resolution(layer);
    if (conflicting_indices.empty()) return Tensor({h, w}, 0.0f);
    if (n_tar < 1)
        throw Error(ErrorCode::NonPositiveNTar,
                    "bias needs at least one target token when conflicting tokens exist");

    const Tensor& map = archive.entry({timestep_index, layer, module});
    const int spatial = h * w;
    if (map.dim(0) != spatial)
        throw Error(ErrorCode::ShapeMismatch, "archive map does not match layer resolution");

    const double strength = static_cast<double>(lambda) / n_tar;
    Tensor grid({h, w});
    for (int s = 0; s < spatial; ++s) {
        double acc = 0.0;
        for (int token : conflicting_indices) {
            if (token < 0 || token >= map.dim(1))
                throw Error(ErrorCode::TargetIndexOutOfRange,
                            "token index " + std::to_string(token) + " outside archive token axis");
            acc += map.at(s, token);
        }
        grid[static_cast<size_t>(s)] = static_cast<float>(strength * acc);
    }
    return grid;
}

void apply_bias(Tensor& attention_probs, const Tensor& bias_grid,
                const std::set<int>& target_indices) {
    if (attention_probs.ndim() != 2)
        throw Error(ErrorCode::ShapeMismatch, "attention probs must be [spatial x tokens]");
    const int spatial = attention_probs.dim(0), tokens = attention_probs.dim(1);
    if (static_cast<int>(bias_grid.size()) != spatial)
        throw Error(ErrorCode::ShapeMismatch,
                    "bias grid " + bias_grid.shape_str() + " does not flatten to " +
                        std::to_string(spatial) + " rows");
    for (int token : target_indices)
        if (token < 0 || token >= tokens)
            throw Error(ErrorCode::TargetIndexOutOfRange,
                        "target token index " + std::to_string(token) + " out of range");

    for (int s = 0; s < spatial; ++s) {
        const float b = bias_grid[static_cast<size_t>(s)];
        for (int token : target_indices) attention_probs.at(s, token) += b;
    }
}

BiasStack build_bias_stack(const AttentionArchive& archive, const std::set<int>& conflicting_indices,
                           float lambda, int n_tar, int steps) {
    BiasStack stack;
    stack.lambda = lambda;
    stack.n_tar = conflicting_indices.empty() ? 0 : n_tar;
    if (conflicting_indices.empty() || lambda == 0.0f) return stack;

    for (int t = 0; t < steps; ++t)
        for (const auto& [layer, modules] : archive.modules_per_layer_map())
            for (int a = 1; a <= modules; ++a)
                stack.biases[{t, layer, a}] =
                    compute_bias(archive, conflicting_indices, lambda, n_tar, layer, a, t);
    return stack;
}

} // namespace semguide
