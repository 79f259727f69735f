#ifndef SEMGUIDE_ATTENTION_ARCHIVE_HPP
#define SEMGUIDE_ATTENTION_ARCHIVE_HPP

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "semguide/tensor.hpp"

namespace semguide {

// (timestep_index, layer, module). Layer 0 is the middle block; decoder
// blocks are 1..N in execution order. Module ids are 1-based.
struct ArchiveKey {
    int timestep = 0;
    int layer = 0;
    int module = 1;

    auto operator<=>(const ArchiveKey&) const = default;
};

// Cross-attention maps captured during the auxiliary pass, keyed by
// (timestep, layer, module). Every map is [spatial x tokens] with rows
// renormalized over non-special tokens; special columns are zero.
class AttentionArchive {
public:
    void set_entry(const ArchiveKey& key, Tensor map);
    const Tensor& entry(const ArchiveKey& key) const; // throws MissingArchiveEntry
    bool has_entry(const ArchiveKey& key) const;
    const std::map<ArchiveKey, Tensor>& entries() const { return entries_; }

    void set_layer_resolution(int layer, int height, int width);
    std::pair<int, int> layer_resolution(int layer) const;
    const std::map<int, std::pair<int, int>>& layer_resolutions() const { return layer_resolutions_; }

    void set_modules_per_layer(int layer, int count);
    int modules_per_layer(int layer) const;
    const std::map<int, int>& modules_per_layer_map() const { return modules_per_layer_; }

    int token_count() const { return token_count_; }
    void set_token_count(int n) { token_count_ = n; }

    // Checks every entry: values in [0,1], rows sum to 1 within tol, special
    // columns exactly zero, spatial length matches the layer resolution.
    void validate(const std::set<int>& special_indices, float tol = 1e-5f) const;

    bool operator==(const AttentionArchive& other) const;

private:
    std::map<ArchiveKey, Tensor> entries_;
    std::map<int, std::pair<int, int>> layer_resolutions_;
    std::map<int, int> modules_per_layer_;
    int token_count_ = 0;
};

// Zeroes the special-token columns of a row-stochastic [spatial x tokens]
// map and rescales each row back to unit mass. Equal to a softmax taken over
// only the remaining tokens' logits.
//
// Errors: AllTokensSpecial when special_indices covers every column,
// InvalidInput when a row does not sum to 1 within 1e-5,
// DegenerateAttentionRow when a row has no mass left outside the specials.
Tensor exclude_and_renormalize(const Tensor& raw_map, const std::set<int>& special_indices);

} // namespace semguide

#endif
