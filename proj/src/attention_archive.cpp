#include "semguide/attention_archive.hpp"

#include <cmath>
#include <string>

#include "semguide/errors.hpp"

namespace semguide {

namespace {

std::string key_str(const ArchiveKey& k) {
    return "(t=" + std::to_string(k.timestep) + ", l=" + std::to_string(k.layer) +
           ", a=" + std::to_string(k.module) + ")";
}

} // namespace

void AttentionArchive::set_entry(const ArchiveKey& key, Tensor map) {
    entries_[key] = std::move(map);
}

const Tensor& AttentionArchive::entry(const ArchiveKey& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw Error(ErrorCode::MissingArchiveEntry, "no attention map for " + key_str(key));
    return it->second;
}

bool AttentionArchive::has_entry(const ArchiveKey& key) const {
    return entries_.count(key) > 0;
}

void AttentionArchive::set_layer_resolution(int layer, int height, int width) {
    layer_resolutions_[layer] = {height, width};
}

std::pair<int, int> AttentionArchive::layer_resolution(int layer) const {
    auto it = layer_resolutions_.find(layer);
    if (it == layer_resolutions_.end())
        throw Error(ErrorCode::MissingArchiveEntry, "no resolution for layer " + std::to_string(layer));
    return it->second;
}

void AttentionArchive::set_modules_per_layer(int layer, int count) {
    modules_per_layer_[layer] = count;
}

int AttentionArchive::modules_per_layer(int layer) const {
    auto it = modules_per_layer_.find(layer);
    if (it == modules_per_layer_.end())
        throw Error(ErrorCode::MissingArchiveEntry, "no module count for layer " + std::to_string(layer));
    return it->second;
}

void AttentionArchive::validate(const std::set<int>& special_indices, float tol) const {
    for (const auto& [key, map] : entries_) {
        auto [h, w] = layer_resolution(key.layer);
        if (map.ndim() != 2 || map.dim(0) != h * w || map.dim(1) != token_count_)
            throw Error(ErrorCode::ShapeMismatch, "archive entry " + key_str(key) + " has shape " + map.shape_str());
        for (int i = 0; i < map.dim(0); ++i) {
            double sum = 0.0;
            for (int j = 0; j < map.dim(1); ++j) {
                float v = map.at(i, j);
                if (v < 0.0f || v > 1.0f)
                    throw Error(ErrorCode::ValueOutOfRange, "archive value outside [0,1] at " + key_str(key));
                if (special_indices.count(j) && v != 0.0f)
                    throw Error(ErrorCode::InvalidInput, "special column not zero at " + key_str(key));
                sum += v;
            }
            if (std::fabs(sum - 1.0) > tol)
                throw Error(ErrorCode::InvalidInput, "row mass " + std::to_string(sum) + " at " + key_str(key));
        }
    }
}

bool AttentionArchive::operator==(const AttentionArchive& other) const {
    if (token_count_ != other.token_count_ || layer_resolutions_ != other.layer_resolutions_ ||
        modules_per_layer_ != other.modules_per_layer_)
        return false;
    if (entries_.size() != other.entries_.size()) return false;
    auto it = entries_.begin();
    auto jt = other.entries_.begin();
    for (; it != entries_.end(); ++it, ++jt) {
        if (it->first != jt->first || !bitwise_equal(it->second, jt->second)) return false;
    }
    return true;
}

Tensor exclude_and_renormalize(const Tensor& raw_map, const std::set<int>& special_indices) {
    if (raw_map.ndim() != 2)
        throw Error(ErrorCode::ShapeMismatch, "expected [spatial x tokens], got " + raw_map.shape_str());
    const int rows = raw_map.dim(0), cols = raw_map.dim(1);

    int specials_in_range = 0;
    for (int j : special_indices)
        if (j >= 0 && j < cols) ++specials_in_range;
    if (specials_in_range >= cols)
        throw Error(ErrorCode::AllTokensSpecial, "every token column is special");

    const bool pass_through = specials_in_range == 0;
    Tensor out({rows, cols});
    for (int i = 0; i < rows; ++i) {
        double total = 0.0, kept = 0.0;
        for (int j = 0; j < cols; ++j) {
            total += raw_map.at(i, j);
            if (!special_indices.count(j)) kept += raw_map.at(i, j);
        }
        if (std::fabs(total - 1.0) > 1e-5)
            throw Error(ErrorCode::InvalidInput,
                        "row " + std::to_string(i) + " sums to " + std::to_string(total) + ", not 1");
        if (kept <= 0.0)
            throw Error(ErrorCode::DegenerateAttentionRow,
                        "row " + std::to_string(i) + " has no mass outside special tokens");
        if (pass_through) continue;
        for (int j = 0; j < cols; ++j)
            out.at(i, j) = special_indices.count(j)
                               ? 0.0f
                               : static_cast<float>(static_cast<double>(raw_map.at(i, j)) / kept);
    }
    // nothing excluded -> the map passes through untouched
    return pass_through ? raw_map : out;
}

} // namespace semguide
