#ifndef SEMGUIDE_RECORDER_HPP
#define SEMGUIDE_RECORDER_HPP

#include <memory>
#include <set>

#include "semguide/attention_archive.hpp"
#include "semguide/backbone.hpp"
#include "semguide/sampler.hpp"

namespace semguide {

// Observes a backbone's cross-attention sites during one sampling run and
// collects head-averaged, special-token-renormalized maps into an archive.
// Observation is read-only: a run with a recorder attached produces output
// bit-identical to one without. One recorder per run; not shareable.
class AttentionRecorder {
public:
    // Binds to the backbone's declared sites. Throws NoAttentionSites when
    // the backbone reports none.
    explicit AttentionRecorder(const DenoisingBackbone& backbone, std::set<int> special_token_indices,
                               int token_count);

    bool active() const { return active_; }
    // After detaching the hook provider hands out empty hooks, restoring
    // unobserved behavior.
    void detach() { active_ = false; }

    StepHooks hooks_for_step(int step_index);
    StepHooksProvider provider();

    const AttentionArchive& archive() const { return archive_; }
    AttentionArchive take_archive() { return std::move(archive_); }

private:
    const DenoisingBackbone* backbone_;
    std::set<int> special_indices_;
    AttentionArchive archive_;
    bool active_ = true;
};

// Runs the full auxiliary denoising pass for attention capture: guided
// sampling with the given (surrogate) prompt embeddings, control branch at
// full scale, recorder attached. Returns one renormalized map per
// (timestep, layer, module) from the text-conditional branch.
AttentionArchive capture_pass(const DenoisingBackbone& backbone, const SamplerConfig& config,
                              const PromptEncoding& prompt, const Tensor& uncond_embeddings,
                              const Tensor& condition);

} // namespace semguide

#endif
