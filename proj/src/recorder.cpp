#include "semguide/recorder.hpp"

#include "semguide/errors.hpp"

namespace semguide {

AttentionRecorder::AttentionRecorder(const DenoisingBackbone& backbone,
                                     std::set<int> special_token_indices, int token_count)
    : backbone_(&backbone), special_indices_(std::move(special_token_indices)) {
    auto sites = backbone.attention_sites();
    if (sites.empty())
        throw Error(ErrorCode::NoAttentionSites, "backbone exposes no cross-attention sites");
    std::map<int, int> modules;
    for (const auto& site : sites) {
        archive_.set_layer_resolution(site.layer, site.height, site.width);
        modules[site.layer] = std::max(modules[site.layer], site.module);
    }
    for (const auto& [layer, count] : modules) archive_.set_modules_per_layer(layer, count);
    archive_.set_token_count(token_count);
}

StepHooks AttentionRecorder::hooks_for_step(int step_index) {
    StepHooks hooks;
    if (!active_) return hooks;
    hooks.observe_probs = [this, step_index](const AttentionSite& site, const Tensor& probs) {
        if (!active_) return;
        archive_.set_entry({step_index, site.layer, site.module},
                           exclude_and_renormalize(probs, special_indices_));
    };
    return hooks;
}

StepHooksProvider AttentionRecorder::provider() {
    return [this](int step_index) { return hooks_for_step(step_index); };
}

AttentionArchive capture_pass(const DenoisingBackbone& backbone, const SamplerConfig& config,
                              const PromptEncoding& prompt, const Tensor& uncond_embeddings,
                              const Tensor& condition) {
    std::set<int> specials(prompt.tokens.special_indices.begin(), prompt.tokens.special_indices.end());
    AttentionRecorder recorder(backbone, specials, prompt.tokens.token_count());

    ControlContext control;
    control.condition = &condition;
    control.scalar_scale = 1.0f; // full-strength condition guidance for the capture run

    ddim_sample(backbone, config, prompt.embeddings, uncond_embeddings, &control, recorder.provider());
    return recorder.take_archive();
}

} // namespace semguide
