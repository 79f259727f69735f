#ifndef SEMGUIDE_BACKBONE_HPP
#define SEMGUIDE_BACKBONE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semguide/tensor.hpp"
#include "semguide/tokenizer.hpp"

namespace semguide {

// Identifies one cross-attention module and the spatial grid it attends
// from. Layer 0 is the middle block, decoder blocks are 1..N in execution
// order; module ids are 1-based within a layer.
struct AttentionSite {
    int layer = 0;
    int module = 1;
    int height = 0;
    int width = 0;

    bool operator==(const AttentionSite&) const = default;
};

// A decoder-side merge point whose control feature is scaled before being
// added into the skip pathway. Layer 0 names the middle-block residual.
struct ModulatedLayer {
    int layer = 0;
    int height = 0;
    int width = 0;

    bool operator==(const ModulatedLayer&) const = default;
};

struct LatentGeometry {
    int channels = 0;
    int height = 0;
    int width = 0;

    bool operator==(const LatentGeometry&) const = default;
};

struct PromptEncoding {
    TokenizedPrompt tokens;
    Tensor embeddings; // [tokens x embed_dim]
};

// Per-evaluation observation and edit points. Every callback is optional;
// a null hook set must leave the evaluation bit-identical to an unhooked
// one. Hooks fire only in the text-conditional branch of a guided step.
//
// Order at each attention site: logits are offered to edit_logits (per
// head, pre-softmax), the head-averaged unedited probabilities go to
// observe_probs, edit_probs may then modify each head's rows, and the
// head-averaged post-edit state goes to observe_probs_post. Control merges
// query control_scale once per modulated layer as the decoder reaches it.
struct StepHooks {
    std::function<void(const AttentionSite&, Tensor&)> edit_logits;
    std::function<void(const AttentionSite&, const Tensor&)> observe_probs;
    std::function<void(const AttentionSite&, Tensor&)> edit_probs;
    std::function<void(const AttentionSite&, const Tensor&)> observe_probs_post;
    // Returns the [h, w] scale grid for a modulated layer, or nullptr to use
    // the scalar scale from the control context.
    std::function<const Tensor*(int layer)> control_scale;
};

// Visual-condition input for the control branch. The condition feeds only
// the text-conditional evaluation of a guided step.
struct ControlContext {
    const Tensor* condition = nullptr; // [c, h, w], values in [0,1]
    float scalar_scale = 1.0f;         // used when no control_scale hook grid is given
    bool zero_branch = false;          // forces control features to zero (diagnostics)
};

// Contract every denoising backbone implements so the pipeline can drive it.
// Implementations must be immutable after construction and safe to share
// across concurrent sampling runs; per-run state lives in the hooks.
class DenoisingBackbone {
public:
    virtual ~DenoisingBackbone() = default;

    virtual std::vector<AttentionSite> attention_sites() const = 0;
    virtual std::vector<ModulatedLayer> modulated_layers() const = 0;
    virtual LatentGeometry latent_geometry() const = 0;
    virtual const Tokenizer& tokenizer() const = 0;
    virtual PromptEncoding encode_prompt(const std::string& text) const = 0;

    // Predicts the noise residual for one latent at one training timestep.
    // `control` may be null (plain text-to-image evaluation); `hooks` may be
    // null (unobserved evaluation).
    virtual Tensor predict_noise(const Tensor& latent, int train_timestep,
                                 const Tensor& token_embeddings, const ControlContext* control,
                                 const StepHooks* hooks) const = 0;

    // Whether two identical predict_noise calls are guaranteed bit-identical.
    virtual bool deterministic() const { return true; }
};

} // namespace semguide

#endif
