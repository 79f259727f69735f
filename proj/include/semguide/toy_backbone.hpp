#ifndef SEMGUIDE_TOY_BACKBONE_HPP
#define SEMGUIDE_TOY_BACKBONE_HPP

#include <memory>

#include "semguide/backbone.hpp"

namespace semguide {

// Geometry and seeding of the miniature denoiser. `channels` has one entry
// per resolution level; the level count equals the decoder block count N.
// Decoder block 1 carries no cross-attention (the middle-block mask stands
// in for it); blocks 2..N and the middle block hold
// `attention_modules_per_layer` cross-attention modules each.
struct BackboneConfig {
    int latent_size = 32;
    int latent_channels = 4;
    std::vector<int> channels = {8, 12, 16};
    int attention_modules_per_layer = 1;
    int heads = 2;
    int token_embed_dim = 32;
    int time_embed_dim = 32;
    uint64_t seed = 1234;

    int decoder_blocks() const { return static_cast<int>(channels.size()); }
    void validate() const; // throws InvalidConfig
};

// A miniature latent-diffusion denoiser: UNet-style encoder/decoder with
// cross-attention against a hash-seeded token embedder, plus a mirrored
// control branch that injects condition features into the decoder skips and
// the middle block. Weights are untrained, drawn deterministically from the
// config seed; the point is an observable mechanism, not image quality.
//
// Instances are immutable after construction and shareable across
// concurrent sampling runs.
class ToyBackbone : public DenoisingBackbone {
public:
    explicit ToyBackbone(const BackboneConfig& config);
    ~ToyBackbone() override;

    ToyBackbone(const ToyBackbone&) = delete;
    ToyBackbone& operator=(const ToyBackbone&) = delete;

    const BackboneConfig& config() const;

    std::vector<AttentionSite> attention_sites() const override;
    std::vector<ModulatedLayer> modulated_layers() const override;
    LatentGeometry latent_geometry() const override;
    const Tokenizer& tokenizer() const override;
    PromptEncoding encode_prompt(const std::string& text) const override;
    Tensor predict_noise(const Tensor& latent, int train_timestep, const Tensor& token_embeddings,
                         const ControlContext* control, const StepHooks* hooks) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<ToyBackbone> build_backbone(const BackboneConfig& config);

} // namespace semguide

#endif
