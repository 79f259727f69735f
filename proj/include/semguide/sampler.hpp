#ifndef SEMGUIDE_SAMPLER_HPP
#define SEMGUIDE_SAMPLER_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semguide/backbone.hpp"

namespace semguide {

struct SamplerConfig {
    int steps = 50;
    float guidance_scale = 7.5f;
    uint64_t seed = 0;
    std::string schedule = "ddim_linear";

    void validate() const; // throws InvalidConfig
};

// Deterministic DDIM update rule (eta = 0) over a linear beta schedule:
// 1000 training steps, beta from 1.0e-4 to 2.0e-2 inclusive, alpha_bar the
// running product of (1 - beta). Sampling timesteps are leading-spaced:
// t_i = (steps - 1 - i) * floor(1000 / steps) for execution index i, so
// index 0 is the noisiest step.
class DdimScheduler {
public:
    explicit DdimScheduler(const SamplerConfig& config);

    int steps() const { return static_cast<int>(timesteps_.size()); }
    int train_timestep(int step_index) const { return timesteps_[static_cast<size_t>(step_index)]; }

    // x_{t_i} -> x_{t_{i+1}} given the noise estimate at step i.
    Tensor step(const Tensor& latent, int step_index, const Tensor& noise_estimate) const;

    static constexpr int kTrainSteps = 1000;

private:
    std::vector<int> timesteps_;
    std::vector<double> alpha_bar_;
};

// Seeded initial latent; the "init_noise" stream of the run seed.
Tensor initial_noise(const LatentGeometry& geometry, uint64_t seed,
                     const std::string& stream = "init_noise");

// One guided denoising evaluation: eps_uncond + g * (eps_cond - eps_uncond).
// Both branches are always evaluated; g == 0 and g == 1 return the branch
// estimates unchanged. Control features and hooks apply to the conditional
// branch only.
Tensor cfg_step(const DenoisingBackbone& backbone, const Tensor& latent, int train_timestep,
                const Tensor& cond_embeddings, const Tensor& uncond_embeddings, float guidance_scale,
                const ControlContext* control, const StepHooks* hooks);

// Full deterministic sampling loop. `hooks_for_step` (optional) supplies the
// hook set for each execution step index.
using StepHooksProvider = std::function<StepHooks(int step_index)>;

Tensor ddim_sample(const DenoisingBackbone& backbone, const SamplerConfig& config,
                   const Tensor& cond_embeddings, const Tensor& uncond_embeddings,
                   const ControlContext* control, const StepHooksProvider& hooks_for_step);

} // namespace semguide

#endif
