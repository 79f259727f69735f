#include "semguide/sampler.hpp"

#include <cmath>

#include "semguide/errors.hpp"
#include "semguide/rng.hpp"

namespace semguide {

void SamplerConfig::validate() const {
    if (steps < 1) throw Error(ErrorCode::InvalidConfig, "steps must be >= 1");
    if (guidance_scale < 0.0f) throw Error(ErrorCode::InvalidConfig, "guidance scale must be >= 0");
    if (schedule != "ddim_linear")
        throw Error(ErrorCode::InvalidConfig, "unknown schedule '" + schedule + "'");
}

DdimScheduler::DdimScheduler(const SamplerConfig& config) {
    config.validate();
    alpha_bar_.resize(kTrainSteps);
    double prod = 1.0;
    for (int t = 0; t < kTrainSteps; ++t) {
        double beta = 1.0e-4 + (2.0e-2 - 1.0e-4) * t / (kTrainSteps - 1);
        prod *= 1.0 - beta;
        alpha_bar_[static_cast<size_t>(t)] = prod;
    }
    const int stride = kTrainSteps / config.steps;
    for (int i = config.steps - 1; i >= 0; --i) timesteps_.push_back(i * stride);
}

Tensor DdimScheduler::step(const Tensor& latent, int step_index, const Tensor& noise_estimate) const {
    if (!latent.same_shape(noise_estimate))
        throw Error(ErrorCode::ShapeMismatch, "noise estimate shape mismatch");
    const int t = timesteps_[static_cast<size_t>(step_index)];
    const double a_t = alpha_bar_[static_cast<size_t>(t)];
    const double a_prev = (step_index + 1 < steps())
                              ? alpha_bar_[static_cast<size_t>(timesteps_[static_cast<size_t>(step_index + 1)])]
                              : 1.0;

    const float sq_at = static_cast<float>(std::sqrt(a_t));
    const float sq_1mat = static_cast<float>(std::sqrt(1.0 - a_t));
    const float sq_aprev = static_cast<float>(std::sqrt(a_prev));
    const float sq_1maprev = static_cast<float>(std::sqrt(1.0 - a_prev));

    Tensor out = latent;
    float* x = out.data();
    const float* eps = noise_estimate.data();
    for (size_t i = 0; i < out.size(); ++i) {
        const float x0 = (x[i] - sq_1mat * eps[i]) / sq_at;
        x[i] = sq_aprev * x0 + sq_1maprev * eps[i];
    }
    return out;
}

Tensor initial_noise(const LatentGeometry& geometry, uint64_t seed, const std::string& stream) {
    Tensor noise({geometry.channels, geometry.height, geometry.width});
    GaussianStream g(derive_seed(seed, stream));
    g.fill(noise.data(), noise.size());
    return noise;
}

Tensor cfg_step(const DenoisingBackbone& backbone, const Tensor& latent, int train_timestep,
                const Tensor& cond_embeddings, const Tensor& uncond_embeddings, float guidance_scale,
                const ControlContext* control, const StepHooks* hooks) {
    Tensor eps_uncond =
        backbone.predict_noise(latent, train_timestep, uncond_embeddings, nullptr, nullptr);
    Tensor eps_cond = backbone.predict_noise(latent, train_timestep, cond_embeddings, control, hooks);

    if (guidance_scale == 0.0f) return eps_uncond;
    if (guidance_scale == 1.0f) return eps_cond;

    Tensor out = eps_uncond;
    float* o = out.data();
    const float* u = eps_uncond.data();
    const float* c = eps_cond.data();
    for (size_t i = 0; i < out.size(); ++i) o[i] = u[i] + guidance_scale * (c[i] - u[i]);
    return out;
}

Tensor ddim_sample(const DenoisingBackbone& backbone, const SamplerConfig& config,
                   const Tensor& cond_embeddings, const Tensor& uncond_embeddings,
                   const ControlContext* control, const StepHooksProvider& hooks_for_step) {
    DdimScheduler scheduler(config);
    Tensor x = initial_noise(backbone.latent_geometry(), config.seed);
    for (int i = 0; i < scheduler.steps(); ++i) {
        StepHooks step_hooks;
        const StepHooks* hooks = nullptr;
        if (hooks_for_step) {
            step_hooks = hooks_for_step(i);
            hooks = &step_hooks;
        }
        Tensor eps = cfg_step(backbone, x, scheduler.train_timestep(i), cond_embeddings,
                              uncond_embeddings, config.guidance_scale, control, hooks);
        x = scheduler.step(x, i, eps);
    }
    return x;
}

} // namespace semguide
