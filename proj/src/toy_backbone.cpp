#include "semguide/toy_backbone.hpp"

#include <cmath>

#include "nn_ops.hpp"
#include "semguide/control_modulation.hpp"
#include "semguide/errors.hpp"
#include "semguide/rng.hpp"

namespace semguide {

namespace {

using nn::Conv3x3;
using nn::Linear;

// x + conv2(silu(conv1(x) + time_bias)), time bias broadcast per channel
struct ResBlock {
    Conv3x3 conv1, conv2;
    Linear time_proj;

    void init(int ch, int time_dim, uint64_t seed, const std::string& name) {
        conv1.init(ch, ch, derive_seed(seed, name + ".conv1"));
        conv2.init(ch, ch, derive_seed(seed, name + ".conv2"));
        time_proj.init(time_dim, ch, derive_seed(seed, name + ".time"));
    }

    Tensor forward(const Tensor& x, const Tensor& temb_row) const {
        Tensor h = conv1.apply(x);
        Tensor bias = time_proj.apply(temb_row); // [1, ch]
        const int c = h.dim(0), hh = h.dim(1), ww = h.dim(2);
        for (int ic = 0; ic < c; ++ic)
            for (int y = 0; y < hh; ++y)
                for (int xx = 0; xx < ww; ++xx) h.at(ic, y, xx) += bias.at(0, ic);
        nn::silu_inplace(h);
        h = conv2.apply(h);
        add_inplace(h, x);
        return h;
    }
};

struct CrossAttention {
    AttentionSite site;
    int channels = 0, heads = 0, inner = 0;
    Linear wq, wk, wv, wo;

    void init(const AttentionSite& s, int ch, int n_heads, int inner_dim, int emb_dim,
              uint64_t seed, const std::string& name) {
        site = s;
        channels = ch;
        heads = n_heads;
        inner = inner_dim;
        wq.init(ch, inner_dim, derive_seed(seed, name + ".wq"));
        wk.init(emb_dim, inner_dim, derive_seed(seed, name + ".wk"));
        wv.init(emb_dim, inner_dim, derive_seed(seed, name + ".wv"));
        wo.init(inner_dim, ch, derive_seed(seed, name + ".wo"));
    }

    static Tensor head_slice(const Tensor& m, int head, int dh) {
        Tensor out({m.dim(0), dh});
        for (int i = 0; i < m.dim(0); ++i)
            for (int j = 0; j < dh; ++j) out.at(i, j) = m.at(i, head * dh + j);
        return out;
    }

    Tensor forward(const Tensor& x, const Tensor& token_emb, const StepHooks* hooks) const {
        const int h = x.dim(1), w = x.dim(2);
        const int spatial = h * w, tokens = token_emb.dim(0);
        const int dh = inner / heads;
        const float scale = 1.0f / std::sqrt(static_cast<float>(dh));

        Tensor rows = nn::rms_norm_rows(nn::spatial_to_rows(x));
        Tensor q = wq.apply(rows);
        Tensor k = wk.apply(token_emb);
        Tensor v = wv.apply(token_emb);

        std::vector<Tensor> probs(static_cast<size_t>(heads));
        for (int hd = 0; hd < heads; ++hd) {
            Tensor qh = head_slice(q, hd, dh);
            Tensor kh = head_slice(k, hd, dh);
            Tensor logits({spatial, tokens});
            for (int i = 0; i < spatial; ++i)
                for (int j = 0; j < tokens; ++j) {
                    double acc = 0.0;
                    for (int d = 0; d < dh; ++d)
                        acc += static_cast<double>(qh.at(i, d)) * kh.at(j, d);
                    logits.at(i, j) = static_cast<float>(acc) * scale;
                }
            if (hooks && hooks->edit_logits) hooks->edit_logits(site, logits);
            softmax_rows_inplace(logits);
            probs[static_cast<size_t>(hd)] = std::move(logits);
        }

        if (hooks && hooks->observe_probs) hooks->observe_probs(site, head_average(probs));
        if (hooks && hooks->edit_probs)
            for (auto& ph : probs) hooks->edit_probs(site, ph);
        if (hooks && hooks->observe_probs_post) hooks->observe_probs_post(site, head_average(probs));

        Tensor merged({spatial, inner});
        for (int hd = 0; hd < heads; ++hd) {
            const Tensor& ph = probs[static_cast<size_t>(hd)];
            for (int i = 0; i < spatial; ++i)
                for (int d = 0; d < dh; ++d) {
                    double acc = 0.0;
                    for (int j = 0; j < tokens; ++j)
                        acc += static_cast<double>(ph.at(i, j)) * v.at(j, hd * dh + d);
                    merged.at(i, hd * dh + d) = static_cast<float>(acc);
                }
        }
        Tensor out = wo.apply(merged);
        Tensor y = x;
        add_inplace(y, nn::rows_to_spatial(out, h, w));
        return y;
    }

    static Tensor head_average(const std::vector<Tensor>& probs) {
        Tensor avg({probs[0].dim(0), probs[0].dim(1)});
        const double inv = 1.0 / static_cast<double>(probs.size());
        for (int i = 0; i < avg.dim(0); ++i)
            for (int j = 0; j < avg.dim(1); ++j) {
                double acc = 0.0;
                for (const auto& ph : probs) acc += ph.at(i, j);
                avg.at(i, j) = static_cast<float>(acc * inv);
            }
        return avg;
    }
};

struct AttnBlock {
    ResBlock res1, res2;
    std::vector<CrossAttention> attns;

    Tensor forward(const Tensor& x, const Tensor& token_emb, const Tensor& temb,
                   const StepHooks* hooks) const {
        Tensor h = res1.forward(x, temb);
        for (const auto& attn : attns) h = attn.forward(h, token_emb, hooks);
        return res2.forward(h, temb);
    }
};

} // namespace

void BackboneConfig::validate() const {
    if (channels.size() < 2)
        throw Error(ErrorCode::InvalidConfig, "need at least 2 resolution levels");
    for (int c : channels)
        if (c < 1) throw Error(ErrorCode::InvalidConfig, "channel width must be >= 1");
    const int n = decoder_blocks();
    if (latent_size < (1 << (n - 1)) || latent_size % (1 << (n - 1)) != 0)
        throw Error(ErrorCode::InvalidConfig, "latent_size must be divisible by 2^(levels-1)");
    if (latent_channels < 1) throw Error(ErrorCode::InvalidConfig, "latent_channels must be >= 1");
    if (attention_modules_per_layer < 1)
        throw Error(ErrorCode::InvalidConfig, "need at least one cross-attention module per layer");
    if (heads < 1 || token_embed_dim % heads != 0)
        throw Error(ErrorCode::InvalidConfig, "heads must divide token_embed_dim");
    if (time_embed_dim < 2 || time_embed_dim % 2 != 0)
        throw Error(ErrorCode::InvalidConfig, "time_embed_dim must be even and >= 2");
}

struct ToyBackbone::Impl {
    BackboneConfig cfg;
    ToyTokenizer tok;
    int levels = 0;

    Conv3x3 stem;
    std::vector<ResBlock> enc;        // per level
    std::vector<Conv3x3> enc_down;    // level i -> i+1
    AttnBlock mid;                    // layer 0
    std::vector<AttnBlock> dec;       // blocks 1..N (index l-1)
    std::vector<Conv3x3> dec_up;      // after blocks 1..N-1
    Conv3x3 head;

    Conv3x3 ctrl_latent_stem, ctrl_cond_stem;
    std::vector<ResBlock> ctrl_levels;
    std::vector<Conv3x3> ctrl_down;
    Conv3x3 ctrl_mid;

    Linear time_mlp1, time_mlp2;

    int level_size(int level) const { return cfg.latent_size >> level; } // level 0 = finest
    int block_size(int block) const { return level_size(levels - block); } // decoder block 1..N

    explicit Impl(const BackboneConfig& config) : cfg(config) {
        cfg.validate();
        levels = cfg.decoder_blocks();
        const uint64_t seed = cfg.seed;
        const int A = cfg.attention_modules_per_layer;

        stem.init(cfg.latent_channels, cfg.channels[0], derive_seed(seed, "stem"));
        enc.resize(static_cast<size_t>(levels));
        for (int i = 0; i < levels; ++i)
            enc[static_cast<size_t>(i)].init(cfg.channels[static_cast<size_t>(i)], cfg.time_embed_dim,
                                             seed, "enc" + std::to_string(i));
        enc_down.resize(static_cast<size_t>(levels - 1));
        for (int i = 0; i + 1 < levels; ++i)
            enc_down[static_cast<size_t>(i)].init(cfg.channels[static_cast<size_t>(i)],
                                                  cfg.channels[static_cast<size_t>(i + 1)],
                                                  derive_seed(seed, "down" + std::to_string(i)));

        const int deep = cfg.channels.back();
        const int mid_size = level_size(levels - 1);
        mid.res1.init(deep, cfg.time_embed_dim, seed, "mid.res1");
        mid.res2.init(deep, cfg.time_embed_dim, seed, "mid.res2");
        mid.attns.resize(static_cast<size_t>(A));
        for (int a = 0; a < A; ++a)
            mid.attns[static_cast<size_t>(a)].init({0, a + 1, mid_size, mid_size}, deep, cfg.heads,
                                                   cfg.token_embed_dim, cfg.token_embed_dim, seed,
                                                   "mid.attn" + std::to_string(a + 1));

        dec.resize(static_cast<size_t>(levels));
        dec_up.resize(static_cast<size_t>(levels - 1));
        for (int block = 1; block <= levels; ++block) {
            const int ch = cfg.channels[static_cast<size_t>(levels - block)];
            auto& d = dec[static_cast<size_t>(block - 1)];
            const std::string name = "dec" + std::to_string(block);
            d.res1.init(ch, cfg.time_embed_dim, seed, name + ".res1");
            d.res2.init(ch, cfg.time_embed_dim, seed, name + ".res2");
            if (block >= 2) {
                const int sz = block_size(block);
                d.attns.resize(static_cast<size_t>(A));
                for (int a = 0; a < A; ++a)
                    d.attns[static_cast<size_t>(a)].init({block, a + 1, sz, sz}, ch, cfg.heads,
                                                         cfg.token_embed_dim, cfg.token_embed_dim,
                                                         seed, name + ".attn" + std::to_string(a + 1));
            }
            if (block < levels)
                dec_up[static_cast<size_t>(block - 1)].init(
                    ch, cfg.channels[static_cast<size_t>(levels - block - 1)],
                    derive_seed(seed, name + ".up"));
        }
        head.init(cfg.channels[0], cfg.latent_channels, derive_seed(seed, "head"));

        ctrl_latent_stem.init(cfg.latent_channels, cfg.channels[0], derive_seed(seed, "ctrl.latent"));
        ctrl_cond_stem.init(3, cfg.channels[0], derive_seed(seed, "ctrl.cond"));
        ctrl_levels.resize(static_cast<size_t>(levels));
        ctrl_down.resize(static_cast<size_t>(levels - 1));
        for (int i = 0; i < levels; ++i) {
            ctrl_levels[static_cast<size_t>(i)].init(cfg.channels[static_cast<size_t>(i)],
                                                     cfg.time_embed_dim, seed,
                                                     "ctrl.level" + std::to_string(i));
            if (i + 1 < levels)
                ctrl_down[static_cast<size_t>(i)].init(cfg.channels[static_cast<size_t>(i)],
                                                       cfg.channels[static_cast<size_t>(i + 1)],
                                                       derive_seed(seed, "ctrl.down" + std::to_string(i)));
        }
        ctrl_mid.init(deep, deep, derive_seed(seed, "ctrl.mid"));

        time_mlp1.init(cfg.time_embed_dim, cfg.time_embed_dim, derive_seed(seed, "time.mlp1"));
        time_mlp2.init(cfg.time_embed_dim, cfg.time_embed_dim, derive_seed(seed, "time.mlp2"));
    }

    Tensor time_embedding(int t) const {
        Tensor row({1, cfg.time_embed_dim});
        Tensor sin = nn::sinusoid(static_cast<double>(t), cfg.time_embed_dim);
        for (int i = 0; i < cfg.time_embed_dim; ++i) row.at(0, i) = sin[static_cast<size_t>(i)];
        Tensor h = time_mlp1.apply(row);
        nn::silu_inplace(h);
        return time_mlp2.apply(h);
    }

    // Condition image resampled to the latent grid with channels forced to 3.
    Tensor prepare_condition(const Tensor& cond) const {
        if (cond.ndim() != 3 || (cond.dim(0) != 1 && cond.dim(0) != 3))
            throw Error(ErrorCode::InvalidInput, "condition must be [1|3, h, w], got " + cond.shape_str());
        const int h = cond.dim(1), w = cond.dim(2);
        if (h % cfg.latent_size != 0 || w % cfg.latent_size != 0 || h != w)
            throw Error(ErrorCode::InvalidInput,
                        "condition size must be a square multiple of the latent grid");
        Tensor rgb({3, h, w});
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) rgb.at(c, y, x) = cond.at(cond.dim(0) == 1 ? 0 : c, y, x);
        const int factor = h / cfg.latent_size;
        return factor == 1 ? rgb : nn::avg_pool_factor(rgb, factor);
    }

    // Control features per level (finest first) plus the middle residual.
    void control_features(const Tensor& latent, const ControlContext& control, const Tensor& temb,
                          std::vector<Tensor>& features, Tensor& mid_feature) const {
        features.clear();
        if (control.zero_branch || !control.condition) {
            for (int i = 0; i < levels; ++i) {
                const int sz = level_size(i);
                features.emplace_back(
                    std::vector<int>{cfg.channels[static_cast<size_t>(i)], sz, sz}, 0.0f);
            }
            const int mid_sz = level_size(levels - 1);
            mid_feature = Tensor({cfg.channels.back(), mid_sz, mid_sz}, 0.0f);
            return;
        }
        Tensor x = ctrl_latent_stem.apply(latent);
        add_inplace(x, ctrl_cond_stem.apply(prepare_condition(*control.condition)));
        for (int i = 0; i < levels; ++i) {
            x = ctrl_levels[static_cast<size_t>(i)].forward(x, temb);
            features.push_back(x);
            if (i + 1 < levels) x = ctrl_down[static_cast<size_t>(i)].apply(nn::avg_pool2(x));
        }
        mid_feature = ctrl_mid.apply(features.back());
    }

    Tensor forward(const Tensor& latent, int t, const Tensor& token_emb,
                   const ControlContext* control, const StepHooks* hooks) const {
        if (latent.ndim() != 3 || latent.dim(0) != cfg.latent_channels ||
            latent.dim(1) != cfg.latent_size || latent.dim(2) != cfg.latent_size)
            throw Error(ErrorCode::ShapeMismatch, "latent " + latent.shape_str());
        if (token_emb.ndim() != 2 || token_emb.dim(1) != cfg.token_embed_dim)
            throw Error(ErrorCode::ShapeMismatch, "token embeddings " + token_emb.shape_str());

        const Tensor temb = time_embedding(t);
        const bool has_control = control != nullptr;

        std::vector<Tensor> cn;
        Tensor cn_mid;
        if (has_control) control_features(latent, *control, temb, cn, cn_mid);

        auto mask_for = [&](int layer) -> const Tensor* {
            if (hooks && hooks->control_scale) return hooks->control_scale(layer);
            return nullptr;
        };

        // encoder
        Tensor x = stem.apply(latent);
        std::vector<Tensor> skips;
        for (int i = 0; i < levels; ++i) {
            x = enc[static_cast<size_t>(i)].forward(x, temb);
            skips.push_back(x);
            if (i + 1 < levels) x = enc_down[static_cast<size_t>(i)].apply(nn::avg_pool2(x));
        }

        // middle block, then its modulated control residual (layer 0)
        Tensor h = mid.forward(skips.back(), token_emb, temb, hooks);
        if (has_control)
            merge_features(h, nullptr, cn_mid, mask_for(0), control->scalar_scale);

        // decoder blocks 1..N; block l consumes the level-(N-l) skip
        for (int block = 1; block <= levels; ++block) {
            const size_t level = static_cast<size_t>(levels - block);
            if (has_control)
                merge_features(h, &skips[level], cn[level], mask_for(block), control->scalar_scale);
            else
                add_inplace(h, skips[level]);
            h = dec[static_cast<size_t>(block - 1)].forward(h, token_emb, temb, hooks);
            if (block < levels)
                h = dec_up[static_cast<size_t>(block - 1)].apply(nn::upsample_nearest2(h));
        }
        return head.apply(h);
    }
};

ToyBackbone::ToyBackbone(const BackboneConfig& config) : impl_(std::make_unique<Impl>(config)) {}
ToyBackbone::~ToyBackbone() = default;

const BackboneConfig& ToyBackbone::config() const { return impl_->cfg; }

std::vector<AttentionSite> ToyBackbone::attention_sites() const {
    std::vector<AttentionSite> sites;
    for (const auto& attn : impl_->mid.attns) sites.push_back(attn.site);
    for (const auto& block : impl_->dec)
        for (const auto& attn : block.attns) sites.push_back(attn.site);
    return sites;
}

std::vector<ModulatedLayer> ToyBackbone::modulated_layers() const {
    std::vector<ModulatedLayer> layers;
    const int mid_sz = impl_->level_size(impl_->levels - 1);
    layers.push_back({0, mid_sz, mid_sz});
    for (int block = 1; block <= impl_->levels; ++block) {
        const int sz = impl_->block_size(block);
        layers.push_back({block, sz, sz});
    }
    return layers;
}

LatentGeometry ToyBackbone::latent_geometry() const {
    return {impl_->cfg.latent_channels, impl_->cfg.latent_size, impl_->cfg.latent_size};
}

const Tokenizer& ToyBackbone::tokenizer() const { return impl_->tok; }

PromptEncoding ToyBackbone::encode_prompt(const std::string& text) const {
    PromptEncoding enc;
    enc.tokens = impl_->tok.tokenize(text);
    const int dim = impl_->cfg.token_embed_dim;
    const int count = enc.tokens.token_count();
    enc.embeddings = Tensor({count, dim});
    for (int i = 0; i < count; ++i) {
        GaussianStream g(derive_seed(impl_->cfg.seed, "tok/" + enc.tokens.pieces[static_cast<size_t>(i)]));
        Tensor pos = nn::sinusoid(static_cast<double>(i), dim);
        for (int j = 0; j < dim; ++j)
            enc.embeddings.at(i, j) = g.next() + 0.5f * pos[static_cast<size_t>(j)];
    }
    return enc;
}

Tensor ToyBackbone::predict_noise(const Tensor& latent, int train_timestep,
                                  const Tensor& token_embeddings, const ControlContext* control,
                                  const StepHooks* hooks) const {
    return impl_->forward(latent, train_timestep, token_embeddings, control, hooks);
}

std::unique_ptr<ToyBackbone> build_backbone(const BackboneConfig& config) {
    return std::make_unique<ToyBackbone>(config);
}

} // namespace semguide
