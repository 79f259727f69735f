#ifndef SEMGUIDE_NN_OPS_HPP
#define SEMGUIDE_NN_OPS_HPP

// Internal dense NN primitives for the toy backbone. CPU float32 with
// double accumulation; deterministic given fixed weights.

#include <cmath>
#include <string>

#include "semguide/errors.hpp"
#include "semguide/rng.hpp"
#include "semguide/tensor.hpp"

namespace semguide::nn {

inline void silu_inplace(Tensor& x) {
    float* p = x.data();
    for (size_t i = 0; i < x.size(); ++i) {
        double v = p[i];
        p[i] = static_cast<float>(v / (1.0 + std::exp(-v)));
    }
}

// Per-row RMS normalization of a [rows, cols] matrix.
inline Tensor rms_norm_rows(const Tensor& x) {
    const int rows = x.dim(0), cols = x.dim(1);
    Tensor out({rows, cols});
    for (int i = 0; i < rows; ++i) {
        double ms = 0.0;
        for (int j = 0; j < cols; ++j) ms += static_cast<double>(x.at(i, j)) * x.at(i, j);
        double inv = 1.0 / std::sqrt(ms / cols + 1e-6);
        for (int j = 0; j < cols; ++j) out.at(i, j) = static_cast<float>(x.at(i, j) * inv);
    }
    return out;
}

// 3x3 same-padding convolution.
struct Conv3x3 {
    int cin = 0, cout = 0;
    Tensor w; // [cout, cin, 3, 3] flattened as [cout, cin*9]
    Tensor b; // [cout]

    void init(int in_ch, int out_ch, uint64_t seed) {
        cin = in_ch;
        cout = out_ch;
        w = Tensor({out_ch, in_ch * 9});
        b = Tensor({out_ch});
        GaussianStream g(seed);
        g.fill(w.data(), w.size(), 1.0f / std::sqrt(static_cast<float>(in_ch * 9)));
        g.fill(b.data(), b.size(), 0.02f);
    }

    Tensor apply(const Tensor& x) const {
        if (x.ndim() != 3 || x.dim(0) != cin)
            throw Error(ErrorCode::ShapeMismatch, "conv input " + x.shape_str());
        const int h = x.dim(1), wd = x.dim(2);
        Tensor out({cout, h, wd});
        for (int oc = 0; oc < cout; ++oc) {
            for (int y = 0; y < h; ++y) {
                for (int xx = 0; xx < wd; ++xx) {
                    double acc = b[static_cast<size_t>(oc)];
                    for (int ic = 0; ic < cin; ++ic) {
                        for (int ky = -1; ky <= 1; ++ky) {
                            int sy = y + ky;
                            if (sy < 0 || sy >= h) continue;
                            for (int kx = -1; kx <= 1; ++kx) {
                                int sx = xx + kx;
                                if (sx < 0 || sx >= wd) continue;
                                acc += static_cast<double>(x.at(ic, sy, sx)) *
                                       w.at(oc, ic * 9 + (ky + 1) * 3 + (kx + 1));
                            }
                        }
                    }
                    out.at(oc, y, xx) = static_cast<float>(acc);
                }
            }
        }
        return out;
    }
};

struct Linear {
    int cin = 0, cout = 0;
    Tensor w; // [cin, cout]
    Tensor b; // [cout]

    void init(int in_dim, int out_dim, uint64_t seed) {
        cin = in_dim;
        cout = out_dim;
        w = Tensor({in_dim, out_dim});
        b = Tensor({out_dim});
        GaussianStream g(seed);
        g.fill(w.data(), w.size(), 1.0f / std::sqrt(static_cast<float>(in_dim)));
        g.fill(b.data(), b.size(), 0.02f);
    }

    // [rows, cin] -> [rows, cout]
    Tensor apply(const Tensor& x) const {
        if (x.ndim() != 2 || x.dim(1) != cin)
            throw Error(ErrorCode::ShapeMismatch, "linear input " + x.shape_str());
        const int rows = x.dim(0);
        Tensor out({rows, cout});
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cout; ++j) {
                double acc = b[static_cast<size_t>(j)];
                for (int k = 0; k < cin; ++k)
                    acc += static_cast<double>(x.at(i, k)) * w.at(k, j);
                out.at(i, j) = static_cast<float>(acc);
            }
        }
        return out;
    }
};

inline Tensor avg_pool2(const Tensor& x) {
    const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
    Tensor out({c, h / 2, w / 2});
    for (int ic = 0; ic < c; ++ic)
        for (int y = 0; y < h / 2; ++y)
            for (int xx = 0; xx < w / 2; ++xx)
                out.at(ic, y, xx) = (x.at(ic, 2 * y, 2 * xx) + x.at(ic, 2 * y, 2 * xx + 1) +
                                     x.at(ic, 2 * y + 1, 2 * xx) + x.at(ic, 2 * y + 1, 2 * xx + 1)) *
                                    0.25f;
    return out;
}

// Average-pool by an arbitrary integer factor (condition -> latent grid).
inline Tensor avg_pool_factor(const Tensor& x, int factor) {
    const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
    Tensor out({c, h / factor, w / factor});
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int ic = 0; ic < c; ++ic)
        for (int y = 0; y < h / factor; ++y)
            for (int xx = 0; xx < w / factor; ++xx) {
                double acc = 0.0;
                for (int dy = 0; dy < factor; ++dy)
                    for (int dx = 0; dx < factor; ++dx)
                        acc += x.at(ic, y * factor + dy, xx * factor + dx);
                out.at(ic, y, xx) = static_cast<float>(acc * inv);
            }
    return out;
}

inline Tensor upsample_nearest2(const Tensor& x) {
    const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
    Tensor out({c, h * 2, w * 2});
    for (int ic = 0; ic < c; ++ic)
        for (int y = 0; y < 2 * h; ++y)
            for (int xx = 0; xx < 2 * w; ++xx) out.at(ic, y, xx) = x.at(ic, y / 2, xx / 2);
    return out;
}

// Sinusoidal position code, the usual interleaved sin/cos ladder.
inline Tensor sinusoid(double position, int dim) {
    Tensor e({dim});
    for (int i = 0; i < dim / 2; ++i) {
        double freq = std::exp(-std::log(10000.0) * (2.0 * i / dim));
        e[static_cast<size_t>(2 * i)] = static_cast<float>(std::sin(position * freq));
        e[static_cast<size_t>(2 * i + 1)] = static_cast<float>(std::cos(position * freq));
    }
    return e;
}

// [C,H,W] -> [H*W, C]
inline Tensor spatial_to_rows(const Tensor& x) {
    const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
    Tensor out({h * w, c});
    for (int ic = 0; ic < c; ++ic)
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx) out.at(y * w + xx, ic) = x.at(ic, y, xx);
    return out;
}

// [H*W, C] -> [C,H,W]
inline Tensor rows_to_spatial(const Tensor& rows, int h, int w) {
    const int c = rows.dim(1);
    Tensor out({c, h, w});
    for (int ic = 0; ic < c; ++ic)
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx) out.at(ic, y, xx) = rows.at(y * w + xx, ic);
    return out;
}

} // namespace semguide::nn

#endif
