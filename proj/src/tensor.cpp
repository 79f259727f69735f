#include "semguide/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "semguide/errors.hpp"
#include "semguide/rng.hpp"

namespace semguide {

namespace {

size_t shape_count(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw Error(ErrorCode::InvalidInput, "tensor dimension must be positive");
        n *= static_cast<size_t>(d);
    }
    return n;
}

} // namespace

Tensor::Tensor(std::vector<int> shape, float fill)
    : shape_(std::move(shape)), data_(shape_count(shape_), fill) {}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<float> data) {
    Tensor t;
    if (shape_count(shape) != data.size())
        throw Error(ErrorCode::ShapeMismatch, "data length does not match shape");
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
    os << "]";
    return os.str();
}

void Tensor::fill(float v) {
    std::fill(data_.begin(), data_.end(), v);
}

void add_inplace(Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw Error(ErrorCode::ShapeMismatch, "add: " + a.shape_str() + " vs " + b.shape_str());
    float* pa = a.data();
    const float* pb = b.data();
    for (size_t i = 0; i < a.size(); ++i) pa[i] += pb[i];
}

void scale_inplace(Tensor& a, float s) {
    float* p = a.data();
    for (size_t i = 0; i < a.size(); ++i) p[i] *= s;
}

void clamp_inplace(Tensor& a, float lo, float hi) {
    float* p = a.data();
    for (size_t i = 0; i < a.size(); ++i) p[i] = std::min(hi, std::max(lo, p[i]));
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0))
        throw Error(ErrorCode::ShapeMismatch, "matmul: " + a.shape_str() + " x " + b.shape_str());
    const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Tensor c({m, n});
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += static_cast<double>(a.at(i, t)) * b.at(t, j);
            c.at(i, j) = static_cast<float>(acc);
        }
    }
    return c;
}

void softmax_rows_inplace(Tensor& m) {
    if (m.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "softmax expects a matrix");
    const int rows = m.dim(0), cols = m.dim(1);
    for (int i = 0; i < rows; ++i) {
        float mx = m.at(i, 0);
        for (int j = 1; j < cols; ++j) mx = std::max(mx, m.at(i, j));
        double denom = 0.0;
        for (int j = 0; j < cols; ++j) denom += std::exp(static_cast<double>(m.at(i, j)) - mx);
        for (int j = 0; j < cols; ++j)
            m.at(i, j) = static_cast<float>(std::exp(static_cast<double>(m.at(i, j)) - mx) / denom);
    }
}

float max_abs_diff(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw Error(ErrorCode::ShapeMismatch, "diff: " + a.shape_str() + " vs " + b.shape_str());
    float worst = 0.0f;
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
    return worst;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) return false;
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

bool exactly_equal(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

Tensor resize_bilinear(const Tensor& grid, int out_h, int out_w) {
    if (grid.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "resize expects a [h,w] grid");
    if (out_h <= 0 || out_w <= 0)
        throw Error(ErrorCode::ZeroTargetDimension, "resize target must be positive");
    const int src_h = grid.dim(0), src_w = grid.dim(1);
    if (src_h == out_h && src_w == out_w) return grid;

    Tensor out({out_h, out_w});
    const double sy = static_cast<double>(src_h) / out_h;
    const double sx = static_cast<double>(src_w) / out_w;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y1 = std::min(y0 + 1, src_h - 1);
        y0 = std::max(y0, 0);
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x1 = std::min(x0 + 1, src_w - 1);
            x0 = std::max(x0, 0);
            double v = (1.0 - wy) * ((1.0 - wx) * grid.at(y0, x0) + wx * grid.at(y0, x1)) +
                       wy * ((1.0 - wx) * grid.at(y1, x0) + wx * grid.at(y1, x1));
            out.at(y, x) = static_cast<float>(v);
        }
    }
    return out;
}

std::string tensor_hash(const Tensor& t) {
    return hash_hex(fnv1a64(t.data(), t.size() * sizeof(float)));
}

} // namespace semguide
