#ifndef SEMGUIDE_TENSOR_HPP
#define SEMGUIDE_TENSOR_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace semguide {

// Dense row-major float32 tensor, up to 3 dimensions in practice:
// [h, w] grids, [rows, cols] matrices and [c, h, w] feature blocks.
// Reductions are accumulated in double before rounding back to float.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape, float fill = 0.0f);
    static Tensor from_data(std::vector<int> shape, std::vector<float> data);

    int ndim() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
    const std::vector<int>& shape() const { return shape_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::vector<float>& storage() { return data_; }
    const std::vector<float>& storage() const { return data_; }

    float& operator[](size_t i) { return data_[i]; }
    float operator[](size_t i) const { return data_[i]; }

    float& at(int i, int j) { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
    float at(int i, int j) const { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
    float& at(int c, int y, int x) {
        return data_[(static_cast<size_t>(c) * shape_[1] + y) * shape_[2] + x];
    }
    float at(int c, int y, int x) const {
        return data_[(static_cast<size_t>(c) * shape_[1] + y) * shape_[2] + x];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    std::string shape_str() const;

    void fill(float v);

private:
    std::vector<int> shape_;
    std::vector<float> data_;
};

// a += b (shapes must match)
void add_inplace(Tensor& a, const Tensor& b);
// a *= s
void scale_inplace(Tensor& a, float s);
void clamp_inplace(Tensor& a, float lo, float hi);

// c = a * b for [m,k] x [k,n], double accumulation
Tensor matmul(const Tensor& a, const Tensor& b);

// In-place row softmax of a [rows, cols] matrix, double accumulation.
void softmax_rows_inplace(Tensor& m);

float max_abs_diff(const Tensor& a, const Tensor& b);
bool bitwise_equal(const Tensor& a, const Tensor& b);
// elementwise ==; treats +0.0f and -0.0f as equal, unlike bitwise_equal
bool exactly_equal(const Tensor& a, const Tensor& b);

// Bilinear resample of a [h, w] grid to [out_h, out_w]. Half-pixel-center
// source mapping (align_corners = false) with edge clamping; returns an
// untouched copy when the shape already matches.
Tensor resize_bilinear(const Tensor& grid, int out_h, int out_w);

// FNV-1a over the raw float bytes, hex-encoded.
std::string tensor_hash(const Tensor& t);

} // namespace semguide

#endif
