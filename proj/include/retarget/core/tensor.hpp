#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace retarget {

// Dense row-major float tensor, rank 1..4. Images are CHW, batches NCHW,
// values in [0,1] for anything that touches disk.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);
    Tensor(std::vector<int> shape, std::vector<float> values);

    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<int> shape, float value);

    const std::vector<int>& shape() const { return shape_; }
    int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int64_t numel() const { return static_cast<int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }

    float& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
    float operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

    // CHW / NCHW indexed access.
    float& at(int c, int y, int x);
    float at(int c, int y, int x) const;
    float& at(int n, int c, int y, int x);
    float at(int n, int c, int y, int x) const;

    void fill(float value);
    bool all_finite() const;
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    std::string shape_str() const;

    // Elementwise in-place helpers.
    Tensor& add_(const Tensor& other);
    Tensor& scale_(float s);
    Tensor& axpy_(float a, const Tensor& other);  // this += a * other

    double sum() const;
    double abs_sum() const;
    double sq_sum() const;
    float min() const;
    float max() const;

private:
    std::vector<int> shape_;
    std::vector<float> data_;
};

// Extracts one sample n as a CHW tensor from an NCHW batch (copy).
Tensor slice_sample(const Tensor& batch, int n);
// Writes a CHW tensor into sample n of an NCHW batch.
void set_sample(Tensor& batch, int n, const Tensor& chw);
// Stacks CHW tensors of identical shape into NCHW.
Tensor stack_samples(const std::vector<Tensor>& samples);

// Channel-range copy [c0, c1) of a CHW or NCHW tensor.
Tensor channel_slice(const Tensor& t, int c0, int c1);
// Concatenates along the channel axis; either side may be empty.
Tensor channel_concat(const Tensor& a, const Tensor& b);

// FNV-1a over raw tensor bytes; used for parameter-freeze assertions.
uint64_t tensor_hash(const Tensor& t);

}  // namespace retarget
