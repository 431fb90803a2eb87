#include "retarget/core/tensor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace retarget {

namespace {
int64_t shape_numel(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
        if (d < 0) throw std::invalid_argument("negative tensor dimension");
        n *= d;
    }
    return n;
}
}  // namespace

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(static_cast<size_t>(shape_numel(shape_)), 0.0f) {}

Tensor::Tensor(std::vector<int> shape, std::vector<float> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
    if (static_cast<int64_t>(data_.size()) != shape_numel(shape_))
        throw std::invalid_argument("tensor shape/value count mismatch");
}

Tensor Tensor::full(std::vector<int> shape, float value) {
    Tensor t(std::move(shape));
    t.fill(value);
    return t;
}

float& Tensor::at(int c, int y, int x) {
    assert(rank() == 3);
    return data_[(static_cast<size_t>(c) * dim(1) + y) * dim(2) + x];
}
float Tensor::at(int c, int y, int x) const {
    return const_cast<Tensor*>(this)->at(c, y, x);
}
float& Tensor::at(int n, int c, int y, int x) {
    assert(rank() == 4);
    return data_[((static_cast<size_t>(n) * dim(1) + c) * dim(2) + y) * dim(3) + x];
}
float Tensor::at(int n, int c, int y, int x) const {
    return const_cast<Tensor*>(this)->at(n, c, y, x);
}

void Tensor::fill(float value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
    for (float v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
    os << "]";
    return os.str();
}

Tensor& Tensor::add_(const Tensor& other) {
    assert(same_shape(other));
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Tensor& Tensor::scale_(float s) {
    for (float& v : data_) v *= s;
    return *this;
}

Tensor& Tensor::axpy_(float a, const Tensor& other) {
    assert(same_shape(other));
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += a * other.data_[i];
    return *this;
}

double Tensor::sum() const {
    double s = 0.0;
    for (float v : data_) s += v;
    return s;
}
double Tensor::abs_sum() const {
    double s = 0.0;
    for (float v : data_) s += std::abs(v);
    return s;
}
double Tensor::sq_sum() const {
    double s = 0.0;
    for (float v : data_) s += static_cast<double>(v) * v;
    return s;
}
float Tensor::min() const {
    return data_.empty() ? 0.0f : *std::min_element(data_.begin(), data_.end());
}
float Tensor::max() const {
    return data_.empty() ? 0.0f : *std::max_element(data_.begin(), data_.end());
}

Tensor slice_sample(const Tensor& batch, int n) {
    assert(batch.rank() == 4);
    const int c = batch.dim(1), h = batch.dim(2), w = batch.dim(3);
    Tensor out({c, h, w});
    const int64_t count = static_cast<int64_t>(c) * h * w;
    std::memcpy(out.data(), batch.data() + n * count, sizeof(float) * count);
    return out;
}

void set_sample(Tensor& batch, int n, const Tensor& chw) {
    assert(batch.rank() == 4 && chw.rank() == 3);
    const int64_t count = chw.numel();
    std::memcpy(batch.data() + n * count, chw.data(), sizeof(float) * count);
}

Tensor stack_samples(const std::vector<Tensor>& samples) {
    assert(!samples.empty());
    const auto& s = samples.front().shape();
    Tensor out({static_cast<int>(samples.size()), s[0], s[1], s[2]});
    for (size_t n = 0; n < samples.size(); ++n) set_sample(out, static_cast<int>(n), samples[n]);
    return out;
}

Tensor channel_slice(const Tensor& t, int c0, int c1) {
    const bool batched = t.rank() == 4;
    const int n = batched ? t.dim(0) : 1;
    const int c = batched ? t.dim(1) : t.dim(0);
    const int h = batched ? t.dim(2) : t.dim(1);
    const int w = batched ? t.dim(3) : t.dim(2);
    assert(c0 >= 0 && c1 <= c && c0 <= c1);
    const int64_t plane = static_cast<int64_t>(h) * w;
    Tensor out(batched ? std::vector<int>{n, c1 - c0, h, w} : std::vector<int>{c1 - c0, h, w});
    for (int ni = 0; ni < n; ++ni)
        std::memcpy(out.data() + static_cast<int64_t>(ni) * (c1 - c0) * plane,
                    t.data() + (static_cast<int64_t>(ni) * c + c0) * plane,
                    sizeof(float) * (c1 - c0) * plane);
    return out;
}

Tensor channel_concat(const Tensor& a, const Tensor& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    const bool batched = a.rank() == 4;
    const int n = batched ? a.dim(0) : 1;
    const int ca = batched ? a.dim(1) : a.dim(0);
    const int cb = batched ? b.dim(1) : b.dim(0);
    const int h = batched ? a.dim(2) : a.dim(1);
    const int w = batched ? a.dim(3) : a.dim(2);
    const int64_t plane = static_cast<int64_t>(h) * w;
    Tensor out(batched ? std::vector<int>{n, ca + cb, h, w}
                       : std::vector<int>{ca + cb, h, w});
    for (int ni = 0; ni < n; ++ni) {
        std::memcpy(out.data() + static_cast<int64_t>(ni) * (ca + cb) * plane,
                    a.data() + static_cast<int64_t>(ni) * ca * plane, sizeof(float) * ca * plane);
        std::memcpy(out.data() + (static_cast<int64_t>(ni) * (ca + cb) + ca) * plane,
                    b.data() + static_cast<int64_t>(ni) * cb * plane, sizeof(float) * cb * plane);
    }
    return out;
}

uint64_t tensor_hash(const Tensor& t) {
    uint64_t h = 1469598103934665603ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(t.data());
    const size_t n = static_cast<size_t>(t.numel()) * sizeof(float);
    for (size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace retarget
