#pragma once

#include <memory>
#include <optional>

#include "retarget/ffc/spectral_transform.hpp"

namespace retarget::ffc {

struct FFCConfig {
    int channels_in = 0;
    int channels_out = 0;
    float global_ratio = 0.75f;  // fraction of channels routed through the spectral branch
    int kernel_size = 3;

    int global_in() const { return static_cast<int>(channels_in * global_ratio + 0.5f); }
    int local_in() const { return channels_in - global_in(); }
    int global_out() const { return static_cast<int>(channels_out * global_ratio + 0.5f); }
    int local_out() const { return channels_out - global_out(); }
};

// Four-path local/global convolution block. Local->local and global->local
// are spatial convs, local->global is a spatial conv, global->global is the
// spectral transform. Each branch sum goes through batch norm + ReLU.
class FFCBlock {
public:
    FFCBlock(const std::string& name, const FFCConfig& cfg);

    void init(retarget::Rng& rng);

    // Either tensor may be empty when the corresponding channel count is 0.
    std::pair<Tensor, Tensor> forward(const Tensor& x_local, const Tensor& x_global, bool train);
    std::pair<Tensor, Tensor> backward(const Tensor& g_local, const Tensor& g_global, bool acc);

    const FFCConfig& config() const { return cfg_; }
    void collect_params(std::vector<retarget::nn::Param*>& out);
    void collect_buffers(std::vector<retarget::nn::BufferRef>& out);

private:
    FFCConfig cfg_;
    std::unique_ptr<retarget::nn::Conv2d> conv_ll_, conv_gl_, conv_lg_;
    std::unique_ptr<SpectralTransform> spectral_;
    std::unique_ptr<retarget::nn::BatchNorm2d> bn_l_, bn_g_;
    retarget::nn::ReLU relu_l_, relu_g_;
    std::vector<int> local_in_shape_, global_in_shape_;
};

}  // namespace retarget::ffc
