#include "retarget/loss/perceptual.hpp"

#include "retarget/core/rng.hpp"
#include "retarget/core/tensor.hpp"

namespace retarget::loss {

using retarget::nn::Conv2d;
using retarget::nn::PadMode;

DilatedPyramidBackbone::DilatedPyramidBackbone(uint64_t seed, int width, int in_channels) {
    convs_.push_back(std::make_unique<Conv2d>("hrf.conv0", in_channels, width, 3, 2, 1,
                                              PadMode::Zero, 1));
    convs_.push_back(std::make_unique<Conv2d>("hrf.conv1", width, width, 3, 1, 2, PadMode::Zero, 2));
    convs_.push_back(std::make_unique<Conv2d>("hrf.conv2", width, width, 3, 1, 4, PadMode::Zero, 4));
    relus_.resize(convs_.size());
    Rng rng(seed);
    for (auto& c : convs_) {
        c->init_kaiming(rng);
        c->weight().frozen = true;
        c->bias().frozen = true;
    }
}

std::vector<Tensor> DilatedPyramidBackbone::forward(const Tensor& x) {
    std::vector<Tensor> feats;
    Tensor y = x;
    for (size_t i = 0; i < convs_.size(); ++i) {
        y = relus_[i].forward(convs_[i]->forward(y, false), false);
        feats.push_back(y);
    }
    return feats;
}

Tensor DilatedPyramidBackbone::backward(const std::vector<Tensor>& feature_grads) {
    Tensor g;
    for (int i = static_cast<int>(convs_.size()) - 1; i >= 0; --i) {
        const Tensor& inject = feature_grads[static_cast<size_t>(i)];
        if (g.empty()) g = inject;
        else if (!inject.empty()) g.add_(inject);
        g = convs_[static_cast<size_t>(i)]->backward(
            relus_[static_cast<size_t>(i)].backward(g, false), false);
    }
    return g;
}

std::vector<retarget::nn::Param*> DilatedPyramidBackbone::params() {
    std::vector<retarget::nn::Param*> out;
    for (auto& c : convs_) c->collect_params(out);
    return out;
}

uint64_t DilatedPyramidBackbone::param_hash() const {
    uint64_t h = 0;
    for (const auto& c : convs_) {
        h ^= tensor_hash(const_cast<Conv2d&>(*c).weight().value);
        h = mix64(h ^ tensor_hash(const_cast<Conv2d&>(*c).bias().value));
    }
    return h;
}

}  // namespace retarget::loss
