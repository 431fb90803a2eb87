#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "retarget/core/tensor.hpp"

namespace retarget::nn {

// Learnable tensor with accumulated gradient. Names are unique within a
// network and become the keys of the checkpoint container.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    bool frozen = false;

    Param() = default;
    Param(std::string n, std::vector<int> shape)
        : name(std::move(n)), value(shape), grad(std::move(shape)) {}

    void zero_grad() { grad.fill(0.0f); }
};

// Named persistent non-learnable state (batch-norm running stats).
using BufferRef = std::pair<std::string, Tensor*>;

// A layer caches whatever its backward needs during forward. One in-flight
// forward per layer instance; networks that need two concurrent activations
// run forward/backward pairs back to back.
class Layer {
public:
    virtual ~Layer() = default;

    virtual Tensor forward(const Tensor& x, bool train) = 0;
    // grad_out matches the last forward's output shape. Returns grad w.r.t.
    // input; accumulates into Param::grad unless accumulate_param_grads is off.
    virtual Tensor backward(const Tensor& grad_out, bool accumulate_param_grads) = 0;

    virtual void collect_params(std::vector<Param*>& /*out*/) {}
    virtual void collect_buffers(std::vector<BufferRef>& /*out*/) {}
};

}  // namespace retarget::nn
