#pragma once

#include "retarget/core/geometry.hpp"
#include "retarget/core/tensor.hpp"

namespace retarget::maskgen {

using retarget::Rect;
using retarget::Tensor;

// Desired output geometry: target canvas size plus the rectangle where the
// object should land on that canvas.
struct RetargetSpec {
    int target_w = 0;
    int target_h = 0;
    Rect object_rect;

    void validate(int canvas) const;  // throws ModuleError("mask_generator")
};

// Three-channel conditioning image: object composited on white over the
// target-size region, zero padding outside it.
struct MaskImage {
    Tensor data;  // [3, canvas, canvas]
    Rect valid;   // (0, 0, target_w, target_h)
};

struct ExtractedObject {
    Tensor rgb;    // [3,H,W]; image values where seg=1, zero elsewhere
    Tensor alpha;  // [H,W] binary
    Rect tight_bbox;
};

// Cuts the segmented object out of an image. Throws on an empty segmentation.
ExtractedObject extract_object(const Tensor& image, const Tensor& seg);

// White canvas of the target size, object resized (bilinear RGB, nearest
// alpha) into object_rect and hard-alpha composited, zero-padded to
// canvas x canvas (top-left anchored).
MaskImage build_target_mask(const ExtractedObject& obj, const RetargetSpec& spec, int canvas);

// Channels 0-2 = input image, 3-5 = mask; plain concatenation.
Tensor assemble_model_input(const Tensor& input_img, const MaskImage& mask);

// Zero-pads a [C,H,W] tensor to [C,canvas,canvas], top-left anchored.
Tensor pad_to_canvas(const Tensor& img, int canvas);

}  // namespace retarget::maskgen
