#pragma once

#include "retarget/core/geometry.hpp"
#include "retarget/core/tensor.hpp"
#include "retarget/data/augment.hpp"
#include "retarget/data/dataset.hpp"

namespace retarget::data {

// One supervised training pair. Channels 0-2 of model_input hold the
// resized+cropped image, 3-5 hold the conditioning mask; ground_truth is the
// original. Both are zero outside their (0,0)-anchored valid rectangles.
struct PairedSample {
    Tensor model_input;   // [6, canvas, canvas]
    Tensor ground_truth;  // [3, canvas, canvas]
    Rect input_valid;
    Rect gt_valid;
};

struct SynthConfig {
    bool shift_jitter = true;     // jitter mask placement by up to ±10% of canvas, p=0.5
    float shift_jitter_prob = 0.5f;
    float shift_jitter_frac = 0.1f;
};

// Aspect-preserving downscale so max(h, w) == canvas; no-op for images that
// already fit. Image bilinear, segmentation nearest, bbox rescaled.
void prescale_to_canvas(Tensor& image, ObjectAnnotation& ann, int canvas);

// Builds the (input, mask, ground-truth) triple for one image. The mask
// describes the original-size geometry with the object at its annotated
// placement (optionally jittered); the input channels show the distorted view
// the network must undo.
PairedSample synthesize_pair(const Tensor& original, const ObjectAnnotation& ann,
                             const AugParams& params, int canvas,
                             const SynthConfig& config = {});

// Extracts the valid-region prefix of a padded [C,S,S] tensor.
Tensor crop_valid(const Tensor& padded, const Rect& valid);

}  // namespace retarget::data
