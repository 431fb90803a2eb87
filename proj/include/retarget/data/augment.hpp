#pragma once

#include <cstdint>

#include "retarget/core/geometry.hpp"

namespace retarget::data {

using retarget::Rect;

// Simultaneous resize+crop parameters. Scales are per-axis in [0.5, 1.0];
// crop_window is expressed in post-resize coordinates and always contains the
// scaled bounding box.
struct AugParams {
    float scale_x = 1.0f;
    float scale_y = 1.0f;
    Rect crop_window;
    uint64_t rng_seed = 0;
};

// Round-half-up resize dimension, never below 1.
int scaled_dim(int dim, float scale);

// Conservative (outward-rounded) image-space rectangle after scaling.
Rect scale_rect(const Rect& r, float scale_x, float scale_y, int max_w, int max_h);

// Deterministically samples augmentation parameters for one image. The crop
// window is drawn uniformly among windows that contain the scaled bbox and
// cover at least 60% of the resized image's area; if geometry leaves no such
// window, the full resized image is used.
AugParams sample_aug_params(uint64_t seed, int img_h, int img_w, const Rect& bbox);

}  // namespace retarget::data
