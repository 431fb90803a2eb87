#pragma once

#include <optional>
#include <string>

#include "retarget/core/geometry.hpp"
#include "retarget/core/tensor.hpp"
#include "retarget/data/dataset.hpp"
#include "retarget/maskgen/mask_generator.hpp"
#include "retarget/net/generator.hpp"

namespace retarget::infer {

using retarget::Rect;
using retarget::Tensor;

struct RetargetOptions {
    int canvas = 512;
    std::optional<Rect> object_rect;  // placement on the target canvas; default = proportional
    std::optional<Rect> manual_bbox;  // bypass the annotation provider with a filled rectangle
    std::string mask_file;            // bypass with an explicit segmentation PNG
    std::string dump_masks_dir;       // when set, writes the conditioning mask for inspection
};

// Resolves the object annotation for an image: mask file, then manual bbox,
// then the provider. Throws when nothing yields an object.
data::ObjectAnnotation resolve_annotation(const Tensor& image, const std::string& image_path,
                                          data::AnnotationProvider* provider,
                                          const RetargetOptions& opt);

// Full retargeting pipeline: annotate, build the conditioning mask for the
// requested geometry, run the generator on the padded six-channel input, crop
// the valid region. Output is exactly [3, target_h, target_w].
Tensor retarget_image(const Tensor& image, const std::string& image_path, int target_w,
                      int target_h, net::Generator& gen, data::AnnotationProvider* provider,
                      const RetargetOptions& opt = {});

}  // namespace retarget::infer
